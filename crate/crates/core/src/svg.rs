//! SVG drawings of placed curves.
//!
//! Odd edges are thin, even edges thick, real markings small dots and
//! complex markings big dots. Unbounded ends are clipped at the bounding
//! box; fixed ends get a short bar across the clipped end.

use std::fmt::Write;

use num_traits::ToPrimitive;

use crate::curve::{Leaf, Node};
use crate::enumerate::CountReport;
use crate::geometry::PlacedCurve;
use crate::lattice::{LatticeVec, Point};

/// Width of the canvas in pixels; the height follows the box aspect ratio.
pub const CANVAS_WIDTH: f64 = 800.0;
const PAD: f64 = 0.2;
const BAR: f64 = 8.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BBox {
    /// Smallest box around all vertices and markings, padded by 20% per side.
    pub fn around(report: &CountReport) -> BBox {
        let pts: Vec<(f64, f64)> = report
            .curves
            .iter()
            .flat_map(|c| c.placement.vertex_positions())
            .flatten()
            .map(|p| to_f(&p))
            .collect();
        if pts.is_empty() {
            return BBox { min_x: -1.0, min_y: -1.0, max_x: 1.0, max_y: 1.0 };
        }
        let (mut b, rest) = (BBox { min_x: pts[0].0, min_y: pts[0].1, max_x: pts[0].0, max_y: pts[0].1 }, &pts[1..]);
        for &(x, y) in rest {
            b.min_x = b.min_x.min(x);
            b.min_y = b.min_y.min(y);
            b.max_x = b.max_x.max(x);
            b.max_y = b.max_y.max(y);
        }
        b.padded()
    }

    fn padded(self) -> BBox {
        let span = (self.max_x - self.min_x).max(self.max_y - self.min_y).max(1.0);
        let px = ((self.max_x - self.min_x) * PAD).max(span * PAD);
        let py = ((self.max_y - self.min_y) * PAD).max(span * PAD);
        BBox { min_x: self.min_x - px, min_y: self.min_y - py, max_x: self.max_x + px, max_y: self.max_y + py }
    }

    /// Liang–Barsky clip of `p + t·u`, t ∈ [0, t1], to the box.
    fn clip(&self, p: (f64, f64), u: (f64, f64), t1: f64) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (0.0f64, t1);
        for (q, d, a, b) in [(p.0, u.0, self.min_x, self.max_x), (p.1, u.1, self.min_y, self.max_y)] {
            if d == 0.0 {
                if q < a || q > b {
                    return None;
                }
                continue;
            }
            let (ta, tb) = ((a - q) / d, (b - q) / d);
            lo = lo.max(ta.min(tb));
            hi = hi.min(ta.max(tb));
        }
        (lo <= hi).then_some((lo, hi))
    }
}

fn to_f(p: &Point) -> (f64, f64) {
    (p.x.to_f64().unwrap_or(f64::NAN), p.y.to_f64().unwrap_or(f64::NAN))
}

struct Canvas {
    bbox: BBox,
    scale: f64,
    height: f64,
}

impl Canvas {
    fn new(bbox: BBox) -> Canvas {
        let w = (bbox.max_x - bbox.min_x).max(f64::MIN_POSITIVE);
        let scale = CANVAS_WIDTH / w;
        let height = ((bbox.max_y - bbox.min_y) * scale).max(1.0);
        Canvas { bbox, scale, height }
    }

    fn px(&self, (x, y): (f64, f64)) -> (f64, f64) {
        ((x - self.bbox.min_x) * self.scale, (self.bbox.max_y - y) * self.scale)
    }
}

fn line(out: &mut String, a: (f64, f64), b: (f64, f64), width: u32) {
    let _ = writeln!(
        out,
        r#"    <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke-width="{width}"/>"#,
        a.0, a.1, b.0, b.1
    );
}

fn draw_curve(out: &mut String, cv: &Canvas, curve: &PlacedCurve) {
    let t = &curve.ty;
    let pos: Vec<Option<(f64, f64)>> = curve.vertex_positions().iter().map(|p| p.as_ref().map(to_f)).collect();
    let fu = |v: LatticeVec| (v.x as f64, v.y as f64);
    for (e, &[a, b]) in t.edges().iter().enumerate() {
        if t.is_marking_edge(e) {
            continue;
        }
        let width = if t.dirs().map(|d| d[e].is_even()).unwrap_or(false) { 3 } else { 1 };
        if t.is_bounded(e) {
            let (Some(pa), Some(pb)) = (pos[a], pos[b]) else { continue };
            let u = (pb.0 - pa.0, pb.1 - pa.1);
            if let Some((lo, hi)) = cv.bbox.clip(pa, u, 1.0) {
                let s = (pa.0 + lo * u.0, pa.1 + lo * u.1);
                let f = (pa.0 + hi * u.0, pa.1 + hi * u.1);
                line(out, cv.px(s), cv.px(f), width);
            }
            continue;
        }
        // unbounded end: ray from its vertex
        let (v, leaf) = if matches!(t.nodes()[a], Node::Vertex) { (a, b) } else { (b, a) };
        let Some(pv) = pos[v] else { continue };
        let u = fu(t.dir_from(e, v));
        let Some((lo, hi)) = cv.bbox.clip(pv, u, f64::INFINITY) else { continue };
        if !hi.is_finite() {
            continue;
        }
        let s = cv.px((pv.0 + lo * u.0, pv.1 + lo * u.1));
        let f = cv.px((pv.0 + hi * u.0, pv.1 + hi * u.1));
        line(out, s, f, width);
        let fixed = matches!(t.nodes()[leaf], Node::Leaf(Leaf::End(i)) if t.degree().ends[i].fixed);
        if fixed {
            // screen-space normal of the direction (y is flipped)
            let n = (u.1, u.0);
            let len = (n.0 * n.0 + n.1 * n.1).sqrt();
            let n = (n.0 / len * BAR, n.1 / len * BAR);
            let back = {
                let l = (u.0 * u.0 + u.1 * u.1).sqrt();
                (f.0 - u.0 / l * BAR, f.1 + u.1 / l * BAR)
            };
            line(out, (back.0 - n.0, back.1 - n.1), (back.0 + n.0, back.1 + n.1), 2);
        }
    }
    for (ln, node) in t.nodes().iter().enumerate() {
        let r = match node {
            Node::Leaf(Leaf::Real(_)) => 2,
            Node::Leaf(Leaf::Complex(_)) => 4,
            _ => continue,
        };
        let Some(p) = pos[t.attachment(ln)] else { continue };
        let (x, y) = cv.px(p);
        let _ = writeln!(out, r#"    <circle cx="{x:.2}" cy="{y:.2}" r="{r}"/>"#);
    }
}

/// One `<g>` per curve, all in the same coordinates. Deterministic output.
pub fn render_svg(report: &CountReport, bbox: Option<BBox>) -> String {
    let cv = Canvas::new(bbox.unwrap_or_else(|| BBox::around(report)));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#,
        w = CANVAS_WIDTH,
        h = cv.height
    );
    for (k, c) in report.curves.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"  <g id="curve-{k}" data-multiplicity="{}" stroke="{colour}" fill="{colour}" stroke-linecap="round">"#,
            crate::lattice::fmt_rat(&c.multiplicity)
        );
        draw_curve(&mut out, &cv, &c.placement);
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{del_pezzo_degree, Degree, Surface};
    use crate::enumerate::{count_invariant, random_conditions, Mode, Problem, Stats};
    use crate::seq::WeightSeq;
    use crate::geometry::Conditions;
    use crate::lattice::int;

    fn report(deg: Degree, cond: Conditions) -> CountReport {
        count_invariant(&Problem::new(deg, Mode::Broccoli, cond).unwrap()).unwrap()
    }

    #[test]
    fn line_through_two_points() {
        let deg = del_pezzo_degree(&Surface::P2 { d: 1 }).unwrap().with_markings(2, 0);
        let cond = Conditions { real_points: vec![Point::from_ints(0, 0), Point::from_ints(3, 1)], ..Default::default() };
        let rep = report(deg, cond);
        assert_eq!(rep.curves.len(), 1);
        let pos = rep.curves[0].placement.vertex_positions();
        assert!(pos.iter().flatten().any(|p| *p == Point::from_ints(2, 0)));
        let svg = render_svg(&rep, None);
        // three rays, two of them split at the marked points
        assert_eq!(svg.matches("<line").count(), 5);
        assert_eq!(svg.matches(r#"stroke-width="1""#).count(), 5);
        assert_eq!(svg.matches(r#"r="2""#).count(), 2);
        assert_eq!(svg, render_svg(&rep, None));
    }

    #[test]
    fn even_end_is_thick() {
        let deg = Degree::relative(2, &WeightSeq::unit(2), &WeightSeq::zero()).unwrap().with_markings(3, 0);
        let cond = random_conditions(&deg, 7, 100);
        let rep = report(deg, cond);
        assert!(!rep.curves.is_empty());
        let svg = render_svg(&rep, None);
        assert_eq!(svg.matches("<g ").count(), rep.curves.len());
        assert!(svg.contains(r#"stroke-width="3""#));
    }

    #[test]
    fn fixed_end_has_bar() {
        let deg = Degree::relative(1, &WeightSeq::unit(1), &WeightSeq::zero()).unwrap().with_markings(1, 0);
        let cond = Conditions { real_points: vec![Point::from_ints(2, 1)], fixed_offsets: vec![int(3)], ..Default::default() };
        let rep = report(deg, cond);
        assert_eq!(rep.curves.len(), 1);
        let svg = render_svg(&rep, None);
        assert_eq!(svg.matches(r#"stroke-width="2""#).count(), 1);
        assert!(!svg.contains(r#"stroke-width="3""#));
    }

    #[test]
    fn empty_report_is_valid() {
        let rep = CountReport { value: int(0), curves: Vec::new(), stats: Stats::default() };
        let svg = render_svg(&rep, None);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("<g"));
    }
}
