//! Enumeration of curves through generic conditions.
//!
//! Curves are built constructively, outward from the markings. Every
//! unmarked edge is oriented towards a free end, so each unmarked vertex
//! merges two incoming edges into one outgoing edge. A *piece* is a subtree
//! hanging off a known point P along a ray; an *in-piece* is a subtree whose
//! exit edge is still to be attached. Ends, fixed ends and markings are
//! grouped into classes and handled as multisets, so free ends of equal
//! direction are never relabeled.
//!
//! The search prunes with local parity rules only. Every candidate is then
//! re-checked by the independent pipeline in [`crate::curve`] and placed by
//! [`crate::geometry`]; disagreement is an internal error.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curve::{
    canonical_orientation, classify_vertices, curve_multiplicity, derive_directions, is_in_class,
    mikhalkin_multiplicity, type_dimension, unoriented_broccoli_check, unoriented_welschinger_check, CombType,
    Convention, CurveClass, Degree, Leaf, Node, VertexTag,
};
use crate::error::Error;
use crate::geometry::{place_curve, Conditions, PlacedCurve, Placement};
use crate::lattice::{det2, det_vp, int, LatticeVec, Point, Rational};

type R<T> = Result<T, Error>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Broccoli,
    Welschinger,
    Complex,
}

impl Mode {
    pub fn class(self) -> Option<CurveClass> {
        match self {
            Mode::Broccoli => Some(CurveClass::Broccoli),
            Mode::Welschinger => Some(CurveClass::Welschinger),
            Mode::Complex => None,
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> R<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "broccoli" => Ok(Mode::Broccoli),
            "welschinger" => Ok(Mode::Welschinger),
            "complex" => Ok(Mode::Complex),
            other => Err(Error::Problem { path: "mode".into(), msg: format!("unknown mode {other:?}") }),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Broccoli => "broccoli",
            Mode::Welschinger => "welschinger",
            Mode::Complex => "complex",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub degree: Arc<Degree>,
    pub mode: Mode,
    pub conditions: Conditions,
}

/// Number of conditions a marking set imposes must match |Δ| − 1.
pub fn check_dimension(degree: &Degree, mode: Mode) -> R<()> {
    let need = degree.len().saturating_sub(1);
    let have = match mode {
        Mode::Complex => degree.r + degree.s + degree.n_fixed(),
        _ => degree.r + 2 * degree.s + degree.n_fixed(),
    };
    if have != need || degree.is_empty() {
        let formula = if mode == Mode::Complex { "r+s+|F|" } else { "r+2s+|F|" };
        return Err(Error::DimensionMismatch(format!("{formula} = {have}, but |Δ|−1 = {need}")));
    }
    Ok(())
}

impl Problem {
    pub fn new(degree: Degree, mode: Mode, conditions: Conditions) -> R<Self> {
        check_dimension(&degree, mode)?;
        if conditions.real_points.len() != degree.r
            || conditions.complex_points.len() != degree.s
            || conditions.fixed_offsets.len() != degree.n_fixed()
        {
            return Err(Error::DimensionMismatch("conditions do not match the marking counts".into()));
        }
        Ok(Problem { degree: Arc::new(degree), mode, conditions })
    }

    /// Leaves of the abstract curve: ends plus markings.
    pub fn leaves(&self) -> usize {
        self.degree.len() + self.degree.r + self.degree.s
    }

    /// Problems expected to take more than a few minutes.
    pub fn is_long(&self) -> bool {
        is_long(&self.degree)
    }
}

/// Size guard for the CLI: degree-3 plane curves and larger.
pub fn is_long(degree: &Degree) -> bool {
    degree.len() + degree.r + degree.s > LONG_LEAVES || degree.len() >= LONG_ENDS
}

const LONG_LEAVES: usize = 13;
const LONG_ENDS: usize = 9;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Trees produced by the search, before deduplication.
    pub generated: usize,
    pub duplicates: usize,
    /// Branches cut by geometry or local vertex rules.
    pub pruned: u64,
    pub placed: usize,
}

#[derive(Clone, Debug)]
pub struct CurveRecord {
    pub encoding: String,
    pub placement: PlacedCurve,
    pub multiplicity: Rational,
    pub tags: Vec<VertexTag>,
}

#[derive(Clone, Debug)]
pub struct CountReport {
    pub value: Rational,
    pub curves: Vec<CurveRecord>,
    pub stats: Stats,
}

#[derive(Clone, Debug)]
pub struct GeneratedTypes {
    pub types: Vec<CombType>,
    pub stats: Stats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Serial,
    Parallel,
}

// ---------------------------------------------------------------- search

#[derive(Clone, Debug)]
enum ClassKind {
    Free,
    /// Two ends of an odd direction v glued into one end of direction 2v.
    Glued,
    Fixed { prim: LatticeVec, offset: Rational },
}

#[derive(Clone, Debug)]
struct Class {
    /// Direction of one unit of the class.
    dir: LatticeVec,
    kind: ClassKind,
    /// Degree end indices; consecutive pairs for glued classes.
    ends: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum MarkKind {
    Real,
    Complex,
}

#[derive(Clone, Debug)]
struct Mark {
    leaf: Leaf,
    kind: MarkKind,
    point: Point,
}

#[derive(Debug)]
enum PieceR {
    End(usize),
    Merge(Arc<InR>, Arc<PieceR>),
}

#[derive(Debug)]
enum InR {
    Fixed(usize),
    Mark(usize, Vec<Arc<PieceR>>),
    Merge(Arc<InR>, Arc<InR>),
}

#[derive(Clone, Debug)]
enum Exit {
    Ray(Point, LatticeVec),
    Line(LatticeVec, Rational),
}

#[derive(Clone, Debug)]
struct InRes {
    exit: Exit,
    tree: Arc<InR>,
}

fn fault(msg: &str) -> Error {
    Error::GenericityFault(msg.to_string())
}

/// Intersection of two exits with strictly positive ray parameters.
fn meet(a: &Exit, b: &Exit) -> R<Option<Point>> {
    let (a, b) = match (a, b) {
        (Exit::Line(..), Exit::Ray(..)) => (b, a),
        _ => (a, b),
    };
    match (a, b) {
        (Exit::Ray(p, v), Exit::Ray(q, w)) => {
            let d = det2(*v, *w);
            let qp = Point::new(&q.x - &p.x, &q.y - &p.y);
            let qp_v = int(v.x) * &qp.y - int(v.y) * &qp.x;
            if d == 0 {
                if qp_v.is_zero() {
                    // same line: a fault only if the rays overlap
                    let q_ahead = (int(v.x) * &qp.x + int(v.y) * &qp.y).is_positive();
                    let p_ahead = (-(int(w.x) * &qp.x + int(w.y) * &qp.y)).is_positive();
                    if q_ahead || p_ahead || qp.x.is_zero() && qp.y.is_zero() {
                        return Err(fault(&format!("overlapping rays from {p} and {q}")));
                    }
                }
                return Ok(None);
            }
            let qp_w = int(w.x) * &qp.y - int(w.y) * &qp.x;
            // a·v − b·w = q − p
            let ta = -qp_w / int(d);
            let tb = -qp_v / int(d);
            if ta.is_negative() || tb.is_negative() {
                return Ok(None);
            }
            if ta.is_zero() || tb.is_zero() {
                return Err(fault(&format!("rays from {p} along {v} and from {q} along {w} meet at an origin")));
            }
            Ok(Some(p.along(&ta, *v)))
        }
        (Exit::Ray(p, v), Exit::Line(u, c)) => {
            let d = det2(*u, *v);
            let at_p = det_vp(*u, p);
            if d == 0 {
                if &at_p == c {
                    return Err(fault(&format!("ray from {p} inside a fixed line")));
                }
                return Ok(None);
            }
            let t = (c - at_p) / int(d);
            if t.is_negative() {
                return Ok(None);
            }
            if t.is_zero() {
                return Err(fault(&format!("ray origin {p} on a fixed line")));
            }
            Ok(Some(p.along(&t, *v)))
        }
        (Exit::Line(u1, c1), Exit::Line(u2, c2)) => {
            let d = det2(*u1, *u2);
            if d == 0 {
                let same = (u1 == u2 && c1 == c2) || (*u1 == -*u2 && *c1 == -c2.clone());
                if same {
                    return Err(fault("coincident fixed lines"));
                }
                return Ok(None);
            }
            // −u.y·x + u.x·y = c
            let (a11, a12, a21, a22) = (int(-u1.y), int(u1.x), int(-u2.y), int(u2.x));
            let dd = &a11 * &a22 - &a12 * &a21;
            let x = (c1 * &a22 - &a12 * c2) / &dd;
            let y = (&a11 * c2 - c1 * &a21) / &dd;
            Ok(Some(Point::new(x, y)))
        }
        _ => unreachable!(),
    }
}

fn cartesian(lists: &[Arc<Vec<Arc<PieceR>>>]) -> Vec<Vec<Arc<PieceR>>> {
    let mut out: Vec<Vec<Arc<PieceR>>> = vec![Vec::new()];
    for l in lists {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for prefix in &out {
            for x in l.iter() {
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Keys encode a sub-multiset of classes (mixed radix) and a marking
/// bitmask: `key = eid << m | mask`.
struct Search {
    mode: Mode,
    classes: Vec<Class>,
    marks: Vec<Mark>,
    counts: Vec<usize>,
    stride: Vec<usize>,
    m: usize,
    e_sum: Vec<LatticeVec>,
    e_free: Vec<u32>,
    e_total: Vec<u32>,
    e_min_fixed: Vec<Option<usize>>,
    m_lo: Vec<u32>,
    m_hi: Vec<u32>,
    in_memo: Vec<Option<Arc<Vec<InRes>>>>,
    piece_splits: Vec<Option<Arc<Vec<(usize, usize)>>>>,
    piece_memo: HashMap<(usize, Point), Arc<Vec<Arc<PieceR>>>>,
    pruned: u64,
}

impl Search {
    fn new(mode: Mode, classes: Vec<Class>, marks: Vec<Mark>) -> Self {
        let counts: Vec<usize> = classes
            .iter()
            .map(|c| if matches!(c.kind, ClassKind::Glued) { c.ends.len() / 2 } else { c.ends.len() })
            .collect();
        let mut stride = Vec::with_capacity(counts.len());
        let mut n_eid = 1;
        for &c in &counts {
            stride.push(n_eid);
            n_eid *= c + 1;
        }
        let m = marks.len();
        let mut s = Search {
            mode,
            classes,
            marks,
            counts,
            stride,
            m,
            e_sum: vec![LatticeVec::ZERO; n_eid],
            e_free: vec![0; n_eid],
            e_total: vec![0; n_eid],
            e_min_fixed: vec![None; n_eid],
            m_lo: vec![0; 1 << m],
            m_hi: vec![0; 1 << m],
            in_memo: vec![None; n_eid << m],
            piece_splits: vec![None; n_eid << m],
            piece_memo: HashMap::new(),
            pruned: 0,
        };
        for eid in 0..n_eid {
            let cnt = s.decode(eid);
            let mut sum = LatticeVec::ZERO;
            for (i, &k) in cnt.iter().enumerate() {
                let c = &s.classes[i];
                sum = sum + c.dir.scale(k as i64);
                if k > 0 {
                    if let ClassKind::Fixed { .. } = c.kind {
                        if s.e_min_fixed[eid].is_none() {
                            s.e_min_fixed[eid] = Some(i);
                        }
                    } else {
                        s.e_free[eid] += k as u32;
                    }
                }
                s.e_total[eid] += k as u32;
            }
            s.e_sum[eid] = sum;
        }
        for mask in 0..(1usize << m) {
            for y in 0..m {
                if mask >> y & 1 == 1 {
                    let (lo, hi) = match (s.mode, s.marks[y].kind) {
                        (Mode::Complex, _) | (_, MarkKind::Real) => (1, 1),
                        (Mode::Broccoli, MarkKind::Complex) => (2, 2),
                        (Mode::Welschinger, MarkKind::Complex) => (1, 2),
                    };
                    s.m_lo[mask] += lo;
                    s.m_hi[mask] += hi;
                }
            }
        }
        s
    }

    fn decode(&self, eid: usize) -> Vec<usize> {
        self.counts.iter().zip(&self.stride).map(|(&c, &st)| eid / st % (c + 1)).collect()
    }

    fn split_key(&self, key: usize) -> (usize, usize) {
        (key >> self.m, key & ((1 << self.m) - 1))
    }

    fn key(&self, eid: usize, mask: usize) -> usize {
        eid << self.m | mask
    }

    fn is_empty_key(&self, key: usize) -> bool {
        let (e, mk) = self.split_key(key);
        self.e_total[e] == 0 && mk == 0
    }

    fn single_class(&self, key: usize) -> Option<usize> {
        let (e, mk) = self.split_key(key);
        if mk != 0 || self.e_total[e] != 1 {
            return None;
        }
        self.decode(e).iter().position(|&k| k == 1)
    }

    fn is_fixed(&self, c: usize) -> bool {
        matches!(self.classes[c].kind, ClassKind::Fixed { .. })
    }

    fn is_glued(&self, c: usize) -> bool {
        matches!(self.classes[c].kind, ClassKind::Glued)
    }

    fn sum(&self, key: usize) -> LatticeVec {
        self.e_sum[key >> self.m]
    }

    /// Free-end count fits an in-piece (offset 0) or a piece (offset 1).
    fn fits(&self, key: usize, offset: u32) -> bool {
        let (e, mk) = self.split_key(key);
        let f = self.e_free[e];
        self.m_lo[mk] + offset <= f && f <= self.m_hi[mk] + offset
    }

    /// All sub-keys of `key`, including empty and full.
    fn subkeys(&self, key: usize) -> Vec<usize> {
        let (e, mk) = self.split_key(key);
        let cnt = self.decode(e);
        let mut eids = vec![0usize];
        for (i, &c) in cnt.iter().enumerate() {
            let mut next = Vec::with_capacity(eids.len() * (c + 1));
            for &base in &eids {
                for k in 0..=c {
                    next.push(base + k * self.stride[i]);
                }
            }
            eids = next;
        }
        let mut masks = Vec::new();
        let mut sub = mk;
        loop {
            masks.push(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mk;
        }
        let mut out = Vec::with_capacity(eids.len() * masks.len());
        for &ei in &eids {
            for &ms in &masks {
                out.push(self.key(ei, ms));
            }
        }
        out
    }

    fn minus(&self, key: usize, sub: usize) -> usize {
        let (e, mk) = self.split_key(key);
        let (es, ms) = self.split_key(sub);
        self.key(e - es, mk & !ms)
    }

    /// Smallest labeled item; parts of a partition have distinct minima.
    fn min_item(&self, key: usize) -> Option<(u8, usize)> {
        let (e, mk) = self.split_key(key);
        if let Some(c) = self.e_min_fixed[e] {
            return Some((0, c));
        }
        if mk != 0 {
            return Some((1, mk.trailing_zeros() as usize));
        }
        None
    }

    fn merge_ok(&self, w1: LatticeVec, w2: LatticeVec) -> bool {
        match self.mode {
            Mode::Complex => true,
            // two odd edges may not merge into an even one
            _ => w1.is_even() || w2.is_even() || !(w1 + w2).is_even(),
        }
    }

    fn mark_ok(&self, y: usize, dirs: &[LatticeVec], parts: &[usize]) -> bool {
        if dirs.iter().any(|d| d.is_zero()) {
            return false;
        }
        if self.mode == Mode::Complex {
            return true;
        }
        match (self.marks[y].kind, dirs.len()) {
            (MarkKind::Real, 2) => !dirs[0].is_even(),
            (MarkKind::Complex, 3) => match dirs.iter().filter(|d| d.is_even()).count() {
                0 => true,
                1 => self.mode == Mode::Broccoli,
                _ => false,
            },
            (MarkKind::Complex, 2) => {
                let glued = parts
                    .iter()
                    .filter(|&&p| self.single_class(p).is_some_and(|c| self.is_glued(c)))
                    .count();
                dirs[0].is_even() && glued <= 1
            }
            _ => false,
        }
    }

    fn stem_counts(&self, y: usize) -> &'static [usize] {
        match (self.mode, self.marks[y].kind) {
            (Mode::Complex, _) | (_, MarkKind::Real) => &[2],
            (Mode::Broccoli, MarkKind::Complex) => &[3],
            (Mode::Welschinger, MarkKind::Complex) => &[2, 3],
        }
    }

    /// Unordered partitions of `key` into `k` nonempty parts, each fitting a
    /// piece, listed with non-decreasing keys.
    fn partitions(&self, key: usize, k: usize, min_part: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return if self.is_empty_key(key) { vec![vec![]] } else { vec![] };
        }
        if k == 1 {
            let ok = key >= min_part && !self.is_empty_key(key) && self.fits(key, 1) && !self.sum(key).is_zero();
            return if ok { vec![vec![key]] } else { vec![] };
        }
        let mut out = Vec::new();
        for sub in self.subkeys(key) {
            if sub < min_part || self.is_empty_key(sub) || sub == key || !self.fits(sub, 1) || self.sum(sub).is_zero() {
                continue;
            }
            let rest = self.minus(key, sub);
            for mut tail in self.partitions(rest, k - 1, sub) {
                tail.insert(0, sub);
                out.push(tail);
            }
        }
        out
    }

    fn marking_stems(&mut self, y: usize, rest: usize, exit: Option<LatticeVec>) -> R<Vec<Vec<Arc<PieceR>>>> {
        let mut out = Vec::new();
        let point = self.marks[y].point.clone();
        for &n in self.stem_counts(y) {
            let k = n - usize::from(exit.is_some());
            for parts in self.partitions(rest, k, 0) {
                let mut dirs: Vec<LatticeVec> = parts.iter().map(|&p| self.sum(p)).collect();
                dirs.extend(exit);
                if !self.mark_ok(y, &dirs, &parts) {
                    self.pruned += 1;
                    continue;
                }
                let mut lists = Vec::with_capacity(parts.len());
                for &p in &parts {
                    lists.push(self.piece(&point, p)?);
                }
                out.extend(cartesian(&lists));
            }
        }
        Ok(out)
    }

    fn splits_for_piece(&mut self, key: usize) -> R<Arc<Vec<(usize, usize)>>> {
        if let Some(s) = &self.piece_splits[key] {
            return Ok(s.clone());
        }
        let sig = self.sum(key);
        let mut out = Vec::new();
        for up in self.subkeys(key) {
            if self.is_empty_key(up) || up == key || !self.fits(up, 0) {
                continue;
            }
            let down = self.minus(key, up);
            if !self.fits(down, 1) {
                continue;
            }
            let w = -self.sum(up);
            if w.is_zero() || self.sum(down).is_zero() || !self.merge_ok(sig, w) {
                continue;
            }
            if self.inpiece(up)?.is_empty() {
                continue;
            }
            out.push((up, down));
        }
        let out = Arc::new(out);
        self.piece_splits[key] = Some(out.clone());
        Ok(out)
    }

    /// Subtrees starting at `p` along the ray of direction sum(key).
    fn piece(&mut self, p: &Point, key: usize) -> R<Arc<Vec<Arc<PieceR>>>> {
        if let Some(r) = self.piece_memo.get(&(key, p.clone())) {
            return Ok(r.clone());
        }
        let sig = self.sum(key);
        let mut res = Vec::new();
        if !sig.is_zero() {
            if let Some(c) = self.single_class(key) {
                if !self.is_fixed(c) {
                    res.push(Arc::new(PieceR::End(c)));
                }
            }
            if self.fits(key, 1) {
                let ray = Exit::Ray(p.clone(), sig);
                for &(up, down) in self.splits_for_piece(key)?.iter() {
                    let ins = self.inpiece(up)?;
                    for r in ins.iter() {
                        let Some(w_pt) = meet(&ray, &r.exit)? else {
                            self.pruned += 1;
                            continue;
                        };
                        for d in self.piece(&w_pt, down)?.iter() {
                            res.push(Arc::new(PieceR::Merge(r.tree.clone(), d.clone())));
                        }
                    }
                }
            }
        }
        let res = Arc::new(res);
        self.piece_memo.insert((key, p.clone()), res.clone());
        Ok(res)
    }

    /// Subtrees whose exit edge leaves with direction −sum(key).
    fn inpiece(&mut self, key: usize) -> R<Arc<Vec<InRes>>> {
        if let Some(r) = &self.in_memo[key] {
            return Ok(r.clone());
        }
        let w = -self.sum(key);
        let mut res = Vec::new();
        if !w.is_zero() {
            if let Some(c) = self.single_class(key) {
                if let ClassKind::Fixed { prim, offset } = &self.classes[c].kind {
                    res.push(InRes { exit: Exit::Line(*prim, offset.clone()), tree: Arc::new(InR::Fixed(c)) });
                }
            } else if self.fits(key, 0) {
                let (_, mask) = self.split_key(key);
                for y in 0..self.m {
                    if mask >> y & 1 == 0 {
                        continue;
                    }
                    let rest = key & !(1 << y);
                    let point = self.marks[y].point.clone();
                    for stems in self.marking_stems(y, rest, Some(w))? {
                        res.push(InRes { exit: Exit::Ray(point.clone(), w), tree: Arc::new(InR::Mark(y, stems)) });
                    }
                }
                for a in self.subkeys(key) {
                    if self.is_empty_key(a) || a == key {
                        continue;
                    }
                    let b = self.minus(key, a);
                    let (Some(ma), Some(mb)) = (self.min_item(a), self.min_item(b)) else { continue };
                    if ma > mb || !self.fits(a, 0) || !self.fits(b, 0) {
                        continue;
                    }
                    let (w1, w2) = (-self.sum(a), -self.sum(b));
                    if w1.is_zero() || w2.is_zero() || !self.merge_ok(w1, w2) {
                        continue;
                    }
                    let ra = self.inpiece(a)?;
                    if ra.is_empty() {
                        continue;
                    }
                    let rb = self.inpiece(b)?;
                    for x in ra.iter() {
                        for z in rb.iter() {
                            match meet(&x.exit, &z.exit)? {
                                Some(pt) => res.push(InRes {
                                    exit: Exit::Ray(pt, w),
                                    tree: Arc::new(InR::Merge(x.tree.clone(), z.tree.clone())),
                                }),
                                None => self.pruned += 1,
                            }
                        }
                    }
                }
            }
        }
        let res = Arc::new(res);
        self.in_memo[key] = Some(res.clone());
        Ok(res)
    }

    fn full_key(&self) -> usize {
        let eid: usize = self.counts.iter().zip(&self.stride).map(|(&c, &s)| c * s).sum();
        self.key(eid, (1 << self.m) - 1)
    }

    /// All curves, as trees rooted at the first marking (or at the free end
    /// when there are no markings).
    fn run(&mut self, degree: &Arc<Degree>) -> R<Vec<CombType>> {
        let full = self.full_key();
        let mut types = Vec::new();
        if self.m > 0 {
            let rest = full & !1;
            for stems in self.marking_stems(0, rest, None)? {
                let mut b = Assembler::new(self);
                b.mark(0, &stems);
                types.push(b.finish(degree.clone())?);
            }
        } else {
            let Some(c) = (0..self.classes.len()).find(|&c| !self.is_fixed(c) && self.counts[c] > 0) else {
                return Ok(types);
            };
            let key = full - self.key(self.stride[c], 0);
            if self.e_free[key >> self.m] != 0 {
                return Ok(types);
            }
            for r in self.inpiece(key)?.iter() {
                let mut b = Assembler::new(self);
                let leaves = b.end_leaves(c);
                if leaves.len() != 1 {
                    continue;
                }
                b.attach_in(leaves[0], &r.tree);
                types.push(b.finish(degree.clone())?);
            }
        }
        Ok(types)
    }
}

struct Assembler<'a> {
    s: &'a Search,
    nodes: Vec<Node>,
    edges: Vec<[usize; 2]>,
    next_end: Vec<usize>,
}

impl<'a> Assembler<'a> {
    fn new(s: &'a Search) -> Self {
        Assembler { s, nodes: Vec::new(), edges: Vec::new(), next_end: vec![0; s.classes.len()] }
    }

    fn node(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    /// Leaf nodes for one unit of class `c` (two for a glued unit).
    fn end_leaves(&mut self, c: usize) -> Vec<usize> {
        let k = if self.s.is_glued(c) { 2 } else { 1 };
        let mut out = Vec::new();
        for _ in 0..k {
            let idx = self.s.classes[c].ends[self.next_end[c]];
            self.next_end[c] += 1;
            out.push(self.node(Node::Leaf(Leaf::End(idx))));
        }
        out
    }

    fn mark(&mut self, y: usize, stems: &[Arc<PieceR>]) -> usize {
        let v = self.node(Node::Vertex);
        let l = self.node(Node::Leaf(self.s.marks[y].leaf));
        self.edges.push([v, l]);
        for p in stems {
            self.attach_piece(v, p);
        }
        v
    }

    fn attach_piece(&mut self, parent: usize, p: &PieceR) {
        match p {
            PieceR::End(c) => {
                for l in self.end_leaves(*c) {
                    self.edges.push([parent, l]);
                }
            }
            PieceR::Merge(up, down) => {
                let w = self.node(Node::Vertex);
                self.edges.push([parent, w]);
                self.attach_in(w, up);
                self.attach_piece(w, down);
            }
        }
    }

    fn attach_in(&mut self, target: usize, t: &InR) {
        match t {
            InR::Fixed(c) => {
                for l in self.end_leaves(*c) {
                    self.edges.push([target, l]);
                }
            }
            InR::Mark(y, stems) => {
                let v = self.mark(*y, stems);
                self.edges.push([v, target]);
            }
            InR::Merge(a, b) => {
                let w = self.node(Node::Vertex);
                self.edges.push([w, target]);
                self.attach_in(w, a);
                self.attach_in(w, b);
            }
        }
    }

    fn finish(self, degree: Arc<Degree>) -> R<CombType> {
        CombType::new(degree, self.nodes, self.edges)
            .map_err(|e| Error::Internal(format!("search produced an invalid tree: {e}")))
    }
}

fn marks_for(problem: &Problem) -> Vec<Mark> {
    let c = &problem.conditions;
    let mut marks: Vec<Mark> = c
        .real_points
        .iter()
        .enumerate()
        .map(|(i, p)| Mark { leaf: Leaf::Real(i), kind: MarkKind::Real, point: p.clone() })
        .collect();
    marks.extend(
        c.complex_points
            .iter()
            .enumerate()
            .map(|(i, p)| Mark { leaf: Leaf::Complex(i), kind: MarkKind::Complex, point: p.clone() }),
    );
    marks
}

/// Class lists, one per choice of glued double ends. Only Welschinger
/// counting glues ends.
fn class_choices(problem: &Problem) -> R<Vec<Vec<Class>>> {
    let deg = &problem.degree;
    let mut free: BTreeMap<LatticeVec, Vec<usize>> = BTreeMap::new();
    let mut fixed = Vec::new();
    for (i, e) in deg.ends.iter().enumerate() {
        if e.fixed {
            fixed.push(i);
        } else {
            free.entry(e.dir).or_default().push(i);
        }
    }
    let dirs: Vec<LatticeVec> = free.keys().copied().collect();
    let options: Vec<usize> = dirs
        .iter()
        .map(|d| if problem.mode == Mode::Welschinger && !d.is_even() { free[d].len() / 2 } else { 0 })
        .collect();
    let mut choices = vec![Vec::<usize>::new()];
    for &o in &options {
        choices = choices
            .into_iter()
            .flat_map(|c| {
                (0..=o).map(move |g| {
                    let mut c = c.clone();
                    c.push(g);
                    c
                })
            })
            .collect();
    }
    let fixed_pos = deg.fixed_indices();
    let mut out = Vec::new();
    for g in choices {
        let mut classes = Vec::new();
        for (d, &gi) in dirs.iter().zip(&g) {
            let ends = &free[d];
            if gi > 0 {
                classes.push(Class { dir: d.scale(2), kind: ClassKind::Glued, ends: ends[..2 * gi].to_vec() });
            }
            if ends.len() > 2 * gi {
                classes.push(Class { dir: *d, kind: ClassKind::Free, ends: ends[2 * gi..].to_vec() });
            }
        }
        for &i in &fixed {
            let k = fixed_pos.iter().position(|&f| f == i).unwrap();
            let offset = problem.conditions.fixed_offsets[k].clone();
            let dir = deg.ends[i].dir;
            classes.push(Class { dir, kind: ClassKind::Fixed { prim: dir.primitive()?, offset }, ends: vec![i] });
        }
        out.push(classes);
    }
    Ok(out)
}

/// Every combinatorial type of the requested class through the conditions,
/// deduplicated by canonical encoding and sorted by it.
pub fn generate_types(problem: &Problem) -> R<GeneratedTypes> {
    generate_types_with(problem, Exec::Parallel)
}

pub fn generate_types_with(problem: &Problem, exec: Exec) -> R<GeneratedTypes> {
    check_dimension(&problem.degree, problem.mode)?;
    let marks = marks_for(problem);
    if marks.len() > 24 {
        return Err(Error::DimensionMismatch("too many markings".into()));
    }
    let choices = class_choices(problem)?;
    let run = |classes: Vec<Class>| -> R<(Vec<CombType>, u64)> {
        let mut s = Search::new(problem.mode, classes, marks.clone());
        let types = s.run(&problem.degree)?;
        Ok((types, s.pruned))
    };
    let results: Vec<R<(Vec<CombType>, u64)>> = match exec {
        Exec::Serial => choices.into_iter().map(run).collect(),
        Exec::Parallel => choices.into_par_iter().map(run).collect(),
    };
    let mut stats = Stats::default();
    let mut by_code: BTreeMap<String, CombType> = BTreeMap::new();
    for r in results {
        let (types, pruned) = r?;
        stats.pruned += pruned;
        stats.generated += types.len();
        for t in types {
            let code = t.canonical_encoding();
            if by_code.insert(code, t).is_some() {
                stats.duplicates += 1;
            }
        }
    }
    Ok(GeneratedTypes { types: by_code.into_values().collect(), stats })
}

/// Place, classify and weigh one generated type.
fn process(problem: &Problem, t: CombType) -> R<CurveRecord> {
    let encoding = t.canonical_encoding();
    let internal = |what: &str| Error::Internal(format!("{what} for {encoding}"));
    let t = derive_directions(t).map_err(|e| internal(&e.to_string()))?;
    let placement = match place_curve(&t, &problem.conditions)? {
        Placement::Placed(p) => p,
        Placement::Degenerate => return Err(Error::GenericityFault(format!("zero edge length in {encoding}"))),
        Placement::NotRealizable => return Err(internal("search and linear solve disagree on realizability")),
    };
    if !placement.satisfies(&problem.conditions) {
        return Err(internal("placement misses a condition"));
    }
    let d = problem.degree.as_ref();
    if type_dimension(&t) != 2 * (d.r + d.s) + d.n_fixed() {
        return Err(internal("wrong type dimension"));
    }
    let Some(class) = problem.mode.class() else {
        let multiplicity = mikhalkin_multiplicity(&t)?;
        return Ok(CurveRecord { encoding, placement, multiplicity, tags: Vec::new() });
    };
    let t = classify_vertices(canonical_orientation(t).map_err(|e| internal(&e.to_string()))?)?;
    if !is_in_class(&t, class) {
        return Err(internal("vertex classification rejects a searched curve"));
    }
    let unoriented = match class {
        CurveClass::Broccoli => unoriented_broccoli_check(&t),
        CurveClass::Welschinger => unoriented_welschinger_check(&t),
    };
    if !unoriented {
        return Err(internal("unoriented check disagrees with orientation"));
    }
    let multiplicity = curve_multiplicity(&t, Convention::Unlabeled)?;
    let tags = t.tags().unwrap_or_default().to_vec();
    let placement = PlacedCurve { ty: t, ..placement };
    Ok(CurveRecord { encoding, placement, multiplicity, tags })
}

pub fn count_invariant(problem: &Problem) -> R<CountReport> {
    count_invariant_with(problem, Exec::Parallel)
}

pub fn count_invariant_with(problem: &Problem, exec: Exec) -> R<CountReport> {
    let gen = generate_types_with(problem, exec)?;
    let records: Vec<R<CurveRecord>> = match exec {
        Exec::Serial => gen.types.into_iter().map(|t| process(problem, t)).collect(),
        Exec::Parallel => gen.types.into_par_iter().map(|t| process(problem, t)).collect(),
    };
    let curves = records.into_iter().collect::<R<Vec<_>>>()?;
    let value = curves.iter().map(|c| c.multiplicity.clone()).sum();
    let mut stats = gen.stats;
    stats.placed = curves.len();
    Ok(CountReport { value, curves, stats })
}

// ---------------------------------------------------------------- sampling

pub const DEFAULT_BOX: i64 = 10_000;
pub const RETRIES: usize = 32;

fn random_point(rng: &mut ChaCha8Rng, bound: i64) -> Point {
    Point::from_ints(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound))
}

/// Integer conditions in [−box, box]², deterministic in the seed.
pub fn random_conditions(degree: &Degree, seed: u64, bound: i64) -> Conditions {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = bound.max(0);
    Conditions {
        real_points: (0..degree.r).map(|_| random_point(&mut rng, bound)).collect(),
        complex_points: (0..degree.s).map(|_| random_point(&mut rng, bound)).collect(),
        fixed_offsets: (0..degree.n_fixed()).map(|_| int(rng.gen_range(-bound..=bound))).collect(),
    }
}

/// Seed of resampling attempt `k` for a base seed.
pub fn attempt_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

#[derive(Clone, Debug)]
pub struct Sampled {
    pub conditions: Conditions,
    pub report: CountReport,
    /// Number of condition sets drawn, including the accepted one.
    pub attempts: usize,
    pub faults: Vec<String>,
}

/// Count through random conditions, resampling on genericity faults.
pub fn count_random(degree: &Degree, mode: Mode, seed: u64, bound: i64, exec: Exec) -> R<Sampled> {
    check_dimension(degree, mode)?;
    let degree = Arc::new(degree.clone());
    let mut faults = Vec::new();
    for k in 0..RETRIES {
        let conditions = random_conditions(&degree, attempt_seed(seed, k), bound);
        let problem = Problem { degree: degree.clone(), mode, conditions };
        match count_invariant_with(&problem, exec) {
            Ok(report) => {
                return Ok(Sampled { conditions: problem.conditions, report, attempts: k + 1, faults });
            }
            Err(Error::GenericityFault(msg)) => faults.push(msg),
            Err(e) => return Err(e),
        }
    }
    Err(Error::GenericityExhausted(RETRIES))
}

#[derive(Clone, Debug)]
pub struct Trial {
    pub seed: u64,
    pub value: Rational,
    pub attempts: usize,
    pub conditions: Conditions,
    pub curves: usize,
}

#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub trials: Vec<Trial>,
    pub constant: bool,
}

impl InvarianceReport {
    pub fn values(&self) -> Vec<Rational> {
        self.trials.iter().map(|t| t.value.clone()).collect()
    }
}

/// Trial `t` uses base seed `seed + t`.
pub fn invariance_experiment(degree: &Degree, mode: Mode, trials: usize, seed: u64, bound: i64) -> R<InvarianceReport> {
    if trials < 2 {
        return Err(Error::DimensionMismatch("an invariance experiment needs at least two trials".into()));
    }
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let s = seed.wrapping_add(t as u64);
        let sampled = count_random(degree, mode, s, bound, Exec::Parallel)?;
        out.push(Trial {
            seed: s,
            value: sampled.report.value,
            attempts: sampled.attempts,
            conditions: sampled.conditions,
            curves: sampled.report.curves.len(),
        });
    }
    let constant = out.windows(2).all(|w| w[0].value == w[1].value);
    Ok(InvarianceReport { trials: out, constant })
}

/// Thread count from `TROPICOUNT_THREADS`; `None` when unset or invalid.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("TROPICOUNT_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{del_pezzo_degree, End, Surface};

    fn v(x: i64, y: i64) -> LatticeVec {
        LatticeVec::new(x, y)
    }

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn line_problem(a: Point, b: Point) -> Problem {
        let deg = del_pezzo_degree(&Surface::P2 { d: 1 }).unwrap().with_markings(2, 0);
        let cond = Conditions { real_points: vec![a, b], ..Default::default() };
        Problem::new(deg, Mode::Broccoli, cond).unwrap()
    }

    #[test]
    fn meet_examples() {
        let r1 = Exit::Ray(p(0, 0), v(1, 0));
        let r2 = Exit::Ray(p(2, -1), v(0, 1));
        assert_eq!(meet(&r1, &r2).unwrap(), Some(p(2, 0)));
        let r3 = Exit::Ray(p(2, 1), v(0, 1));
        assert_eq!(meet(&r1, &r3).unwrap(), None);
        let r4 = Exit::Ray(p(5, 0), v(-1, 0));
        assert!(meet(&r1, &r4).is_err());
        let away = Exit::Ray(p(-5, 0), v(-1, 0));
        assert_eq!(meet(&r1, &away).unwrap(), None);
        // q lies on the backward extension of the first ray
        let behind = Exit::Ray(p(-3, 0), v(0, 1));
        assert_eq!(meet(&r1, &behind).unwrap(), None);
        let ahead = Exit::Ray(p(3, 0), v(0, 1));
        assert!(meet(&r1, &ahead).is_err());
        let line = Exit::Line(v(1, 0), int(3));
        // det((1,0),(x,y)) = y = 3
        let up = Exit::Ray(p(1, 1), v(1, 1));
        assert_eq!(meet(&up, &line).unwrap(), Some(p(3, 3)));
        let l2 = Exit::Line(v(0, 1), int(-2));
        // −x = −2
        assert_eq!(meet(&line, &l2).unwrap(), Some(p(2, 3)));
    }

    #[test]
    fn unique_line() {
        let pr = line_problem(p(0, 0), p(3, 1));
        let rep = count_invariant(&pr).unwrap();
        assert_eq!(rep.curves.len(), 1);
        assert_eq!(rep.value, int(1));
        assert!(rep.stats.generated >= 1);
    }

    #[test]
    fn coincident_points_fault() {
        let pr = line_problem(p(1, 1), p(1, 1));
        assert!(matches!(count_invariant(&pr), Err(Error::GenericityFault(_))));
    }

    #[test]
    fn box_zero_exhausts() {
        let deg = del_pezzo_degree(&Surface::P2 { d: 1 }).unwrap().with_markings(2, 0);
        assert_eq!(
            count_random(&deg, Mode::Broccoli, 1, 0, Exec::Serial).unwrap_err(),
            Error::GenericityExhausted(RETRIES)
        );
    }

    #[test]
    fn sampling_is_deterministic() {
        let deg = del_pezzo_degree(&Surface::P2 { d: 3 }).unwrap().with_markings(8, 0);
        assert_eq!(random_conditions(&deg, 42, 1000), random_conditions(&deg, 42, 1000));
        assert_ne!(random_conditions(&deg, 42, 1000), random_conditions(&deg, 43, 1000));
    }

    #[test]
    fn conic_counts() {
        let deg = del_pezzo_degree(&Surface::P2 { d: 2 }).unwrap().with_markings(5, 0);
        for seed in 0..3 {
            let s = count_random(&deg, Mode::Broccoli, seed, DEFAULT_BOX, Exec::Serial).unwrap();
            assert_eq!(s.report.value, int(1));
        }
        let deg = del_pezzo_degree(&Surface::P2 { d: 2 }).unwrap().with_markings(1, 2);
        let s = count_random(&deg, Mode::Broccoli, 7, DEFAULT_BOX, Exec::Serial).unwrap();
        assert_eq!(s.report.value, int(1));
    }

    #[test]
    fn complex_conic_and_line() {
        let deg = del_pezzo_degree(&Surface::P2 { d: 2 }).unwrap().with_markings(5, 0);
        let s = count_random(&deg, Mode::Complex, 3, DEFAULT_BOX, Exec::Serial).unwrap();
        assert_eq!(s.report.value, int(1));
    }

    #[test]
    fn one_fixed_end_line() {
        // line through one point, left end on a fixed horizontal line
        let ends = vec![End::fixed(v(-1, 0), int(0)), End::free(v(0, -1)), End::free(v(1, 1))];
        let deg = Degree::new(ends, 1, 0).unwrap();
        let s = count_random(&deg, Mode::Broccoli, 5, DEFAULT_BOX, Exec::Serial).unwrap();
        assert_eq!(s.report.value, int(1));
    }

    #[test]
    fn no_markings_two_fixed_ends() {
        let ends = vec![End::fixed(v(-1, 0), int(2)), End::fixed(v(0, -1), int(-3)), End::free(v(1, 1))];
        let deg = Degree::new(ends, 0, 0).unwrap();
        let s = count_random(&deg, Mode::Broccoli, 5, DEFAULT_BOX, Exec::Serial).unwrap();
        assert_eq!(s.report.value, int(1));
        assert_eq!(s.report.curves.len(), 1);
    }

    #[test]
    fn dimension_checked() {
        let deg = del_pezzo_degree(&Surface::P2 { d: 1 }).unwrap().with_markings(1, 0);
        assert!(matches!(
            Problem::new(deg, Mode::Broccoli, Conditions { real_points: vec![p(0, 0)], ..Default::default() }),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn serial_equals_parallel() {
        let deg = del_pezzo_degree(&Surface::P2 { d: 2 }).unwrap().with_markings(3, 1);
        let cond = random_conditions(&deg, 11, DEFAULT_BOX);
        let pr = Problem::new(deg, Mode::Welschinger, cond).unwrap();
        let a = count_invariant_with(&pr, Exec::Serial).unwrap();
        let b = count_invariant_with(&pr, Exec::Parallel).unwrap();
        assert_eq!(a.value, b.value);
        let ea: Vec<_> = a.curves.iter().map(|c| &c.encoding).collect();
        let eb: Vec<_> = b.curves.iter().map(|c| &c.encoding).collect();
        assert_eq!(ea, eb);
    }
}
