//! Exact placement of a combinatorial type through point and line
//! conditions. Unknowns are the root vertex position and one length per
//! bounded edge.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::curve::{CombType, Leaf, Node};
use crate::error::Error;
use crate::lattice::{det_vp, int, LatticeVec, Point, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Conditions {
    pub real_points: Vec<Point>,
    pub complex_points: Vec<Point>,
    /// One offset per fixed end, in the order of `Degree::fixed_indices`.
    pub fixed_offsets: Vec<Rational>,
}

impl Conditions {
    pub fn point(&self, leaf: Leaf) -> Option<&Point> {
        match leaf {
            Leaf::Real(i) => self.real_points.get(i),
            Leaf::Complex(i) => self.complex_points.get(i),
            Leaf::End(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    /// Root vertex (node index); columns 0 and 1 are its coordinates.
    pub root: usize,
    /// Bounded edge for column `2 + k`.
    pub bounded: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PlacedCurve {
    pub ty: CombType,
    pub root: usize,
    pub root_position: Point,
    /// (edge, length) for every bounded edge.
    pub lengths: Vec<(usize, Rational)>,
}

#[derive(Clone, Debug)]
pub enum Placement {
    Placed(PlacedCurve),
    NotRealizable,
    Degenerate,
}

/// Position of every vertex as the root plus a combination of edge lengths:
/// entry `v` lists (column, direction) pairs, root coordinates implicit.
fn vertex_paths(t: &CombType, root: usize, bounded: &[usize]) -> Vec<Option<Vec<(usize, LatticeVec)>>> {
    let n = t.nodes().len();
    let col_of = |e: usize| bounded.iter().position(|&b| b == e).map(|k| k + 2);
    let mut paths: Vec<Option<Vec<(usize, LatticeVec)>>> = vec![None; n];
    paths[root] = Some(Vec::new());
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &e in t.incident(v) {
            let Some(col) = col_of(e) else { continue };
            let [a, b] = t.edges()[e];
            let w = if a == v { b } else { a };
            if paths[w].is_some() {
                continue;
            }
            let mut p = paths[v].clone().unwrap();
            p.push((col, t.dir_from(e, v)));
            paths[w] = Some(p);
            stack.push(w);
        }
    }
    paths
}

pub fn build_system(t: &CombType, cond: &Conditions) -> Result<LinearSystem, Error> {
    if t.dirs().is_none() {
        return Err(Error::Internal("directions not derived".into()));
    }
    let deg = t.degree();
    if cond.real_points.len() != deg.r || cond.complex_points.len() != deg.s || cond.fixed_offsets.len() != deg.n_fixed() {
        return Err(Error::DimensionMismatch(format!(
            "conditions give {} real, {} complex, {} fixed; type needs {}, {}, {}",
            cond.real_points.len(),
            cond.complex_points.len(),
            cond.fixed_offsets.len(),
            deg.r,
            deg.s,
            deg.n_fixed()
        )));
    }
    let root = t
        .nodes()
        .iter()
        .position(|n| *n == Node::Vertex)
        .ok_or_else(|| Error::MalformedType("no vertex".into()))?;
    let bounded = t.bounded_edges();
    let cols = 2 + bounded.len();
    let paths = vertex_paths(t, root, &bounded);
    let fixed = deg.fixed_indices();
    let mut matrix = Vec::new();
    let mut rhs = Vec::new();
    for (leaf_node, node) in t.nodes().iter().enumerate() {
        let Node::Leaf(leaf) = *node else { continue };
        let v = t.attachment(leaf_node);
        let path = paths[v].as_ref().expect("tree is connected through bounded edges");
        match leaf {
            Leaf::Real(_) | Leaf::Complex(_) => {
                let p = cond.point(leaf).unwrap();
                let mut rx = vec![Rational::zero(); cols];
                let mut ry = vec![Rational::zero(); cols];
                rx[0] = Rational::one();
                ry[1] = Rational::one();
                for &(c, d) in path {
                    rx[c] += int(d.x);
                    ry[c] += int(d.y);
                }
                matrix.push(rx);
                rhs.push(p.x.clone());
                matrix.push(ry);
                rhs.push(p.y.clone());
            }
            Leaf::End(i) if deg.ends[i].fixed => {
                let k = fixed.iter().position(|&f| f == i).unwrap();
                let u = deg.ends[i].dir.primitive()?;
                // det2(u, (x, y)) = u.x·y − u.y·x
                let mut row = vec![Rational::zero(); cols];
                row[0] = int(-u.y);
                row[1] = int(u.x);
                for &(c, d) in path {
                    row[c] += int(crate::lattice::det2(u, d));
                }
                matrix.push(row);
                rhs.push(cond.fixed_offsets[k].clone());
            }
            Leaf::End(_) => {}
        }
    }
    if matrix.len() != cols {
        return Err(Error::NotSquare { rows: matrix.len(), cols });
    }
    Ok(LinearSystem { matrix, rhs, root, bounded })
}

/// Solve a square system exactly: rows are scaled to integers, reduced by
/// fraction-free (Bareiss) elimination and back-substituted.
pub fn solve_exact(matrix: &[Vec<Rational>], rhs: &[Rational]) -> Result<Vec<Rational>, Error> {
    let n = matrix.len();
    if rhs.len() != n || matrix.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare { rows: n, cols: matrix.first().map_or(0, |r| r.len()) });
    }
    let mut m: Vec<Vec<BigInt>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let l = row.iter().chain(std::iter::once(b)).fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .chain(std::iter::once(b))
                .map(|x| x.numer() * (&l / x.denom()))
                .collect()
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
            return Err(Error::Singular);
        };
        m.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= Rational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Ok(x)
}

pub fn place_curve(t: &CombType, cond: &Conditions) -> Result<Placement, Error> {
    let sys = build_system(t, cond)?;
    let sol = match solve_exact(&sys.matrix, &sys.rhs) {
        Ok(s) => s,
        Err(Error::Singular) => return Ok(Placement::NotRealizable),
        Err(e) => return Err(e),
    };
    let lengths: Vec<(usize, Rational)> = sys.bounded.iter().zip(&sol[2..]).map(|(&e, l)| (e, l.clone())).collect();
    if lengths.iter().any(|(_, l)| l.is_negative()) {
        return Ok(Placement::NotRealizable);
    }
    if lengths.iter().any(|(_, l)| l.is_zero()) {
        return Ok(Placement::Degenerate);
    }
    Ok(Placement::Placed(PlacedCurve {
        ty: t.clone(),
        root: sys.root,
        root_position: Point::new(sol[0].clone(), sol[1].clone()),
        lengths,
    }))
}

impl PlacedCurve {
    /// Position of every vertex node; `None` for leaves.
    pub fn vertex_positions(&self) -> Vec<Option<Point>> {
        let t = &self.ty;
        let mut pos: Vec<Option<Point>> = vec![None; t.nodes().len()];
        pos[self.root] = Some(self.root_position.clone());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            for &e in t.incident(v) {
                let Some((_, len)) = self.lengths.iter().find(|(b, _)| *b == e) else { continue };
                let [a, b] = t.edges()[e];
                let w = if a == v { b } else { a };
                if pos[w].is_some() {
                    continue;
                }
                pos[w] = Some(pos[v].as_ref().unwrap().along(len, t.dir_from(e, v)));
                stack.push(w);
            }
        }
        pos
    }

    /// Every marking sits on its point and every fixed end on its line.
    pub fn satisfies(&self, cond: &Conditions) -> bool {
        let t = &self.ty;
        let pos = self.vertex_positions();
        let fixed = t.degree().fixed_indices();
        t.nodes().iter().enumerate().all(|(ln, node)| {
            let Node::Leaf(leaf) = *node else { return true };
            let p = pos[t.attachment(ln)].as_ref().unwrap();
            match leaf {
                Leaf::Real(_) | Leaf::Complex(_) => cond.point(leaf) == Some(p),
                Leaf::End(i) => match fixed.iter().position(|&f| f == i) {
                    Some(k) => {
                        let u = t.degree().ends[i].dir.primitive().unwrap();
                        det_vp(u, p) == cond.fixed_offsets[k]
                    }
                    None => true,
                },
            }
        })
    }
}
