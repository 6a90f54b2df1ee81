//! Degrees and combinatorial types of marked rational plane tropical curves.
//!
//! A combinatorial type is an abstract tree. Its leaves are the unmarked
//! ends and the markings (contracted ends); its inner vertices are 3- or
//! 4-valent. Directions of bounded edges follow from the leaves by
//! balancing, orientation from the position of the free ends, and vertex
//! tags from orientation and parity.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::lattice::{det2, int, ipow, GaussRat, LatticeVec, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct End {
    pub dir: LatticeVec,
    pub fixed: bool,
    /// det2(primitive(dir), p) for any point p of the line; fixed ends only.
    pub offset: Option<Rational>,
}

impl End {
    pub fn free(dir: LatticeVec) -> Self {
        End { dir, fixed: false, offset: None }
    }

    pub fn fixed(dir: LatticeVec, offset: Rational) -> Self {
        End { dir, fixed: true, offset: Some(offset) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Degree {
    pub ends: Vec<End>,
    /// Number of real markings.
    pub r: usize,
    /// Number of complex markings.
    pub s: usize,
}

impl Degree {
    pub fn new(ends: Vec<End>, r: usize, s: usize) -> Result<Self, Error> {
        for (i, e) in ends.iter().enumerate() {
            if e.dir.is_zero() {
                return Err(Error::InvalidDirection);
            }
            if e.fixed != e.offset.is_some() {
                return Err(Error::MalformedType(format!("end {i}: offset must be given exactly for fixed ends")));
            }
        }
        let sum: LatticeVec = ends.iter().map(|e| e.dir).sum();
        if !sum.is_zero() {
            return Err(Error::MalformedType(format!("end directions sum to {sum}, not (0,0)")));
        }
        Ok(Degree { ends, r, s })
    }

    /// Degree with all ends free and no markings.
    pub fn from_dirs(dirs: &[LatticeVec]) -> Result<Self, Error> {
        Degree::new(dirs.iter().map(|&d| End::free(d)).collect(), 0, 0)
    }

    pub fn with_markings(mut self, r: usize, s: usize) -> Self {
        self.r = r;
        self.s = s;
        self
    }

    pub fn len(&self) -> usize {
        self.ends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ends.is_empty()
    }

    pub fn fixed_indices(&self) -> Vec<usize> {
        (0..self.ends.len()).filter(|&i| self.ends[i].fixed).collect()
    }

    pub fn n_fixed(&self) -> usize {
        self.ends.iter().filter(|e| e.fixed).count()
    }

    /// r + 2s + |F| = |Δ| − 1
    pub fn is_counting_dimension(&self) -> bool {
        self.r + 2 * self.s + self.n_fixed() + 1 == self.ends.len()
    }

    /// Stable order: free ends before fixed ones, then by direction.
    pub fn canonicalize(&mut self) {
        self.ends.sort_by(|a, b| {
            (a.fixed, a.dir, &a.offset).cmp(&(b.fixed, b.dir, &b.offset))
        });
    }

    /// Degree Δ(α, β) of degree-d plane curves: d ends (0,−1), d ends (1,1),
    /// α_i fixed and β_i free ends (−i, 0). Fixed offsets are set to zero;
    /// callers supply real ones through the conditions.
    pub fn relative(d: u32, alpha: &crate::seq::WeightSeq, beta: &crate::seq::WeightSeq) -> Result<Self, Error> {
        if alpha.weight() + beta.weight() != d as u64 {
            return Err(Error::InvalidKey(format!("Iα + Iβ ≠ {d}")));
        }
        let mut ends = Vec::new();
        for _ in 0..d {
            ends.push(End::free(LatticeVec::new(0, -1)));
            ends.push(End::free(LatticeVec::new(1, 1)));
        }
        for i in 1..=beta.len() {
            for _ in 0..beta.get(i) {
                ends.push(End::free(LatticeVec::new(-(i as i64), 0)));
            }
        }
        for i in 1..=alpha.len() {
            for _ in 0..alpha.get(i) {
                ends.push(End::fixed(LatticeVec::new(-(i as i64), 0), Rational::zero()));
            }
        }
        let mut deg = Degree::new(ends, 0, 0)?;
        deg.canonicalize();
        Ok(deg)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Surface {
    P2 { d: i64 },
    P1xP1 { d1: i64, d2: i64 },
    /// P² blown up in `blown.len()` ≤ 3 points, class d·L − Σ dᵢ·Eᵢ.
    P2Blown { d: i64, blown: Vec<i64> },
}

/// Primitive outward facet normals of the polygon Q(D), each repeated by
/// the lattice length of its facet.
pub fn del_pezzo_degree(surface: &Surface) -> Result<Degree, Error> {
    let p = |x: i64, y: i64| LatticeVec::new(x, y);
    let poly = match surface {
        Surface::P2 { d } => vec![p(0, 0), p(*d, 0), p(0, *d)],
        Surface::P1xP1 { d1, d2 } => vec![p(0, 0), p(*d1, 0), p(*d1, *d2), p(0, *d2)],
        Surface::P2Blown { d, blown } => match blown.as_slice() {
            [d1] => vec![p(0, 0), p(d - d1, 0), p(d - d1, *d1), p(0, *d)],
            [d1, d2] => vec![p(*d2, 0), p(d - d1, 0), p(d - d1, *d1), p(0, *d), p(0, *d2)],
            [d1, d2, d3] => vec![
                p(*d2, 0),
                p(d - d1, 0),
                p(d - d1, *d1),
                p(*d3, d - d3),
                p(0, d - d3),
                p(0, *d2),
            ],
            _ => return Err(Error::InvalidClass("at most three blown-up points".into())),
        },
    };
    polygon_degree(&poly)
}

fn polygon_degree(poly: &[LatticeVec]) -> Result<Degree, Error> {
    let n = poly.len();
    let mut ends = Vec::new();
    let mut area2 = 0;
    for i in 0..n {
        let e = poly[(i + 1) % n] - poly[i];
        area2 += det2(poly[i], poly[(i + 1) % n]);
        if e.is_zero() {
            continue;
        }
        let next = poly[(i + 2) % n] - poly[(i + 1) % n];
        if !next.is_zero() && det2(e, next) < 0 {
            return Err(Error::InvalidClass("polygon is not convex".into()));
        }
        let normal = LatticeVec::new(e.y, -e.x);
        let len = normal.weight();
        let prim = normal.primitive()?;
        for _ in 0..len {
            ends.push(End::free(prim));
        }
    }
    if area2 <= 0 {
        return Err(Error::InvalidClass("polygon has no interior".into()));
    }
    let mut deg = Degree::new(ends, 0, 0)?;
    deg.canonicalize();
    Ok(deg)
}

/// |G(Δ, F)|: the product over distinct free directions of (multiplicity)!.
pub fn group_order(degree: &Degree) -> BigInt {
    let mut counts: BTreeMap<LatticeVec, u64> = BTreeMap::new();
    for e in degree.ends.iter().filter(|e| !e.fixed) {
        *counts.entry(e.dir).or_default() += 1;
    }
    counts.values().map(|&c| crate::seq::factorial(c)).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Leaf {
    /// Index into `Degree::ends`.
    End(usize),
    Real(usize),
    Complex(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Vertex,
    Leaf(Leaf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TagKind {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6a,
    T6b,
    T7,
    T8,
    Unclassifiable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexTag {
    pub node: usize,
    pub kind: TagKind,
    /// |det| of two unmarked adjacent directions (the two even ones for T8).
    pub a: i64,
    /// Directions of the unmarked adjacent edges, measured away from the vertex.
    pub dirs: Vec<LatticeVec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Labeled,
    Unlabeled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveClass {
    Broccoli,
    Welschinger,
}

impl CurveClass {
    pub fn admits(self, k: TagKind) -> bool {
        use TagKind::*;
        match self {
            CurveClass::Broccoli => matches!(k, T1 | T2 | T3 | T4 | T5 | T6a | T6b),
            CurveClass::Welschinger => matches!(k, T1 | T2 | T3 | T4 | T5 | T6b | T7 | T8),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CombType {
    degree: Arc<Degree>,
    nodes: Vec<Node>,
    edges: Vec<[usize; 2]>,
    adj: Vec<Vec<usize>>,
    double_end_pairs: Vec<(usize, usize)>,
    /// Direction of edge e from `edges[e][0]` towards `edges[e][1]`.
    dirs: Option<Vec<LatticeVec>>,
    /// Node each edge points to; `None` for marking edges.
    heads: Option<Vec<Option<usize>>>,
    tags: Option<Vec<VertexTag>>,
}

impl CombType {
    /// Build and validate a tree. Every end of `degree` and every marking
    /// (r real, s complex) must appear as exactly one leaf.
    pub fn new(degree: Arc<Degree>, nodes: Vec<Node>, edges: Vec<[usize; 2]>) -> Result<Self, Error> {
        let n = nodes.len();
        if edges.len() + 1 != n {
            return Err(Error::MalformedType("not a tree: |E| ≠ |V| − 1".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for (e, &[a, b]) in edges.iter().enumerate() {
            if a >= n || b >= n || a == b {
                return Err(Error::MalformedType(format!("bad edge {e}")));
            }
            adj[a].push(e);
            adj[b].push(e);
        }
        let mut seen_end = vec![false; degree.ends.len()];
        let mut seen_real = vec![false; degree.r];
        let mut seen_cplx = vec![false; degree.s];
        for (v, node) in nodes.iter().enumerate() {
            match node {
                Node::Vertex => {
                    if !(3..=4).contains(&adj[v].len()) {
                        return Err(Error::MalformedType(format!("vertex {v} has valence {}", adj[v].len())));
                    }
                }
                Node::Leaf(l) => {
                    if adj[v].len() != 1 {
                        return Err(Error::MalformedType(format!("leaf {v} has valence {}", adj[v].len())));
                    }
                    let other = other_end(&edges[adj[v][0]], v);
                    if nodes[other] != Node::Vertex {
                        return Err(Error::MalformedType(format!("leaf {v} attached to a leaf")));
                    }
                    let slot = match *l {
                        Leaf::End(i) => seen_end.get_mut(i),
                        Leaf::Real(i) => seen_real.get_mut(i),
                        Leaf::Complex(i) => seen_cplx.get_mut(i),
                    };
                    match slot {
                        Some(s) if !*s => *s = true,
                        _ => return Err(Error::MalformedType(format!("leaf {l:?} missing from degree or repeated"))),
                    }
                }
            }
        }
        if !(seen_end.iter().all(|&x| x) && seen_real.iter().all(|&x| x) && seen_cplx.iter().all(|&x| x)) {
            return Err(Error::MalformedType("not every end and marking is a leaf".into()));
        }
        // connectivity
        let mut stack = vec![0];
        let mut visited = vec![false; n];
        visited[0] = true;
        while let Some(v) = stack.pop() {
            for &e in &adj[v] {
                let w = other_end(&edges[e], v);
                if !visited[w] {
                    visited[w] = true;
                    stack.push(w);
                }
            }
        }
        if visited.iter().any(|&x| !x) {
            return Err(Error::MalformedType("not connected".into()));
        }
        let mut t = CombType {
            degree,
            nodes,
            edges,
            adj,
            double_end_pairs: Vec::new(),
            dirs: None,
            heads: None,
            tags: None,
        };
        t.double_end_pairs = t.find_double_end_pairs();
        Ok(t)
    }

    fn find_double_end_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for v in 0..self.nodes.len() {
            if self.nodes[v] != Node::Vertex || self.adj[v].len() != 4 {
                continue;
            }
            let free: Vec<usize> = self
                .neighbors(v)
                .filter(|&w| matches!(self.nodes[w], Node::Leaf(Leaf::End(i)) if !self.degree.ends[i].fixed && !self.degree.ends[i].dir.is_even()))
                .collect();
            for i in 0..free.len() {
                for j in i + 1..free.len() {
                    if self.end_dir(free[i]) == self.end_dir(free[j]) {
                        pairs.push((free[i], free[j]));
                    }
                }
            }
        }
        pairs
    }

    pub fn degree(&self) -> &Degree {
        &self.degree
    }

    pub fn degree_arc(&self) -> &Arc<Degree> {
        &self.degree
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(move |&e| other_end(&self.edges[e], v))
    }

    pub fn double_end_pairs(&self) -> &[(usize, usize)] {
        &self.double_end_pairs
    }

    fn end_dir(&self, leaf_node: usize) -> LatticeVec {
        match self.nodes[leaf_node] {
            Node::Leaf(Leaf::End(i)) => self.degree.ends[i].dir,
            _ => LatticeVec::ZERO,
        }
    }

    pub fn is_bounded(&self, e: usize) -> bool {
        let [a, b] = self.edges[e];
        self.nodes[a] == Node::Vertex && self.nodes[b] == Node::Vertex
    }

    pub fn bounded_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.is_bounded(e)).collect()
    }

    pub fn is_marking_edge(&self, e: usize) -> bool {
        self.edges[e].iter().any(|&v| matches!(self.nodes[v], Node::Leaf(Leaf::Real(_) | Leaf::Complex(_))))
    }

    /// Marking leaf attached at vertex `v`, if any.
    pub fn marking_at(&self, v: usize) -> Option<Leaf> {
        self.neighbors(v).find_map(|w| match self.nodes[w] {
            Node::Leaf(l @ (Leaf::Real(_) | Leaf::Complex(_))) => Some(l),
            _ => None,
        })
    }

    pub fn is_marked_vertex(&self, v: usize) -> bool {
        self.nodes[v] == Node::Vertex && self.marking_at(v).is_some()
    }

    /// Vertex a leaf is attached to.
    pub fn attachment(&self, leaf_node: usize) -> usize {
        other_end(&self.edges[self.adj[leaf_node][0]], leaf_node)
    }

    pub fn leaf_node(&self, leaf: Leaf) -> Option<usize> {
        self.nodes.iter().position(|n| *n == Node::Leaf(leaf))
    }

    pub fn dirs(&self) -> Option<&[LatticeVec]> {
        self.dirs.as_deref()
    }

    /// Direction of edge `e` measured away from its endpoint `v`.
    pub fn dir_from(&self, e: usize, v: usize) -> LatticeVec {
        let d = self.dirs.as_ref().expect("directions not derived")[e];
        if self.edges[e][0] == v {
            d
        } else {
            -d
        }
    }

    pub fn heads(&self) -> Option<&[Option<usize>]> {
        self.heads.as_deref()
    }

    /// Edge `e` points away from `v`.
    pub fn is_outgoing(&self, e: usize, v: usize) -> bool {
        let h = self.heads.as_ref().expect("orientation not computed")[e];
        h.is_some() && h != Some(v)
    }

    pub fn tags(&self) -> Option<&[VertexTag]> {
        self.tags.as_deref()
    }

    pub fn n_real(&self) -> usize {
        self.degree.r
    }

    pub fn n_complex(&self) -> usize {
        self.degree.s
    }

    /// Canonical string of the type up to relabeling of free ends with the
    /// same direction. Markings and fixed ends keep their labels.
    pub fn canonical_encoding(&self) -> String {
        let centers = self.centroids();
        centers
            .into_iter()
            .map(|c| self.encode_from(c, usize::MAX))
            .min()
            .unwrap_or_default()
    }

    fn encode_from(&self, v: usize, parent: usize) -> String {
        match self.nodes[v] {
            Node::Leaf(Leaf::End(i)) => {
                let e = &self.degree.ends[i];
                if e.fixed {
                    format!("F{}{}", i, e.dir)
                } else {
                    format!("E{}", e.dir)
                }
            }
            Node::Leaf(Leaf::Real(i)) => format!("R{i}"),
            Node::Leaf(Leaf::Complex(i)) => format!("C{i}"),
            Node::Vertex => {
                let mut kids: Vec<String> = self
                    .neighbors(v)
                    .filter(|&w| w != parent)
                    .map(|w| self.encode_from(w, v))
                    .collect();
                kids.sort();
                format!("V({})", kids.join(","))
            }
        }
    }

    fn centroids(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut parent = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![0];
        let mut seen = vec![false; n];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for w in self.neighbors(v).collect::<Vec<_>>() {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    stack.push(w);
                }
            }
        }
        let mut size = vec![1usize; n];
        for &v in order.iter().rev() {
            if parent[v] != usize::MAX {
                size[parent[v]] += size[v];
            }
        }
        let mut best = usize::MAX;
        let mut out = Vec::new();
        for v in 0..n {
            let mut worst = n - size[v];
            for w in self.neighbors(v) {
                if parent[w] == v {
                    worst = worst.max(size[w]);
                }
            }
            match worst.cmp(&best) {
                std::cmp::Ordering::Less => {
                    best = worst;
                    out = vec![v];
                }
                std::cmp::Ordering::Equal => out.push(v),
                _ => {}
            }
        }
        out
    }
}

fn other_end(e: &[usize; 2], v: usize) -> usize {
    if e[0] == v {
        e[1]
    } else {
        e[0]
    }
}

/// Fill in edge directions from the leaves by balancing.
pub fn derive_directions(mut t: CombType) -> Result<CombType, Error> {
    let n = t.nodes.len();
    let mut parent_edge = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![0];
    let mut seen = vec![false; n];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &e in &t.adj[v] {
            let w = other_end(&t.edges[e], v);
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = e;
                stack.push(w);
            }
        }
    }
    // subtree sums of end directions
    let mut sub = vec![LatticeVec::ZERO; n];
    for &v in order.iter().rev() {
        if let Node::Leaf(Leaf::End(i)) = t.nodes[v] {
            sub[v] = sub[v] + t.degree.ends[i].dir;
        }
        if parent_edge[v] != usize::MAX {
            let p = other_end(&t.edges[parent_edge[v]], v);
            sub[p] = sub[p] + sub[v];
        }
    }
    if !sub[0].is_zero() {
        return Err(Error::MalformedType("end directions do not balance".into()));
    }
    let mut dirs = vec![LatticeVec::ZERO; t.edges.len()];
    for v in 0..n {
        let e = parent_edge[v];
        if e == usize::MAX {
            continue;
        }
        // sub[v] is the direction from the parent towards v
        dirs[e] = if t.edges[e][1] == v { sub[v] } else { -sub[v] };
    }
    for e in 0..t.edges.len() {
        if t.is_bounded(e) && dirs[e].is_zero() {
            return Err(Error::ContractedBoundedEdge);
        }
    }
    t.dirs = Some(dirs);
    t.heads = None;
    t.tags = None;
    Ok(t)
}

/// Orient every unmarked edge towards the unique free end of its component
/// in the curve cut at the marked vertices. A double-end pair inside one
/// component counts as a single end (they are glued to one even end).
pub fn canonical_orientation(mut t: CombType) -> Result<CombType, Error> {
    if t.dirs.is_none() {
        t = derive_directions(t)?;
    }
    let n = t.nodes.len();
    let removed: Vec<bool> = (0..n)
        .map(|v| match t.nodes[v] {
            Node::Vertex => t.is_marked_vertex(v),
            Node::Leaf(Leaf::Real(_) | Leaf::Complex(_)) => true,
            Node::Leaf(Leaf::End(_)) => false,
        })
        .collect();
    // component id per kept node
    let mut comp = vec![usize::MAX; n];
    let mut n_comp = 0;
    for start in 0..n {
        if removed[start] || comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = n_comp;
        while let Some(v) = stack.pop() {
            for w in t.neighbors(v).collect::<Vec<_>>() {
                if !removed[w] && comp[w] == usize::MAX {
                    comp[w] = n_comp;
                    stack.push(w);
                }
            }
        }
        n_comp += 1;
    }
    for e in 0..t.edges.len() {
        let [a, b] = t.edges[e];
        if removed[a] && removed[b] && !t.is_marking_edge(e) {
            // bounded edge between two marked vertices
            return Err(Error::NoFreeEnd);
        }
    }
    let mut sinks: Vec<Vec<usize>> = vec![Vec::new(); n_comp];
    for v in 0..n {
        if let Node::Leaf(Leaf::End(i)) = t.nodes[v] {
            if !t.degree.ends[i].fixed {
                sinks[comp[v]].push(v);
            }
        }
    }
    for (c, s) in sinks.iter().enumerate() {
        let glued = t
            .double_end_pairs
            .iter()
            .filter(|(a, b)| comp[*a] == c && comp[*b] == c)
            .count();
        match s.len() - glued.min(s.len()) {
            0 => return Err(Error::NoFreeEnd),
            1 => {}
            _ => return Err(Error::AmbiguousOrientation),
        }
    }
    // distance to the sink inside each component
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for s in sinks.iter().flatten() {
        dist[*s] = 0;
        queue.push_back(*s);
    }
    while let Some(v) = queue.pop_front() {
        for w in t.neighbors(v).collect::<Vec<_>>() {
            if !removed[w] && dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut heads = vec![None; t.edges.len()];
    for e in 0..t.edges.len() {
        if t.is_marking_edge(e) {
            continue;
        }
        let [a, b] = t.edges[e];
        heads[e] = Some(if removed[a] {
            b
        } else if removed[b] {
            a
        } else if dist[b] < dist[a] {
            b
        } else {
            a
        });
    }
    t.heads = Some(heads);
    t.tags = None;
    Ok(t)
}

/// Assign a vertex tag to every inner vertex.
pub fn classify_vertices(mut t: CombType) -> Result<CombType, Error> {
    if t.heads.is_none() {
        t = canonical_orientation(t)?;
    }
    let mut tags = Vec::new();
    for v in 0..t.nodes.len() {
        if t.nodes[v] == Node::Vertex {
            tags.push(classify_one(&t, v));
        }
    }
    t.tags = Some(tags);
    Ok(t)
}

fn classify_one(t: &CombType, v: usize) -> VertexTag {
    use TagKind::*;
    let markings: Vec<Leaf> = t
        .neighbors(v)
        .filter_map(|w| match t.nodes[w] {
            Node::Leaf(l @ (Leaf::Real(_) | Leaf::Complex(_))) => Some(l),
            _ => None,
        })
        .collect();
    let unmarked: Vec<usize> = t.adj[v].iter().copied().filter(|&e| !t.is_marking_edge(e)).collect();
    let dirs: Vec<LatticeVec> = unmarked.iter().map(|&e| t.dir_from(e, v)).collect();
    let even: Vec<bool> = dirs.iter().map(|d| d.is_even()).collect();
    let n_even = even.iter().filter(|&&x| x).count();
    let outgoing: Vec<bool> = unmarked.iter().map(|&e| t.is_outgoing(e, v)).collect();
    let n_out = outgoing.iter().filter(|&&x| x).count();
    let tag = |kind, a| VertexTag { node: v, kind, a, dirs: dirs.clone() };
    let pair_det = |i: usize, j: usize| det2(dirs[i], dirs[j]).abs();

    if markings.len() > 1 {
        return tag(Unclassifiable, 0);
    }
    if let Some(m) = markings.first() {
        if n_out != dirs.len() {
            return tag(Unclassifiable, 0);
        }
        return match (m, dirs.len(), n_even) {
            (Leaf::Real(_), 2, 0) => tag(T1, pair_det(0, 1)),
            (Leaf::Complex(_), 3, 0) => tag(T5, marked_det(&dirs)),
            (Leaf::Complex(_), 3, 1) => {
                let odd: Vec<usize> = (0..3).filter(|&i| !even[i]).collect();
                let a = marked_det(&dirs);
                let ends: Vec<Option<usize>> = odd
                    .iter()
                    .map(|&i| {
                        let w = other_end(&t.edges[unmarked[i]], v);
                        match t.nodes[w] {
                            Node::Leaf(Leaf::End(k)) if !t.degree.ends[k].fixed => Some(k),
                            _ => None,
                        }
                    })
                    .collect();
                if ends.iter().all(|e| e.is_some()) && dirs[odd[0]] == dirs[odd[1]] {
                    tag(T6b, a)
                } else {
                    tag(T6a, a)
                }
            }
            (Leaf::Complex(_), 2, 2) => tag(T7, pair_det(0, 1)),
            _ => tag(Unclassifiable, 0),
        };
    }
    match dirs.len() {
        3 => {
            if n_out != 1 {
                return tag(Unclassifiable, 0);
            }
            let a = pair_det(0, 1);
            let out = outgoing.iter().position(|&x| x).unwrap();
            match n_even {
                0 => tag(T2, a),
                1 if !even[out] => tag(T3, a),
                3 => tag(T4, a),
                _ => tag(Unclassifiable, 0),
            }
        }
        4 => {
            let pair = t
                .double_end_pairs
                .iter()
                .find(|(a, b)| t.attachment(*a) == v && t.attachment(*b) == v);
            if pair.is_none() {
                return tag(Unclassifiable, 0);
            }
            let ev: Vec<usize> = (0..4).filter(|&i| even[i]).collect();
            let ins = (0..4).filter(|&i| !outgoing[i]).count();
            if ev.len() == 2 && ins == 2 && ev.iter().all(|&i| !outgoing[i]) {
                tag(T8, pair_det(ev[0], ev[1]))
            } else {
                tag(Unclassifiable, 0)
            }
        }
        _ => tag(Unclassifiable, 0),
    }
}

/// |det| of the directions at a marked 4-valent vertex. Balancing makes
/// all three pairs agree.
fn marked_det(dirs: &[LatticeVec]) -> i64 {
    let a = det2(dirs[0], dirs[1]).abs();
    debug_assert_eq!(a, det2(dirs[1], dirs[2]).abs());
    debug_assert_eq!(a, det2(dirs[0], dirs[2]).abs());
    a
}

pub fn vertex_multiplicity(tag: &VertexTag, convention: Convention) -> GaussRat {
    use TagKind::*;
    let a = tag.a;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let m = match tag.kind {
        T1 | T7 => GaussRat::one(),
        T2 | T6a | T6b => ipow(a - 1),
        T3 | T4 | T5 => ipow(a - 1).scale(&int(a)),
        T8 => GaussRat::from_int(-a),
        Unclassifiable => GaussRat::zero(),
    };
    match (tag.kind, convention) {
        (T6b | T8, Convention::Unlabeled) => m.scale(&half),
        _ => m,
    }
}

/// m_C = Π i^{ω−1} over unmarked ends · Π m_V, which is real.
pub fn curve_multiplicity(t: &CombType, convention: Convention) -> Result<Rational, Error> {
    let tags = t.tags.as_ref().ok_or_else(|| Error::Internal("vertices not classified".into()))?;
    let mut m = GaussRat::one();
    for e in &t.degree.ends {
        m = &m * &ipow(e.dir.weight() - 1);
    }
    for tag in tags {
        if tag.kind == TagKind::Unclassifiable {
            return Err(Error::NotMultiplicative);
        }
        m = &m * &vertex_multiplicity(tag, convention);
    }
    if !m.is_real() {
        return Err(Error::Internal(format!("curve multiplicity {m} is not real")));
    }
    Ok(m.re)
}

/// Mikhalkin multiplicity: Π |det| over unmarked trivalent vertices.
pub fn mikhalkin_multiplicity(t: &CombType) -> Result<Rational, Error> {
    let mut m = Rational::one();
    for v in 0..t.nodes.len() {
        if t.nodes[v] != Node::Vertex || t.is_marked_vertex(v) {
            continue;
        }
        if t.adj[v].len() != 3 {
            return Err(Error::NotMultiplicative);
        }
        let e = &t.adj[v];
        m *= int(det2(t.dir_from(e[0], v), t.dir_from(e[1], v)).abs());
    }
    Ok(m)
}

/// Class of a classified type: all tags admitted by the class.
pub fn is_in_class(t: &CombType, class: CurveClass) -> bool {
    t.tags
        .as_ref()
        .map(|tags| tags.iter().all(|g| class.admits(g.kind)))
        .unwrap_or(false)
}

pub fn tag_counts(t: &CombType) -> HashMap<TagKind, usize> {
    let mut c = HashMap::new();
    for g in t.tags.iter().flatten() {
        *c.entry(g.kind).or_default() += 1;
    }
    c
}

/// 2 + number of bounded edges.
pub fn type_dimension(t: &CombType) -> usize {
    2 + t.bounded_edges().len()
}

/// Components of a subgraph given by an edge mask, over all nodes touched
/// by a masked edge. Returns the component id per node (`usize::MAX` for
/// untouched nodes) and the number of components.
fn subgraph_components(t: &CombType, mask: &[bool]) -> (Vec<usize>, usize) {
    let n = t.nodes.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    let mut touched = vec![false; n];
    for (e, &[a, b]) in t.edges.iter().enumerate() {
        if mask[e] {
            touched[a] = true;
            touched[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let mut ids = HashMap::new();
    let mut comp = vec![usize::MAX; n];
    for v in 0..n {
        if touched[v] {
            let r = find(&mut parent, v);
            let k = ids.len();
            comp[v] = *ids.entry(r).or_insert(k);
        }
    }
    let len = ids.len();
    (comp, len)
}

fn degree_in(t: &CombType, mask: &[bool], v: usize) -> usize {
    t.adj[v].iter().filter(|&&e| mask[e]).count()
}

fn is_free_end_leaf(t: &CombType, v: usize) -> bool {
    matches!(t.nodes[v], Node::Leaf(Leaf::End(i)) if !t.degree.ends[i].fixed)
}

/// Broccoli condition without orientation: complex markings at 4-valent
/// vertices and exactly one stem per component of Γ_even.
pub fn unoriented_broccoli_check(t: &CombType) -> bool {
    let Some(dirs) = t.dirs.as_ref() else { return false };
    for v in 0..t.nodes.len() {
        if let Node::Leaf(Leaf::Complex(_)) = t.nodes[v] {
            if t.adj[t.attachment(v)].len() != 4 {
                return false;
            }
        }
    }
    let mask: Vec<bool> = (0..t.edges.len())
        .map(|e| t.is_marking_edge(e) || dirs[e].is_even())
        .collect();
    let (comp, n_comp) = subgraph_components(t, &mask);
    let mut stems = vec![0usize; n_comp];
    for v in 0..t.nodes.len() {
        if comp[v] == usize::MAX {
            continue;
        }
        let stem = match t.nodes[v] {
            Node::Vertex => degree_in(t, &mask, v) == 1,
            Node::Leaf(_) => is_free_end_leaf(t, v),
        };
        if stem {
            stems[comp[v]] += 1;
        }
    }
    stems.iter().all(|&s| s == 1)
}

/// Welschinger condition without orientation: with double ends glued into
/// Γ_even, every complex marking is 4-valent or not isolated in Γ_even, and
/// every component of Γ_even has exactly one root.
pub fn unoriented_welschinger_check(t: &CombType) -> bool {
    let Some(dirs) = t.dirs.as_ref() else { return false };
    let mut double_edge = vec![false; t.edges.len()];
    for &(a, b) in &t.double_end_pairs {
        double_edge[t.adj[a][0]] = true;
        double_edge[t.adj[b][0]] = true;
    }
    let mask: Vec<bool> = (0..t.edges.len())
        .map(|e| t.is_marking_edge(e) || dirs[e].is_even() || double_edge[e])
        .collect();
    for v in 0..t.nodes.len() {
        if let Node::Leaf(Leaf::Complex(_)) = t.nodes[v] {
            let w = t.attachment(v);
            if t.adj[w].len() != 4 && degree_in(t, &mask, w) < 2 {
                return false;
            }
        }
    }
    let (comp, n_comp) = subgraph_components(t, &mask);
    let mut roots = vec![0usize; n_comp];
    for v in 0..t.nodes.len() {
        if comp[v] == usize::MAX {
            continue;
        }
        let root = match t.nodes[v] {
            Node::Vertex => t.adj[v].iter().any(|&e| !mask[e]),
            Node::Leaf(Leaf::End(i)) => !t.degree.ends[i].fixed && t.degree.ends[i].dir.is_even(),
            Node::Leaf(_) => false,
        };
        if root {
            roots[comp[v]] += 1;
        }
    }
    roots.iter().all(|&r| r == 1)
}

/// Small helper for assembling trees by hand.
#[derive(Default)]
pub struct TreeBuilder {
    pub nodes: Vec<Node>,
    pub edges: Vec<[usize; 2]>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self) -> usize {
        self.nodes.push(Node::Vertex);
        self.nodes.len() - 1
    }

    /// Add a leaf attached to vertex `at`.
    pub fn leaf(&mut self, at: usize, leaf: Leaf) -> usize {
        self.nodes.push(Node::Leaf(leaf));
        let id = self.nodes.len() - 1;
        self.edges.push([at, id]);
        id
    }

    pub fn join(&mut self, a: usize, b: usize) {
        self.edges.push([a, b]);
    }

    pub fn build(self, degree: Arc<Degree>) -> Result<CombType, Error> {
        CombType::new(degree, self.nodes, self.edges)
    }
}

impl fmt::Display for CombType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_encoding())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> LatticeVec {
        LatticeVec::new(x, y)
    }

    fn full(t: CombType) -> CombType {
        classify_vertices(canonical_orientation(derive_directions(t).unwrap()).unwrap()).unwrap()
    }

    /// Line with two real markings on the (−1,0) and (1,1) branches.
    fn line_type() -> CombType {
        let deg = Arc::new(Degree::from_dirs(&[v(-1, 0), v(0, -1), v(1, 1)]).unwrap().with_markings(2, 0));
        let mut b = TreeBuilder::new();
        let c = b.vertex();
        let m1 = b.vertex();
        let m2 = b.vertex();
        b.join(c, m1);
        b.join(c, m2);
        b.leaf(m1, Leaf::End(0));
        b.leaf(m1, Leaf::Real(0));
        b.leaf(c, Leaf::End(1));
        b.leaf(m2, Leaf::End(2));
        b.leaf(m2, Leaf::Real(1));
        b.build(deg).unwrap()
    }

    /// The curve with vertex types (1), (3), (6a) and multiplicity −2.
    pub(crate) fn vertex_example() -> CombType {
        let deg = Arc::new(
            Degree::from_dirs(&[v(-2, 1), v(0, -1), v(1, -1), v(1, 1)]).unwrap().with_markings(1, 1),
        );
        let mut b = TreeBuilder::new();
        let v1 = b.vertex();
        let v2 = b.vertex();
        let v3 = b.vertex();
        b.join(v1, v2);
        b.join(v2, v3);
        b.leaf(v1, Leaf::Real(0));
        b.leaf(v1, Leaf::End(0));
        b.leaf(v2, Leaf::End(1));
        b.leaf(v3, Leaf::Complex(0));
        b.leaf(v3, Leaf::End(2));
        b.leaf(v3, Leaf::End(3));
        b.build(deg).unwrap()
    }

    #[test]
    fn del_pezzo_examples() {
        let p2 = del_pezzo_degree(&Surface::P2 { d: 3 }).unwrap();
        let mut dirs: Vec<_> = p2.ends.iter().map(|e| e.dir).collect();
        dirs.sort();
        let mut want = vec![v(-1, 0); 3];
        want.extend(vec![v(0, -1); 3]);
        want.extend(vec![v(1, 1); 3]);
        want.sort();
        assert_eq!(dirs, want);

        let q = del_pezzo_degree(&Surface::P1xP1 { d1: 1, d2: 2 }).unwrap();
        let mut dirs: Vec<_> = q.ends.iter().map(|e| e.dir).collect();
        dirs.sort();
        let mut want = vec![v(-1, 0), v(-1, 0), v(1, 0), v(1, 0), v(0, -1), v(0, 1)];
        want.sort();
        assert_eq!(dirs, want);

        let t = del_pezzo_degree(&Surface::P2Blown { d: 2, blown: vec![1] }).unwrap();
        let mut dirs: Vec<_> = t.ends.iter().map(|e| e.dir).collect();
        dirs.sort();
        let mut want = vec![v(0, -1), v(1, 0), v(1, 1), v(-1, 0), v(-1, 0)];
        want.sort();
        assert_eq!(dirs, want);

        assert!(del_pezzo_degree(&Surface::P2Blown { d: 2, blown: vec![3] }).is_err());
        assert!(del_pezzo_degree(&Surface::P2 { d: 0 }).is_err());
    }

    #[test]
    fn hexagon_is_balanced() {
        let h = del_pezzo_degree(&Surface::P2Blown { d: 3, blown: vec![1, 1, 1] }).unwrap();
        assert_eq!(h.len(), 6);
    }

    #[test]
    fn group_order_examples() {
        let p2 = del_pezzo_degree(&Surface::P2 { d: 3 }).unwrap();
        assert_eq!(group_order(&p2), BigInt::from(216));
        let rel = Degree::relative(3, &"1".parse().unwrap(), &"2".parse().unwrap()).unwrap();
        assert_eq!(group_order(&rel), BigInt::from(72));
        let distinct = Degree::from_dirs(&[v(-1, 0), v(0, -1), v(1, 1)]).unwrap();
        assert_eq!(group_order(&distinct), BigInt::from(1));
    }

    #[test]
    fn directions_by_balancing() {
        let deg = Arc::new(Degree::from_dirs(&[v(-1, 0), v(0, -1), v(1, 0), v(0, 1)]).unwrap());
        let mut b = TreeBuilder::new();
        let a = b.vertex();
        let c = b.vertex();
        b.join(a, c);
        b.leaf(a, Leaf::End(0));
        b.leaf(a, Leaf::End(1));
        b.leaf(c, Leaf::End(2));
        b.leaf(c, Leaf::End(3));
        let t = derive_directions(b.build(deg).unwrap()).unwrap();
        let e = t.bounded_edges()[0];
        let d = t.dirs().unwrap()[e];
        assert!(d == v(1, 1) || d == v(-1, -1));
        assert_eq!(d.weight(), 1);
    }

    #[test]
    fn even_bounded_edge() {
        let deg = Arc::new(Degree::from_dirs(&[v(0, -1), v(0, -1), v(1, 1), v(-1, 1)]).unwrap());
        let mut b = TreeBuilder::new();
        let a = b.vertex();
        let c = b.vertex();
        b.join(a, c);
        b.leaf(a, Leaf::End(0));
        b.leaf(a, Leaf::End(1));
        b.leaf(c, Leaf::End(2));
        b.leaf(c, Leaf::End(3));
        let t = derive_directions(b.build(deg).unwrap()).unwrap();
        let e = t.bounded_edges()[0];
        assert_eq!(t.dir_from(e, a), v(0, 2));
        assert!(t.dir_from(e, a).is_even());
    }

    #[test]
    fn contracted_edge_rejected() {
        let deg = Arc::new(Degree::from_dirs(&[v(1, 0), v(-1, 0), v(0, 1), v(0, -1)]).unwrap());
        let mut b = TreeBuilder::new();
        let a = b.vertex();
        let c = b.vertex();
        b.join(a, c);
        b.leaf(a, Leaf::End(0));
        b.leaf(a, Leaf::End(1));
        b.leaf(c, Leaf::End(2));
        b.leaf(c, Leaf::End(3));
        assert_eq!(derive_directions(b.build(deg).unwrap()).unwrap_err(), Error::ContractedBoundedEdge);
    }

    #[test]
    fn line_orientation_and_tags() {
        let t = full(line_type());
        let tags = t.tags().unwrap();
        let kinds: Vec<_> = tags.iter().map(|g| g.kind).collect();
        assert_eq!(kinds.iter().filter(|&&k| k == TagKind::T1).count(), 2);
        assert_eq!(kinds.iter().filter(|&&k| k == TagKind::T2).count(), 1);
        assert_eq!(curve_multiplicity(&t, Convention::Unlabeled).unwrap(), int(1));
        assert_eq!(type_dimension(&t), 4);
        // every end leaf edge points outwards
        for (e, &[a, b]) in t.edges().iter().enumerate() {
            for x in [a, b] {
                if let Node::Leaf(Leaf::End(_)) = t.nodes()[x] {
                    assert_eq!(t.heads().unwrap()[e], Some(x));
                }
            }
        }
    }

    #[test]
    fn all_fixed_has_no_free_end() {
        let ends = vec![
            End::fixed(v(-1, 0), int(0)),
            End::fixed(v(0, -1), int(0)),
            End::fixed(v(1, 1), int(0)),
        ];
        let deg = Arc::new(Degree::new(ends, 0, 0).unwrap());
        let mut b = TreeBuilder::new();
        let c = b.vertex();
        for i in 0..3 {
            b.leaf(c, Leaf::End(i));
        }
        let t = derive_directions(b.build(deg).unwrap()).unwrap();
        assert_eq!(canonical_orientation(t).unwrap_err(), Error::NoFreeEnd);
    }

    #[test]
    fn two_free_ends_in_one_component() {
        // conic degree, one marking only: most components hold several ends
        let deg = Arc::new(
            Degree::from_dirs(&[v(-1, 0), v(0, -1), v(1, 1), v(-1, 0), v(0, -1), v(1, 1)])
                .unwrap()
                .with_markings(1, 0),
        );
        let mut b = TreeBuilder::new();
        let a = b.vertex();
        let c = b.vertex();
        let m = b.vertex();
        let d = b.vertex();
        b.join(a, c);
        b.join(c, m);
        b.join(m, d);
        b.leaf(a, Leaf::End(0));
        b.leaf(a, Leaf::End(3));
        b.leaf(c, Leaf::End(1));
        b.leaf(m, Leaf::Real(0));
        let e = b.vertex();
        b.join(d, e);
        b.leaf(d, Leaf::End(2));
        b.leaf(e, Leaf::End(4));
        b.leaf(e, Leaf::End(5));
        let t = derive_directions(b.build(deg).unwrap()).unwrap();
        assert_eq!(canonical_orientation(t).unwrap_err(), Error::AmbiguousOrientation);
    }

    #[test]
    fn vertex_example_multiplicity() {
        let t = full(vertex_example());
        let mut kinds: Vec<_> = t.tags().unwrap().iter().map(|g| (g.kind, g.a)).collect();
        kinds.sort_by_key(|k| format!("{k:?}"));
        assert_eq!(kinds, vec![(TagKind::T1, 0), (TagKind::T3, 2), (TagKind::T6a, 2)]);
        assert_eq!(curve_multiplicity(&t, Convention::Labeled).unwrap(), int(-2));
        assert!(unoriented_broccoli_check(&t));
        assert!(!unoriented_welschinger_check(&t));
        assert!(is_in_class(&t, CurveClass::Broccoli));
        assert!(!is_in_class(&t, CurveClass::Welschinger));
    }

    #[test]
    fn vertex_multiplicity_examples() {
        let tag = |kind, a| VertexTag { node: 0, kind, a, dirs: vec![] };
        assert_eq!(vertex_multiplicity(&tag(TagKind::T1, 0), Convention::Labeled), GaussRat::one());
        assert_eq!(
            vertex_multiplicity(&tag(TagKind::T3, 2), Convention::Labeled),
            GaussRat::new(int(0), int(2))
        );
        assert_eq!(
            vertex_multiplicity(&tag(TagKind::T6b, 0), Convention::Labeled),
            GaussRat::new(int(0), int(-1))
        );
        assert_eq!(
            vertex_multiplicity(&tag(TagKind::T6b, 0), Convention::Unlabeled),
            GaussRat::new(int(0), Rational::new(BigInt::from(-1), BigInt::from(2)))
        );
        assert_eq!(vertex_multiplicity(&tag(TagKind::T8, 4), Convention::Labeled), GaussRat::from_int(-4));
        assert_eq!(vertex_multiplicity(&tag(TagKind::T8, 4), Convention::Unlabeled), GaussRat::from_int(-2));
    }

    #[test]
    fn real_marking_on_even_edges_unclassifiable() {
        let ends = vec![End::free(v(-2, 0)), End::fixed(v(0, -2), int(0)), End::free(v(2, 2))];
        let deg = Arc::new(Degree::new(ends, 1, 0).unwrap());
        let mut b = TreeBuilder::new();
        let c = b.vertex();
        let m = b.vertex();
        b.join(c, m);
        b.leaf(m, Leaf::Real(0));
        b.leaf(m, Leaf::End(0));
        b.leaf(c, Leaf::End(1));
        b.leaf(c, Leaf::End(2));
        let t = full(b.build(deg).unwrap());
        let m_tag = t.tags().unwrap().iter().find(|g| g.node == m).unwrap();
        assert_eq!(m_tag.kind, TagKind::Unclassifiable);
        assert_eq!(curve_multiplicity(&t, Convention::Labeled).unwrap_err(), Error::NotMultiplicative);
    }

    #[test]
    fn t3_example_directions() {
        // unmarked vertex with (−1,−1), (−1,1), (2,0) away from it, even edge incoming
        let deg = Arc::new(Degree::from_dirs(&[v(-1, -1), v(-1, 1), v(2, 0)]).unwrap().with_markings(0, 1));
        // put the complex marking on the (2,0) branch so that edge is incoming
        let mut b = TreeBuilder::new();
        let c = b.vertex();
        let m = b.vertex();
        b.join(c, m);
        b.leaf(c, Leaf::End(0));
        b.leaf(c, Leaf::End(1));
        b.leaf(m, Leaf::End(2));
        b.leaf(m, Leaf::Complex(0));
        let t = derive_directions(b.build(deg).unwrap()).unwrap();
        // the marking cut leaves component {c, ends 0, 1} with two free ends
        assert_eq!(canonical_orientation(t).unwrap_err(), Error::AmbiguousOrientation);
        // with end 0 fixed the same shape is oriented and c becomes T3
        let ends = vec![End::fixed(v(-1, -1), int(0)), End::free(v(-1, 1)), End::free(v(2, 0))];
        let deg = Arc::new(Degree::new(ends, 0, 1).unwrap());
        let mut b = TreeBuilder::new();
        let c = b.vertex();
        let m = b.vertex();
        b.join(c, m);
        b.leaf(c, Leaf::End(0));
        b.leaf(c, Leaf::End(1));
        b.leaf(m, Leaf::End(2));
        b.leaf(m, Leaf::Complex(0));
        let t = full(b.build(deg).unwrap());
        let tag = t.tags().unwrap().iter().find(|g| g.node == c).unwrap();
        assert_eq!(tag.kind, TagKind::T3);
        assert_eq!(tag.a, 2);
    }

    #[test]
    fn encoding_ignores_free_end_labels() {
        let d = [v(0, -1), v(0, -1), v(1, 1), v(-1, 1)];
        let deg = Arc::new(Degree::from_dirs(&d).unwrap());
        let build = |first: usize, second: usize| {
            let mut b = TreeBuilder::new();
            let a = b.vertex();
            let c = b.vertex();
            b.join(a, c);
            b.leaf(a, Leaf::End(first));
            b.leaf(a, Leaf::End(second));
            b.leaf(c, Leaf::End(2));
            b.leaf(c, Leaf::End(3));
            b.build(deg.clone()).unwrap()
        };
        assert_eq!(build(0, 1).canonical_encoding(), build(1, 0).canonical_encoding());
    }

    #[test]
    fn malformed_trees_rejected() {
        let deg = Arc::new(Degree::from_dirs(&[v(-1, 0), v(0, -1), v(1, 1)]).unwrap());
        let mut b = TreeBuilder::new();
        let c = b.vertex();
        b.leaf(c, Leaf::End(0));
        b.leaf(c, Leaf::End(1));
        assert!(b.build(deg.clone()).is_err());
        let mut b = TreeBuilder::new();
        let c = b.vertex();
        b.leaf(c, Leaf::End(0));
        b.leaf(c, Leaf::End(1));
        b.leaf(c, Leaf::End(1));
        assert!(b.build(deg).is_err());
    }
}
