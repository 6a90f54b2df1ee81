//! Caporaso–Harris type recursion for relative broccoli invariants
//! N^d(α, β, s) of the plane.

use std::collections::HashMap;
use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::lattice::{fmt_rat, parse_rat, Rational};
use crate::seq::{enumerate_splits, multinomial, seq_multinomial, SplitMode, WeightSeq};

pub const CACHE_HEADER: &str = "tropicount-ch-cache v1";
pub const CACHE_FILE: &str = "ch-memo-v1.txt";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InvariantKey {
    pub d: u32,
    pub alpha: WeightSeq,
    pub beta: WeightSeq,
    pub s: u32,
}

impl InvariantKey {
    pub fn new(d: u32, alpha: WeightSeq, beta: WeightSeq, s: u32) -> Result<Self, Error> {
        let key = InvariantKey { d, alpha, beta, s };
        if d == 0 {
            return Err(Error::InvalidKey(format!("{key}: d must be positive")));
        }
        if key.alpha.weight() + key.beta.weight() != d as u64 {
            return Err(Error::InvalidKey(format!("{key}: Iα + Iβ ≠ d")));
        }
        if key.r() < 0 {
            return Err(Error::InvalidKey(format!("{key}: negative number of real points")));
        }
        Ok(key)
    }

    /// Number of real points r = 2d + |β| − 2s − 1.
    pub fn r(&self) -> i64 {
        r_of(self.d as i64, &self.beta, self.s as i64)
    }

    fn unchecked(d: u32, alpha: WeightSeq, beta: WeightSeq, s: u32) -> Self {
        InvariantKey { d, alpha, beta, s }
    }
}

impl fmt::Display for InvariantKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N^{}(({}),({}),{})", self.d, self.alpha, self.beta, self.s)
    }
}

fn r_of(d: i64, beta: &WeightSeq, s: i64) -> i64 {
    2 * d + beta.size() as i64 - 2 * s - 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    A,
    B,
    C,
    D,
    E,
    F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Formula {
    /// Move a real point to the left.
    RealLeft,
    /// Move a complex point to the left.
    ComplexLeft,
}

/// Bound variables of one component curve C_j in a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentTrace {
    pub alpha: WeightSeq,
    pub beta: WeightSeq,
    pub d: u32,
    pub s: u32,
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermTrace {
    pub case: Case,
    /// k for (A) and (E); (k₁, k₂) for (B) and (C).
    pub k: Vec<u32>,
    pub l: usize,
    pub components: Vec<ComponentTrace>,
    /// α′ for the floor cases.
    pub alpha_rest: Option<WeightSeq>,
    pub coefficient: Rational,
    pub children: Vec<InvariantKey>,
}

/// Memoizing evaluator. Lookups and inserts go through a lock; inserting
/// the same key twice stores the same value, so interleaving is harmless.
#[derive(Default)]
pub struct ChEngine {
    memo: RwLock<HashMap<InvariantKey, Rational>>,
}

impl ChEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn invariant(&self, key: &InvariantKey) -> Rational {
        if let Some(v) = self.memo.read().unwrap().get(key) {
            return v.clone();
        }
        let v = self.evaluate(key, policy(key));
        self.memo.write().unwrap().insert(key.clone(), v.clone());
        v
    }

    /// Evaluate `key` with the given formula at the top level; children use
    /// the default policy. Not memoized.
    pub fn invariant_with(&self, key: &InvariantKey, formula: Formula) -> Result<Rational, Error> {
        check_formula(key, formula)?;
        Ok(self.evaluate(key, formula))
    }

    fn evaluate(&self, key: &InvariantKey, formula: Formula) -> Rational {
        let mut total = Rational::zero();
        for t in terms(key, formula) {
            let mut v = t.coefficient.clone();
            for c in &t.children {
                if v.is_zero() {
                    break;
                }
                v *= self.invariant(c);
            }
            total += v;
        }
        total
    }

    pub fn memo_keys(&self) -> Vec<InvariantKey> {
        let mut k: Vec<_> = self.memo.read().unwrap().keys().cloned().collect();
        k.sort();
        k
    }

    pub fn memo_len(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    /// Load records from a cache file. A missing file or a header from a
    /// different version leaves the memo untouched.
    pub fn load_cache(&self, path: &Path) -> Result<usize, Error> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        let mut lines = text.lines();
        if lines.next() != Some(CACHE_HEADER) {
            return Ok(0);
        }
        let mut loaded = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split(';').collect();
            if f.len() != 5 {
                return Err(Error::Io(format!("bad cache record {line:?}")));
            }
            let d: u32 = f[0].parse().map_err(|_| Error::Io(format!("bad cache record {line:?}")))?;
            let s: u32 = f[3].parse().map_err(|_| Error::Io(format!("bad cache record {line:?}")))?;
            let key = InvariantKey::new(d, f[1].parse()?, f[2].parse()?, s)?;
            loaded.push((key, parse_rat(f[4])?));
        }
        let n = loaded.len();
        self.memo.write().unwrap().extend(loaded);
        Ok(n)
    }

    /// Write all memo records atomically (temp file, then rename).
    pub fn save_cache(&self, path: &Path) -> Result<(), Error> {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        std::fs::create_dir_all(dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        writeln!(tmp, "{CACHE_HEADER}")?;
        let memo = self.memo.read().unwrap();
        let mut keys: Vec<_> = memo.keys().collect();
        keys.sort();
        for k in keys {
            writeln!(tmp, "{};{};{};{};{}", k.d, k.alpha, k.beta, k.s, fmt_rat(&memo[k]))?;
        }
        tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
        Ok(())
    }
}

/// Cache file location from `TROPICOUNT_CACHE`, if set.
pub fn cache_path_from_env() -> Option<PathBuf> {
    std::env::var_os("TROPICOUNT_CACHE")
        .filter(|v| !v.is_empty())
        .map(|dir| PathBuf::from(dir).join(CACHE_FILE))
}

pub fn global() -> &'static ChEngine {
    static ENGINE: OnceLock<ChEngine> = OnceLock::new();
    ENGINE.get_or_init(ChEngine::new)
}

pub fn ch_invariant(key: &InvariantKey) -> Result<Rational, Error> {
    InvariantKey::new(key.d, key.alpha.clone(), key.beta.clone(), key.s)?;
    Ok(global().invariant(key))
}

pub fn ch_terms(key: &InvariantKey) -> Result<Vec<TermTrace>, Error> {
    InvariantKey::new(key.d, key.alpha.clone(), key.beta.clone(), key.s)?;
    Ok(terms(key, policy(key)))
}

pub fn ch_terms_with(key: &InvariantKey, formula: Formula) -> Result<Vec<TermTrace>, Error> {
    InvariantKey::new(key.d, key.alpha.clone(), key.beta.clone(), key.s)?;
    check_formula(key, formula)?;
    Ok(terms(key, formula))
}

fn check_formula(key: &InvariantKey, formula: Formula) -> Result<(), Error> {
    match formula {
        Formula::RealLeft if key.r() <= 0 => Err(Error::InvalidKey(format!("{key}: no real point to move"))),
        Formula::ComplexLeft if key.s == 0 => Err(Error::InvalidKey(format!("{key}: no complex point to move"))),
        _ => Ok(()),
    }
}

pub fn policy(key: &InvariantKey) -> Formula {
    if key.r() > 0 {
        Formula::RealLeft
    } else {
        Formula::ComplexLeft
    }
}

fn rat(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

fn terms(key: &InvariantKey, formula: Formula) -> Vec<TermTrace> {
    let mut out = Vec::new();
    match formula {
        Formula::RealLeft => {
            terms_a(key, &mut out);
            floor_terms(key, Case::D, &mut out);
        }
        Formula::ComplexLeft => {
            terms_b(key, &mut out);
            terms_c(key, &mut out);
            floor_terms(key, Case::E, &mut out);
            floor_terms(key, Case::F, &mut out);
        }
    }
    out
}

fn terms_a(key: &InvariantKey, out: &mut Vec<TermTrace>) {
    for k in (1..=key.beta.len()).step_by(2) {
        if key.beta.get(k) == 0 {
            continue;
        }
        let child = InvariantKey::unchecked(
            key.d,
            key.alpha.add(&WeightSeq::unit(k)),
            key.beta.checked_sub(&WeightSeq::unit(k)).unwrap(),
            key.s,
        );
        out.push(TermTrace {
            case: Case::A,
            k: vec![k as u32],
            l: 0,
            components: vec![],
            alpha_rest: None,
            coefficient: Rational::one(),
            children: vec![child],
        });
    }
}

fn terms_b(key: &InvariantKey, out: &mut Vec<TermTrace>) {
    let d = key.d as usize;
    for k1 in 1..=d {
        for k2 in 1..=d {
            if k1 % 2 == 0 && k2 % 2 == 0 {
                continue;
            }
            let Some(b) = key
                .beta
                .checked_sub(&WeightSeq::unit(k1))
                .and_then(|b| b.checked_sub(&WeightSeq::unit(k2)))
            else {
                continue;
            };
            let child = InvariantKey::unchecked(
                key.d,
                key.alpha.add(&WeightSeq::unit(k1 + k2)),
                b,
                key.s - 1,
            );
            out.push(TermTrace {
                case: Case::B,
                k: vec![k1 as u32, k2 as u32],
                l: 0,
                components: vec![],
                alpha_rest: None,
                coefficient: Rational::new(BigInt::from(-1), BigInt::from(2)),
                children: vec![child],
            });
        }
    }
}

fn terms_c(key: &InvariantKey, out: &mut Vec<TermTrace>) {
    let d = key.d as usize;
    let r = key.r();
    let s = key.s as i64;
    for k1 in 1..=d {
        for k2 in 1..=d {
            if k1 % 2 == 0 && k2 % 2 == 0 {
                continue;
            }
            let Some(rest) = key.beta.checked_sub(&WeightSeq::unit(k1 + k2)) else {
                continue;
            };
            for asp in enumerate_splits(&key.alpha, 2, SplitMode::Exact) {
                for bsp in enumerate_splits(&rest, 2, SplitMode::Exact) {
                    let d1 = asp[0].weight() + k1 as u64 + bsp[0].weight();
                    let d2 = asp[1].weight() + k2 as u64 + bsp[1].weight();
                    if d1 + d2 != key.d as u64 {
                        continue;
                    }
                    for s1 in 0..s {
                        let s2 = s - 1 - s1;
                        let r1 = r_of(d1 as i64, &bsp[0], s1);
                        let r2 = r_of(d2 as i64, &bsp[1], s2);
                        if r1 < 0 || r2 < 0 {
                            continue;
                        }
                        assert_eq!(r1 + r2, r, "r bookkeeping in (C)");
                        let coef = rat(multinomial(s - 1, &[s1, s2]).unwrap())
                            * rat(multinomial(r, &[r1, r2]).unwrap())
                            * rat(seq_multinomial(&key.alpha, &asp).unwrap())
                            / rat(2);
                        let comps = vec![
                            ComponentTrace { alpha: asp[0].clone(), beta: bsp[0].clone(), d: d1 as u32, s: s1 as u32, k: k1 as u32 },
                            ComponentTrace { alpha: asp[1].clone(), beta: bsp[1].clone(), d: d2 as u32, s: s2 as u32, k: k2 as u32 },
                        ];
                        let children = comps
                            .iter()
                            .map(|c| {
                                InvariantKey::unchecked(c.d, c.alpha.add(&WeightSeq::unit(c.k as usize)), c.beta.clone(), c.s)
                            })
                            .collect();
                        out.push(TermTrace {
                            case: Case::C,
                            k: vec![k1 as u32, k2 as u32],
                            l: 2,
                            components: comps,
                            alpha_rest: None,
                            coefficient: coef,
                            children,
                        });
                    }
                }
            }
        }
    }
}

/// Ordered weak compositions of `n` into `l` parts.
fn compositions(n: i64, l: usize) -> Vec<Vec<i64>> {
    if l == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, l - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All ordered tuples (k_1, …, k_l) with 1 ≤ k_j ≤ max.
fn k_tuples(l: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..l {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=max).map(move |k| {
                    let mut t = t.clone();
                    t.push(k);
                    t
                })
            })
            .collect();
    }
    out
}

/// Cases (D), (E), (F): the floor C_0 through the moved point together
/// with components C_1, …, C_l attached on its right.
fn floor_terms(key: &InvariantKey, case: Case, out: &mut Vec<TermTrace>) {
    let d = key.d;
    let r = key.r();
    let (s_avail, r_total) = match case {
        Case::D => (key.s as i64, r - 1),
        _ => (key.s as i64 - 1, r),
    };
    if s_avail < 0 {
        return;
    }
    let top_ks: Vec<Option<usize>> = match case {
        Case::E => (1..=key.beta.len()).filter(|&k| key.beta.get(k) >= 1).map(Some).collect(),
        _ => vec![None],
    };
    let l_min = if case == Case::F { 1 } else { 0 };
    for l in l_min..(d as usize) {
        for &k_top in &top_ks {
            let beta_target = match k_top {
                Some(k) => key.beta.checked_sub(&WeightSeq::unit(k)).unwrap(),
                None => key.beta.clone(),
            };
            for asp in enumerate_splits(&key.alpha, l, SplitMode::AtMost) {
                let mut alpha_rest = key.alpha.clone();
                for a in &asp {
                    alpha_rest = alpha_rest.checked_sub(a).unwrap();
                }
                // Σαʲ < α: in (D) and (F) balancing of the floor already forces
                // α′ ≠ 0; in (E) the floor may have no fixed left end at all.
                if case != Case::E && alpha_rest.is_zero() {
                    continue;
                }
                for gsp in enumerate_splits(&beta_target, l, SplitMode::Exact) {
                    for ks in k_tuples(l, d) {
                        let mut comps = Vec::with_capacity(l);
                        let mut dsum = 0u64;
                        for j in 0..l {
                            let (beta_j, dj) = if case == Case::F && j == 0 {
                                (gsp[0].clone(), asp[0].weight() + ks[0] as u64 + gsp[0].weight())
                            } else {
                                let b = gsp[j].add(&WeightSeq::unit(ks[j] as usize));
                                let w = asp[j].weight() + b.weight();
                                (b, w)
                            };
                            dsum += dj;
                            comps.push(ComponentTrace { alpha: asp[j].clone(), beta: beta_j, d: dj as u32, s: 0, k: ks[j] });
                        }
                        if dsum != (d - 1) as u64 || comps.iter().any(|c| c.d == 0) {
                            continue;
                        }
                        for ss in compositions(s_avail, l) {
                            let mut rs = Vec::with_capacity(l);
                            for (c, &sj) in comps.iter_mut().zip(&ss) {
                                c.s = sj as u32;
                                rs.push(r_of(c.d as i64, &c.beta, sj));
                            }
                            if rs.iter().any(|&x| x < 0) {
                                continue;
                            }
                            assert_eq!(rs.iter().sum::<i64>(), r_total, "r bookkeeping in floor case");
                            let mut coef = rat(multinomial(s_avail, &ss).unwrap())
                                * rat(multinomial(r_total, &rs).unwrap())
                                * rat(seq_multinomial(&key.alpha, &asp).unwrap());
                            let l_fact = if case == Case::F { l - 1 } else { l };
                            coef /= rat(crate::seq::factorial(l_fact as u64));
                            for m in (2..=alpha_rest.len()).step_by(2) {
                                coef *= rat(BigInt::from(-(m as i64)).pow(alpha_rest.get(m)));
                            }
                            if let Some(k) = k_top {
                                coef *= rat(if k % 2 == 1 { k as i64 } else { -1 });
                            }
                            for (j, c) in comps.iter().enumerate() {
                                if case == Case::F && j == 0 {
                                    coef *= rat(if c.k % 2 == 1 { c.k as i64 } else { 1 });
                                } else {
                                    if c.k % 2 == 0 {
                                        coef *= rat(c.k as i64);
                                    }
                                    coef *= rat(c.beta.get(c.k as usize) as i64);
                                }
                            }
                            if coef.is_zero() {
                                continue;
                            }
                            let children = comps
                                .iter()
                                .enumerate()
                                .map(|(j, c)| {
                                    let a = if case == Case::F && j == 0 {
                                        c.alpha.add(&WeightSeq::unit(c.k as usize))
                                    } else {
                                        c.alpha.clone()
                                    };
                                    InvariantKey::unchecked(c.d, a, c.beta.clone(), c.s)
                                })
                                .collect();
                            out.push(TermTrace {
                                case,
                                k: k_top.map(|k| vec![k as u32]).unwrap_or_default(),
                                l,
                                components: comps.clone(),
                                alpha_rest: Some(alpha_rest.clone()),
                                coefficient: coef,
                                children,
                            });
                        }
                    }
                }
            }
        }
    }
}

/// Sequences with Iα = n.
pub fn sequences_of_weight(n: u32) -> Vec<WeightSeq> {
    fn rec(i: u32, n: u32, rem: u32, cur: &mut Vec<u32>, out: &mut Vec<WeightSeq>) {
        if i > n {
            if rem == 0 {
                out.push(WeightSeq::new(cur.clone()));
            }
            return;
        }
        for c in 0..=rem / i {
            cur.push(c);
            rec(i + 1, n, rem - c * i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, n, &mut Vec::new(), &mut out);
    out
}

fn max_weight(a: &WeightSeq) -> usize {
    a.len()
}

/// All (α, β) with Iα + Iβ = d, in the row order of the printed tables:
/// larger top weight of α first, then fewer fixed ends, then the same two
/// rules for β. Rows with α = 0 therefore come last.
pub fn table_rows(d: u32) -> Vec<(WeightSeq, WeightSeq)> {
    let mut rows = Vec::new();
    for ia in 0..=d {
        for a in sequences_of_weight(ia) {
            for b in sequences_of_weight(d - ia) {
                rows.push((a.clone(), b));
            }
        }
    }
    rows.sort_by(|(a1, b1), (a2, b2)| {
        max_weight(a2)
            .cmp(&max_weight(a1))
            .then(a1.size().cmp(&a2.size()))
            .then(max_weight(b2).cmp(&max_weight(b1)))
            .then(b1.size().cmp(&b2.size()))
            .then(a1.entries().cmp(a2.entries()))
            .then(b1.entries().cmp(b2.entries()))
    });
    rows
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub alpha: WeightSeq,
    pub beta: WeightSeq,
    /// Entry s is N^d(α, β, s); the row stops where r would become negative.
    pub values: Vec<Rational>,
}

impl TableRow {
    pub fn label(&self) -> String {
        format!("({}),({})", self.alpha, self.beta)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeTable {
    pub d: u32,
    pub rows: Vec<TableRow>,
}

impl DegreeTable {
    pub fn columns(&self) -> usize {
        self.rows.iter().map(|r| r.values.len()).max().unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let n = self.columns();
        let mut out = String::from("alpha_beta");
        for s in 0..n {
            out.push_str(&format!(",s={s}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("\"{}\"", row.label()));
            for s in 0..n {
                out.push(',');
                if let Some(v) = row.values.get(s) {
                    out.push_str(&fmt_rat(v));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let n = self.columns();
        let label_w = self.rows.iter().map(|r| r.label().len()).max().unwrap_or(0).max(7);
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| (0..n).map(|s| r.values.get(s).map(fmt_rat).unwrap_or_default()).collect())
            .collect();
        let cell_w = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(1).max(3);
        let mut out = format!("{:<label_w$}", "α,β");
        for s in 0..n {
            out.push_str(&format!(" {:>cell_w$}", format!("s={s}")));
        }
        out.push('\n');
        for (row, cs) in self.rows.iter().zip(cells) {
            out.push_str(&format!("{:<label_w$}", row.label()));
            for c in cs {
                out.push_str(&format!(" {c:>cell_w$}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn degree_table(d: u32) -> Result<DegreeTable, Error> {
    degree_table_with(global(), d)
}

pub fn degree_table_with(engine: &ChEngine, d: u32) -> Result<DegreeTable, Error> {
    if d == 0 {
        return Err(Error::InvalidKey("degree must be positive".into()));
    }
    let mut rows = Vec::new();
    for (alpha, beta) in table_rows(d) {
        let mut values = Vec::new();
        let mut s = 0;
        while r_of(d as i64, &beta, s as i64) >= 0 {
            let key = InvariantKey::unchecked(d, alpha.clone(), beta.clone(), s);
            values.push(engine.invariant(&key));
            s += 1;
        }
        rows.push(TableRow { alpha, beta, values });
    }
    Ok(DegreeTable { d, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(d: u32, a: &str, b: &str, s: u32) -> InvariantKey {
        InvariantKey::new(d, a.parse().unwrap(), b.parse().unwrap(), s).unwrap()
    }

    fn val(k: &InvariantKey) -> Rational {
        ChEngine::new().invariant(k)
    }

    #[test]
    fn invariant_examples() {
        assert_eq!(val(&key(3, "0", "3", 0)), rat(8));
        assert_eq!(val(&key(3, "0,0,1", "0", 2)), rat(-1));
        assert_eq!(val(&key(2, "0,1", "0", 0)), rat(-2));
        assert_eq!(val(&key(1, "0", "1", 1)), rat(1));
    }

    #[test]
    fn invalid_keys() {
        assert!(InvariantKey::new(2, "1".parse().unwrap(), "0".parse().unwrap(), 0).is_err());
        assert!(InvariantKey::new(1, "0".parse().unwrap(), "1".parse().unwrap(), 2).is_err());
        assert!(InvariantKey::new(0, WeightSeq::zero(), WeightSeq::zero(), 0).is_err());
    }

    #[test]
    fn terms_d_single() {
        let t = ch_terms(&key(2, "2", "0", 0)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].case, Case::D);
        assert_eq!(t[0].l, 1);
        assert_eq!(t[0].components[0].k, 1);
        assert_eq!(t[0].children, vec![key(1, "0", "1", 0)]);
        assert_eq!(t[0].coefficient, rat(1));
    }

    #[test]
    fn terms_b_single() {
        let t = ch_terms_with(&key(2, "0", "2", 1), Formula::ComplexLeft).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].case, Case::B);
        assert_eq!(t[0].k, vec![1, 1]);
        assert_eq!(t[0].coefficient, Rational::new(BigInt::from(-1), BigInt::from(2)));
        assert_eq!(t[0].children, vec![key(2, "0,1", "0", 0)]);
        assert_eq!(val(&key(2, "0", "2", 1)), rat(1));
        // r > 0, so the default policy moves a real point instead
        let t = ch_terms(&key(2, "0", "2", 1)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].case, Case::A);
        assert_eq!(t[0].children, vec![key(2, "1", "1", 1)]);
    }

    #[test]
    fn terms_d_empty_floor() {
        let t = ch_terms(&key(1, "1", "0", 0)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].case, Case::D);
        assert_eq!(t[0].l, 0);
        assert_eq!(t[0].alpha_rest, Some("1".parse().unwrap()));
        assert_eq!(t[0].coefficient, rat(1));
    }

    #[test]
    fn terms_e_empty_floor() {
        let t = ch_terms(&key(1, "0", "1", 1)).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].case, Case::E);
        assert_eq!(t[0].l, 0);
    }

    #[test]
    fn row_order_degree_one() {
        let rows = table_rows(1);
        assert_eq!(rows[0], ("1".parse().unwrap(), WeightSeq::zero()));
        assert_eq!(rows[1], (WeightSeq::zero(), "1".parse().unwrap()));
        let t = degree_table_with(&ChEngine::new(), 1).unwrap();
        assert_eq!(t.rows[0].values, vec![rat(1)]);
        assert_eq!(t.rows[1].values, vec![rat(1), rat(1)]);
    }

    #[test]
    fn cache_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(CACHE_FILE);
        let e = ChEngine::new();
        e.invariant(&key(2, "0", "2", 1));
        e.save_cache(&path).unwrap();
        let f = ChEngine::new();
        assert_eq!(f.load_cache(&path).unwrap(), e.memo_len());
        assert_eq!(f.memo_keys(), e.memo_keys());
        std::fs::write(&path, "tropicount-ch-cache v0\n1;0;1;0;5\n").unwrap();
        let g = ChEngine::new();
        assert_eq!(g.load_cache(&path).unwrap(), 0);
    }
}
