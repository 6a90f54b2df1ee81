//! Weight sequences α, β and the multinomial coefficients of the recursion.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::Error;

/// Finite sequence of non-negative counts indexed by weight 1, 2, 3, …
/// Stored without trailing zeros so that derived equality is canonical.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightSeq(Vec<u32>);

impl WeightSeq {
    pub fn new(mut entries: Vec<u32>) -> Self {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        WeightSeq(entries)
    }

    pub fn zero() -> Self {
        WeightSeq(Vec::new())
    }

    /// The unit sequence e_k.
    pub fn unit(k: usize) -> Self {
        assert!(k >= 1, "weights start at 1");
        let mut v = vec![0; k];
        v[k - 1] = 1;
        WeightSeq(v)
    }

    /// Entry for weight `k` (1-based); zero beyond the stored length.
    pub fn get(&self, k: usize) -> u32 {
        if k == 0 {
            return 0;
        }
        self.0.get(k - 1).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// |a| = Σ a_i
    pub fn size(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    /// Ia = Σ i·a_i
    pub fn weight(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &x)| (i as u64 + 1) * x as u64)
            .sum()
    }

    pub fn add(&self, o: &WeightSeq) -> WeightSeq {
        let n = self.len().max(o.len());
        WeightSeq::new((1..=n).map(|k| self.get(k) + o.get(k)).collect())
    }

    /// Componentwise difference, `None` if some entry would be negative.
    pub fn checked_sub(&self, o: &WeightSeq) -> Option<WeightSeq> {
        let n = self.len().max(o.len());
        let mut out = Vec::with_capacity(n);
        for k in 1..=n {
            out.push(self.get(k).checked_sub(o.get(k))?);
        }
        Some(WeightSeq::new(out))
    }

    /// Componentwise `self ≤ o`.
    pub fn le(&self, o: &WeightSeq) -> bool {
        (1..=self.len()).all(|k| self.get(k) <= o.get(k))
    }
}

impl fmt::Display for WeightSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for WeightSeq {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        if t.is_empty() {
            return Ok(WeightSeq::zero());
        }
        let mut v = Vec::new();
        for part in t.split(',') {
            let n: u32 = part
                .trim()
                .parse()
                .map_err(|_| Error::BadSequence(s.to_string()))?;
            v.push(n);
        }
        Ok(WeightSeq::new(v))
    }
}

pub fn stats(a: &WeightSeq) -> (u64, u64) {
    (a.size(), a.weight())
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// n! / (Π parts_i! · (n − Σ parts)!)
pub fn multinomial(n: i64, parts: &[i64]) -> Result<BigInt, Error> {
    if n < 0 || parts.iter().any(|&p| p < 0) {
        return Err(Error::InvalidMultinomial);
    }
    let total: i64 = parts.iter().sum();
    if total > n {
        return Err(Error::InvalidMultinomial);
    }
    let mut den = factorial((n - total) as u64);
    for &p in parts {
        den *= factorial(p as u64);
    }
    Ok(factorial(n as u64) / den)
}

/// Π_i multinomial(a_i; parts¹_i, …, partsˡ_i)
pub fn seq_multinomial(a: &WeightSeq, parts: &[WeightSeq]) -> Result<BigInt, Error> {
    let n = parts.iter().map(|p| p.len()).max().unwrap_or(0).max(a.len());
    let mut out = BigInt::one();
    for k in 1..=n {
        let ps: Vec<i64> = parts.iter().map(|p| p.get(k) as i64).collect();
        out *= multinomial(a.get(k) as i64, &ps)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMode {
    Exact,
    AtMost,
}

/// Ordered `l`-tuples of sequences summing to `a` (exact) or bounded by
/// `a` componentwise (at most). Lazy, deterministic, duplicate free.
pub fn enumerate_splits(a: &WeightSeq, l: usize, mode: SplitMode) -> Splits {
    let parts = match mode {
        SplitMode::Exact => l,
        SplitMode::AtMost => l + 1,
    };
    let per_weight: Vec<Vec<Vec<u32>>> = a
        .entries()
        .iter()
        .map(|&n| compositions(n, parts))
        .collect();
    let exhausted = per_weight.iter().any(|c| c.is_empty())
        || (parts == 0 && !a.is_zero());
    Splits {
        l,
        idx: vec![0; per_weight.len()],
        per_weight,
        done: exhausted,
    }
}

/// Weak compositions of `n` into `parts` ordered parts.
fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub struct Splits {
    l: usize,
    per_weight: Vec<Vec<Vec<u32>>>,
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for Splits {
    type Item = Vec<WeightSeq>;

    fn next(&mut self) -> Option<Vec<WeightSeq>> {
        if self.done {
            return None;
        }
        let item = (0..self.l)
            .map(|j| {
                WeightSeq::new(
                    self.per_weight
                        .iter()
                        .zip(&self.idx)
                        .map(|(c, &i)| c[i][j])
                        .collect(),
                )
            })
            .collect();
        // odometer step
        let mut pos = 0;
        loop {
            if pos == self.idx.len() {
                self.done = true;
                break;
            }
            self.idx[pos] += 1;
            if self.idx[pos] < self.per_weight[pos].len() {
                break;
            }
            self.idx[pos] = 0;
            pos += 1;
        }
        Some(item)
    }
}
