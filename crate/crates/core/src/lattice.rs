//! Lattice vectors, exact rationals and Gaussian rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exact rational in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Integer vector in the plane. Edge directions, end directions and
/// contracted markings (the zero vector) all use this type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatticeVec {
    pub x: i64,
    pub y: i64,
}

impl LatticeVec {
    pub const ZERO: LatticeVec = LatticeVec { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        LatticeVec { x, y }
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// Both coordinates even. The zero vector counts as even.
    pub fn is_even(self) -> bool {
        self.x % 2 == 0 && self.y % 2 == 0
    }

    pub fn weight(self) -> i64 {
        self.x.abs().gcd(&self.y.abs())
    }

    /// `self / weight`, or an error for the zero vector.
    pub fn primitive(self) -> Result<LatticeVec, Error> {
        if self.is_zero() {
            return Err(Error::InvalidDirection);
        }
        let g = self.weight();
        Ok(LatticeVec::new(self.x / g, self.y / g))
    }

    pub fn scale(self, k: i64) -> LatticeVec {
        LatticeVec::new(self.x * k, self.y * k)
    }
}

impl Add for LatticeVec {
    type Output = LatticeVec;
    fn add(self, o: LatticeVec) -> LatticeVec {
        LatticeVec::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for LatticeVec {
    type Output = LatticeVec;
    fn sub(self, o: LatticeVec) -> LatticeVec {
        LatticeVec::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for LatticeVec {
    type Output = LatticeVec;
    fn neg(self) -> LatticeVec {
        LatticeVec::new(-self.x, -self.y)
    }
}

impl std::iter::Sum for LatticeVec {
    fn sum<I: Iterator<Item = LatticeVec>>(iter: I) -> LatticeVec {
        iter.fold(LatticeVec::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

pub fn det2(v: LatticeVec, w: LatticeVec) -> i64 {
    v.x * w.y - v.y * w.x
}

pub fn weight_and_parity(v: LatticeVec) -> Result<(i64, Parity), Error> {
    if v.is_zero() {
        return Err(Error::InvalidDirection);
    }
    let parity = if v.is_even() { Parity::Even } else { Parity::Odd };
    Ok((v.weight(), parity))
}

/// A point of the plane with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(int(x), int(y))
    }

    /// `self + t·v`
    pub fn along(&self, t: &Rational, v: LatticeVec) -> Point {
        Point::new(
            &self.x + t * int(v.x),
            &self.y + t * int(v.y),
        )
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", fmt_rat(&self.x), fmt_rat(&self.y))
    }
}

/// Signed determinant of a lattice vector and a point, `v.x·p.y − v.y·p.x`.
/// With `v` primitive this is the line offset of a fixed end through `p`.
pub fn det_vp(v: LatticeVec, p: &Point) -> Rational {
    int(v.x) * &p.y - int(v.y) * &p.x
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// "p/q", or "p" when the denominator is 1.
pub fn fmt_rat(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<Rational, Error> {
    let bad = || Error::BadRational(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        None => BigInt::from_str(t).map(Rational::from_integer).map_err(|_| bad()),
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Gaussian rational `re + im·i`. Both parts are kept in lowest terms by
/// the underlying rational type, so derived equality is exact.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussRat::new(re, Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::real(int(n))
    }

    pub fn zero() -> Self {
        GaussRat::from_int(0)
    }

    pub fn one() -> Self {
        GaussRat::from_int(1)
    }

    pub fn i() -> Self {
        GaussRat::new(Rational::zero(), Rational::one())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -&self.im)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        GaussRat::new(&self.re * r, &self.im * r)
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(f, "{}{}{}i", fmt_rat(&self.re), sign, fmt_rat(&self.im.abs()))
    }
}

/// `i^n` for any integer `n`.
pub fn ipow(n: i64) -> GaussRat {
    match n.rem_euclid(4) {
        0 => GaussRat::from_int(1),
        1 => GaussRat::new(int(0), int(1)),
        2 => GaussRat::from_int(-1),
        _ => GaussRat::new(int(0), int(-1)),
    }
}
