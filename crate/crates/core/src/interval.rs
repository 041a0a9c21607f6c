//! Generalized (Kaucher) intervals over extended exact rationals.
//!
//! An interval `⟨lo, hi⟩` carries no ordering constraint: `lo <= hi` is a
//! proper interval, `lo > hi` an improper one. Every operation here is exact
//! and satisfies the dual homomorphism `dual(f(x, y)) = f(dual x, dual y)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

/// Builds the rational `n / d`. Panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum XRat {
    NegInf,
    Fin(Rational),
    PosInf,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("indeterminate form inf + (-inf)")]
    Indeterminate,
    #[error("division by an interval that is not bounded away from zero")]
    DivisionIndeterminate,
    #[error("interval has an unbounded endpoint")]
    Unbounded,
}

impl XRat {
    pub fn zero() -> Self {
        XRat::Fin(Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        XRat::Fin(int(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, XRat::Fin(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            XRat::Fin(q) => Some(q),
            _ => None,
        }
    }

    fn signum(&self) -> Ordering {
        match self {
            XRat::NegInf => Ordering::Less,
            XRat::PosInf => Ordering::Greater,
            XRat::Fin(q) => q.cmp(&Rational::zero()),
        }
    }

    pub fn is_nonneg(&self) -> bool {
        self.signum() != Ordering::Less
    }

    pub fn is_nonpos(&self) -> bool {
        self.signum() != Ordering::Greater
    }

    pub fn neg(&self) -> XRat {
        match self {
            XRat::NegInf => XRat::PosInf,
            XRat::PosInf => XRat::NegInf,
            XRat::Fin(q) => XRat::Fin(-q),
        }
    }

    /// Saturating addition; `inf + (-inf)` is indeterminate.
    pub fn add(&self, other: &XRat) -> Result<XRat, IntervalError> {
        match (self, other) {
            (XRat::Fin(a), XRat::Fin(b)) => Ok(XRat::Fin(a + b)),
            (XRat::PosInf, XRat::NegInf) | (XRat::NegInf, XRat::PosInf) => {
                Err(IntervalError::Indeterminate)
            }
            (XRat::PosInf, _) | (_, XRat::PosInf) => Ok(XRat::PosInf),
            (XRat::NegInf, _) | (_, XRat::NegInf) => Ok(XRat::NegInf),
        }
    }

    /// Product with the convention `inf * 0 = 0`.
    pub fn mul(&self, other: &XRat) -> XRat {
        match (self, other) {
            (XRat::Fin(a), XRat::Fin(b)) => XRat::Fin(a * b),
            _ => {
                let (s, t) = (self.signum(), other.signum());
                if s == Ordering::Equal || t == Ordering::Equal {
                    XRat::zero()
                } else if s == t {
                    XRat::PosInf
                } else {
                    XRat::NegInf
                }
            }
        }
    }

    pub fn pow(&self, k: u32) -> XRat {
        if k == 0 {
            return XRat::Fin(Rational::one());
        }
        match self {
            XRat::Fin(q) => XRat::Fin(num_traits::pow(q.clone(), k as usize)),
            XRat::PosInf => XRat::PosInf,
            XRat::NegInf => {
                if k.is_multiple_of(2) {
                    XRat::PosInf
                } else {
                    XRat::NegInf
                }
            }
        }
    }

    pub fn min(a: &XRat, b: &XRat) -> XRat {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max(a: &XRat, b: &XRat) -> XRat {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }
}

impl From<Rational> for XRat {
    fn from(q: Rational) -> Self {
        XRat::Fin(q)
    }
}

impl PartialOrd for XRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for XRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (XRat::NegInf, XRat::NegInf) | (XRat::PosInf, XRat::PosInf) => Ordering::Equal,
            (XRat::NegInf, _) | (_, XRat::PosInf) => Ordering::Less,
            (XRat::PosInf, _) | (_, XRat::NegInf) => Ordering::Greater,
            (XRat::Fin(a), XRat::Fin(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for XRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XRat::NegInf => write!(f, "-inf"),
            XRat::PosInf => write!(f, "inf"),
            XRat::Fin(q) => write!(f, "{q}"),
        }
    }
}

/// A generalized interval `⟨lo, hi⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GInterval {
    pub lo: XRat,
    pub hi: XRat,
}

/// Sign classes used by the Kaucher multiplication table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SignClass {
    /// both endpoints >= 0
    Pos,
    /// both endpoints <= 0
    Neg,
    /// lo <= 0 <= hi
    Zero,
    /// hi <= 0 <= lo
    DualZero,
}

impl GInterval {
    pub fn new(lo: XRat, hi: XRat) -> Self {
        GInterval { lo, hi }
    }

    pub fn point(q: Rational) -> Self {
        GInterval::new(XRat::Fin(q.clone()), XRat::Fin(q))
    }

    pub fn finite(lo: Rational, hi: Rational) -> Self {
        GInterval::new(XRat::Fin(lo), XRat::Fin(hi))
    }

    /// `⟨-inf, +inf⟩`, the proper interval that says nothing.
    pub fn entire() -> Self {
        GInterval::new(XRat::NegInf, XRat::PosInf)
    }

    pub fn is_proper(&self) -> bool {
        self.lo <= self.hi
    }

    pub fn dual(&self) -> GInterval {
        GInterval::new(self.hi.clone(), self.lo.clone())
    }

    pub fn width(&self) -> XRat {
        // b - a; for ⟨+inf, -inf⟩ the difference is -inf, for ⟨-inf, +inf⟩ it is +inf.
        match self.hi.add(&self.lo.neg()) {
            Ok(w) => w,
            Err(_) => unreachable!("hi + (-lo) cannot mix infinities of opposite sign"),
        }
    }

    pub fn midpoint(&self) -> Result<Rational, IntervalError> {
        match (&self.lo, &self.hi) {
            (XRat::Fin(a), XRat::Fin(b)) => Ok((a + b) / int(2)),
            _ => Err(IntervalError::Unbounded),
        }
    }

    /// Membership for proper intervals.
    pub fn contains(&self, q: &Rational) -> bool {
        let q = XRat::Fin(q.clone());
        self.lo <= q && q <= self.hi
    }

    pub fn add(&self, other: &GInterval) -> Result<GInterval, IntervalError> {
        Ok(GInterval::new(
            self.lo.add(&other.lo)?,
            self.hi.add(&other.hi)?,
        ))
    }

    pub fn neg(&self) -> GInterval {
        GInterval::new(self.hi.neg(), self.lo.neg())
    }

    pub fn sub(&self, other: &GInterval) -> Result<GInterval, IntervalError> {
        self.add(&other.neg())
    }

    fn class(&self) -> SignClass {
        let (a, b) = (&self.lo, &self.hi);
        if a.is_nonneg() && b.is_nonneg() {
            SignClass::Pos
        } else if a.is_nonpos() && b.is_nonpos() {
            SignClass::Neg
        } else if a.is_nonpos() && b.is_nonneg() {
            SignClass::Zero
        } else {
            SignClass::DualZero
        }
    }

    /// Kaucher multiplication.
    pub fn mul(&self, other: &GInterval) -> GInterval {
        use SignClass::*;
        let (a, b) = (&self.lo, &self.hi);
        let (c, d) = (&other.lo, &other.hi);
        let m = |x: &XRat, y: &XRat| x.mul(y);
        let (lo, hi) = match (self.class(), other.class()) {
            (Pos, Pos) => (m(a, c), m(b, d)),
            (Pos, Zero) => (m(b, c), m(b, d)),
            (Pos, Neg) => (m(b, c), m(a, d)),
            (Pos, DualZero) => (m(a, c), m(a, d)),
            (Zero, Pos) => (m(a, d), m(b, d)),
            (Zero, Zero) => (XRat::min(&m(a, d), &m(b, c)), XRat::max(&m(a, c), &m(b, d))),
            (Zero, Neg) => (m(b, c), m(a, c)),
            (Zero, DualZero) => (XRat::zero(), XRat::zero()),
            (Neg, Pos) => (m(a, d), m(b, c)),
            (Neg, Zero) => (m(a, d), m(a, c)),
            (Neg, Neg) => (m(b, d), m(a, c)),
            (Neg, DualZero) => (m(b, d), m(b, c)),
            (DualZero, Pos) => (m(a, c), m(b, c)),
            (DualZero, Zero) => (XRat::zero(), XRat::zero()),
            (DualZero, Neg) => (m(b, d), m(a, d)),
            (DualZero, DualZero) => (XRat::max(&m(a, c), &m(b, d)), XRat::min(&m(a, d), &m(b, c))),
        };
        GInterval::new(lo, hi)
    }

    /// Division by an interval whose endpoints are finite, nonzero and of one sign.
    pub fn div(&self, other: &GInterval) -> Result<GInterval, IntervalError> {
        let (c, d) = match (&other.lo, &other.hi) {
            (XRat::Fin(c), XRat::Fin(d)) => (c, d),
            _ => return Err(IntervalError::DivisionIndeterminate),
        };
        if c.is_zero() || d.is_zero() || c.is_positive() != d.is_positive() {
            return Err(IntervalError::DivisionIndeterminate);
        }
        let recip = GInterval::finite(d.recip(), c.recip());
        Ok(self.mul(&recip))
    }

    pub fn pow(&self, k: u32) -> GInterval {
        if k == 0 {
            return GInterval::point(Rational::one());
        }
        if k % 2 == 1 {
            return GInterval::new(self.lo.pow(k), self.hi.pow(k));
        }
        if !self.is_proper() {
            return self.dual().pow(k).dual();
        }
        let lo_k = self.lo.pow(k);
        let hi_k = self.hi.pow(k);
        let low = if self.lo.is_nonpos() && self.hi.is_nonneg() {
            XRat::zero()
        } else {
            XRat::min(&lo_k, &hi_k)
        };
        GInterval::new(low, XRat::max(&lo_k, &hi_k))
    }
}

impl fmt::Display for GInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}⟩", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gi(a: i64, b: i64) -> GInterval {
        GInterval::finite(int(a), int(b))
    }

    fn gq(a: (i64, i64), b: (i64, i64)) -> GInterval {
        GInterval::finite(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn addition() {
        assert_eq!(gi(1, 2).add(&gi(3, 4)).unwrap(), gi(4, 6));
        assert_eq!(gi(0, 0).add(&gi(-7, 5)).unwrap(), gi(-7, 5));
        let left_open = GInterval::new(XRat::NegInf, XRat::zero());
        assert_eq!(
            left_open.add(&gi(1, 1)).unwrap(),
            GInterval::new(XRat::NegInf, XRat::from_int(1))
        );
        let bad = GInterval::new(XRat::PosInf, XRat::zero());
        assert_eq!(
            bad.add(&GInterval::new(XRat::NegInf, XRat::zero())),
            Err(IntervalError::Indeterminate)
        );
    }

    #[test]
    fn negation() {
        assert_eq!(gi(1, 2).neg(), gi(-2, -1));
        assert_eq!(gi(2, 1).neg(), gi(-1, -2));
        assert_eq!(gi(0, 0).neg(), gi(0, 0));
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(gi(1, 2).mul(&gi(3, 4)), gi(3, 8));
        assert_eq!(gi(-1, 2).mul(&gi(-3, 4)), gi(-6, 8));
        assert_eq!(gi(2, 1).mul(&gi(4, 3)), gi(8, 3));
    }

    #[test]
    fn zero_times_infinity_is_zero() {
        let p = GInterval::point(int(0)).mul(&GInterval::entire());
        assert_eq!(p, gi(0, 0));
    }

    #[test]
    fn division() {
        assert_eq!(gi(1, 1).div(&gi(2, 2)).unwrap(), gq((1, 2), (1, 2)));
        assert_eq!(gi(1, 2).div(&gi(-4, -2)).unwrap(), gq((-1, 1), (-1, 4)));
        assert_eq!(
            gi(1, 2).div(&gi(-1, 1)),
            Err(IntervalError::DivisionIndeterminate)
        );
        assert_eq!(
            gi(1, 2).div(&gi(0, 1)),
            Err(IntervalError::DivisionIndeterminate)
        );
    }

    #[test]
    fn powers() {
        assert_eq!(gi(-1, 1).pow(2), gi(0, 1));
        assert_eq!(gi(2, 3).pow(3), gi(8, 27));
        assert_eq!(gi(-5, 9).pow(0), gi(1, 1));
        assert_eq!(gi(1, -1).pow(2), gi(1, 0));
        assert_eq!(gi(-3, -2).pow(2), gi(4, 9));
    }

    #[test]
    fn width_dual_midpoint() {
        assert_eq!(gi(3, 8).dual(), gi(8, 3));
        assert_eq!(gq((1, 1), (3, 2)).width(), XRat::Fin(rat(1, 2)));
        assert_eq!(gi(1, 2).midpoint().unwrap(), rat(3, 2));
        assert_eq!(gi(5, 2).width(), XRat::from_int(-3));
        assert_eq!(GInterval::entire().width(), XRat::PosInf);
        assert_eq!(
            GInterval::entire().midpoint(),
            Err(IntervalError::Unbounded)
        );
    }

    #[test]
    fn xrat_order() {
        assert!(XRat::NegInf < XRat::from_int(-1000));
        assert!(XRat::from_int(1000) < XRat::PosInf);
        assert!(XRat::NegInf < XRat::PosInf);
    }
}
