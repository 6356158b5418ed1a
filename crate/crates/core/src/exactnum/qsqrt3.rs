use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{rational_sqrt_exact, ExactError, Sign};
use crate::Rational;

/// An element `a + b√3` of the real quadratic field ℚ(√3).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QSqrt3 {
    #[serde(with = "crate::exactnum::serde_rational")]
    pub a: Rational,
    #[serde(with = "crate::exactnum::serde_rational")]
    pub b: Rational,
}

impl QSqrt3 {
    pub fn new(a: Rational, b: Rational) -> Self {
        QSqrt3 { a, b }
    }

    pub fn from_rational(a: Rational) -> Self {
        QSqrt3 { a, b: Rational::zero() }
    }

    pub fn from_int(a: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(a)))
    }

    /// `p/q + (r/s)√3` from machine integers; handy in tests and constants.
    pub fn from_ratios(p: i64, q: i64, r: i64, s: i64) -> Self {
        QSqrt3 {
            a: Rational::new(BigInt::from(p), BigInt::from(q)),
            b: Rational::new(BigInt::from(r), BigInt::from(s)),
        }
    }

    pub fn sqrt3() -> Self {
        QSqrt3 { a: Rational::zero(), b: Rational::one() }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a − b√3`.
    pub fn conj(&self) -> Self {
        QSqrt3 { a: self.a.clone(), b: -self.b.clone() }
    }

    /// Field norm `a² − 3b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(BigInt::from(3)) * &self.b * &self.b
    }

    /// Exact sign, decided by comparing `a²` with `3b²` when the parts disagree.
    pub fn sign(&self) -> Sign {
        let sa = Sign::of_rational(&self.a);
        let sb = Sign::of_rational(&self.b);
        match (sa, sb) {
            (Sign::Zero, s) | (s, Sign::Zero) => s,
            (x, y) if x == y => x,
            (x, y) => {
                let a2 = &self.a * &self.a;
                let b2 = Rational::from_integer(BigInt::from(3)) * &self.b * &self.b;
                if a2 > b2 {
                    x
                } else {
                    y
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Sign::Negative {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let n = rhs.norm();
        let num = self.clone() * rhs.conj();
        Ok(QSqrt3 { a: num.a / &n, b: num.b / n })
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        QSqrt3::one().checked_div(self)
    }

    /// The non-negative square root, when it lies in ℚ(√3).
    pub fn sqrt_exact(&self) -> Option<Self> {
        match self.sign() {
            Sign::Negative => return None,
            Sign::Zero => return Some(QSqrt3::zero()),
            Sign::Positive => {}
        }
        if self.b.is_zero() {
            if let Some(r) = rational_sqrt_exact(&self.a) {
                return Some(QSqrt3::from_rational(r));
            }
            let third = &self.a / Rational::from_integer(BigInt::from(3));
            return rational_sqrt_exact(&third).map(|r| QSqrt3 { a: Rational::zero(), b: r });
        }
        // (p + q√3)² = a + b√3  ⇔  p² + 3q² = a, 2pq = b.
        let disc = rational_sqrt_exact(&self.norm())?;
        let two = Rational::from_integer(BigInt::from(2));
        for cand in [(&self.a + &disc) / &two, (&self.a - &disc) / &two] {
            if cand.is_positive() {
                if let Some(p) = rational_sqrt_exact(&cand) {
                    let q = &self.b / (&two * &p);
                    let r = QSqrt3 { a: p, b: q };
                    if &(r.clone() * r.clone()) == self {
                        return Some(r.abs());
                    }
                }
            }
        }
        None
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * 3f64.sqrt()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QSqrt3::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl From<Rational> for QSqrt3 {
    fn from(r: Rational) -> Self {
        QSqrt3::from_rational(r)
    }
}

impl From<i64> for QSqrt3 {
    fn from(v: i64) -> Self {
        QSqrt3::from_int(v)
    }
}

impl Zero for QSqrt3 {
    fn zero() -> Self {
        QSqrt3 { a: Rational::zero(), b: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for QSqrt3 {
    fn one() -> Self {
        QSqrt3 { a: Rational::one(), b: Rational::zero() }
    }
}

impl Add for QSqrt3 {
    type Output = QSqrt3;
    fn add(self, rhs: QSqrt3) -> QSqrt3 {
        QSqrt3 { a: self.a + rhs.a, b: self.b + rhs.b }
    }
}

impl Sub for QSqrt3 {
    type Output = QSqrt3;
    fn sub(self, rhs: QSqrt3) -> QSqrt3 {
        QSqrt3 { a: self.a - rhs.a, b: self.b - rhs.b }
    }
}

impl Mul for QSqrt3 {
    type Output = QSqrt3;
    fn mul(self, rhs: QSqrt3) -> QSqrt3 {
        let three = Rational::from_integer(BigInt::from(3));
        QSqrt3 {
            a: &self.a * &rhs.a + three * &self.b * &rhs.b,
            b: &self.a * &rhs.b + &self.b * &rhs.a,
        }
    }
}

/// Panics on division by zero, like the primitive types; use
/// [`QSqrt3::checked_div`] for a fallible variant.
impl Div for QSqrt3 {
    type Output = QSqrt3;
    fn div(self, rhs: QSqrt3) -> QSqrt3 {
        self.checked_div(&rhs).expect("division by zero in Q(sqrt 3)")
    }
}

impl Neg for QSqrt3 {
    type Output = QSqrt3;
    fn neg(self) -> QSqrt3 {
        QSqrt3 { a: -self.a, b: -self.b }
    }
}

impl PartialOrd for QSqrt3 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt3 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).sign().to_ordering()
    }
}

impl fmt::Display for QSqrt3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}√3", self.b),
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{} - {}√3", self.a, -self.b.clone())
                } else {
                    write!(f, "{} + {}√3", self.a, self.b)
                }
            }
        }
    }
}

/// Convenience for building rationals from machine integers.
pub fn ratio(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_of_squares() {
        let x = QSqrt3::from_ratios(1, 1, 1, 1);
        let y = QSqrt3::from_ratios(1, 1, -1, 1);
        assert_eq!(x * y, QSqrt3::from_int(-2));
    }

    #[test]
    fn sign_needs_exact_comparison() {
        // 144 < 147, so 7√3 dominates.
        assert_eq!(QSqrt3::from_ratios(-12, 1, 7, 1).sign(), Sign::Positive);
        assert_eq!(QSqrt3::from_ratios(12, 1, -7, 1).sign(), Sign::Negative);
        assert_eq!(QSqrt3::from_ratios(-97, 1, 56, 1).sign(), Sign::Negative);
    }

    #[test]
    fn sqrt3_squared() {
        assert_eq!(QSqrt3::sqrt3() * QSqrt3::sqrt3(), QSqrt3::from_int(3));
    }

    #[test]
    fn division_and_zero() {
        let x = QSqrt3::from_ratios(2, 3, 5, 7);
        let y = QSqrt3::from_ratios(-1, 2, 1, 3);
        let q = x.checked_div(&y).unwrap();
        assert_eq!(q * y, x);
        assert_eq!(x.checked_div(&QSqrt3::zero()), Err(ExactError::DivisionByZero));
    }

    #[test]
    fn exact_square_roots() {
        // 4 − 2√3 = (√3 − 1)²
        let w = QSqrt3::from_ratios(4, 1, -2, 1);
        assert_eq!(w.sqrt_exact(), Some(QSqrt3::from_ratios(-1, 1, 1, 1)));
        assert_eq!(QSqrt3::from_ratios(4, 3, 0, 1).sqrt_exact(), Some(QSqrt3::from_ratios(0, 1, 2, 3)));
        assert_eq!(QSqrt3::from_int(2).sqrt_exact(), None);
        assert_eq!(QSqrt3::sqrt3().sqrt_exact(), None);
        assert_eq!(QSqrt3::from_int(-4).sqrt_exact(), None);
    }
}
