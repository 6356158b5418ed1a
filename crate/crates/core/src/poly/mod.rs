//! Dense polynomials over ℚ and ℚ(√3), Sturm chains and radical elimination.

mod bivar;
mod elim;
mod sturm;
mod univar;

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactnum::{QSqrt3, Sign};
use crate::Rational;

pub use bivar::BivarPoly;
pub use elim::{annihilating_polynomial, eliminate_radicals, eliminate_radicals_bivar};
pub use sturm::{isolate_roots, positive_on_segment, Bound, PositivityTrace, RationalBounds, SturmChain};
pub use univar::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("the zero polynomial has no Sturm chain")]
    ZeroPolynomial,
    #[error("expression is not a radical expression in the allowed variables: {0}")]
    UnsupportedExpression(String),
    #[error("positivity certificate failed on [{lo}, {hi}]")]
    CertFailed { lo: String, hi: String },
    #[error("empty or reversed interval")]
    EmptyInterval,
}

/// Exact coefficient field.
pub trait Field:
    Clone
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_rational(r: Rational) -> Self;
}

/// Exact ordered field: every element has a decidable sign.
pub trait OrderedField: Field {
    fn sign(&self) -> Sign;
    fn to_f64(&self) -> f64;
}

impl Field for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }
}

impl OrderedField for Rational {
    fn sign(&self) -> Sign {
        Sign::of_rational(self)
    }

    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(if self.is_negative() { f64::MIN } else { f64::MAX })
    }
}

impl Field for QSqrt3 {
    fn from_rational(r: Rational) -> Self {
        QSqrt3::from_rational(r)
    }
}

impl OrderedField for QSqrt3 {
    fn sign(&self) -> Sign {
        QSqrt3::sign(self)
    }

    fn to_f64(&self) -> f64 {
        QSqrt3::to_f64(self)
    }
}
