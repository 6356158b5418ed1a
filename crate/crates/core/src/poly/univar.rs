use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::{Field, OrderedField};
use crate::exactnum::Sign;

/// Dense univariate polynomial; `coeffs[i]` multiplies `x^i`.
/// Equality ignores the variable name.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Poly<F> {
    coeffs: Vec<F>,
    #[serde(default = "default_var")]
    var: char,
}

impl<F: PartialEq> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

fn default_var() -> char {
    'x'
}

impl<F: Field> Poly<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs, var: 'x' }
    }

    /// Same coefficients, printed with variable `var`.
    pub fn with_var(mut self, var: char) -> Self {
        self.var = var;
        self
    }

    pub fn var(&self) -> char {
        self.var
    }

    pub fn zero() -> Self {
        Poly::new(Vec::new())
    }

    pub fn constant(c: F) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Poly::new(vec![F::zero(), F::one()])
    }

    pub fn monomial(c: F, deg: usize) -> Self {
        let mut v = vec![F::zero(); deg + 1];
        v[deg] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * F::from_rational(crate::Rational::from_integer((i as i64).into())))
            .collect();
        Poly::new(v).with_var(self.var)
    }

    pub fn scale(&self, c: &F) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect()).with_var(self.var)
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = F::one() / self.leading();
        self.scale(&inv)
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero().with_var(self.var), self.clone());
        }
        let mut q = vec![F::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone() / lead.clone();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].clone() - c.clone() * dc.clone();
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q).with_var(self.var), Poly::new(r).with_var(self.var))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn squarefree(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.clone();
        }
        self.div_rem(&g).0
    }

    /// Divide out the largest power of `x` dividing `self`.
    pub fn deflate_at_zero(&self) -> Self {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        Poly::new(self.coeffs[k.min(self.coeffs.len())..].to_vec()).with_var(self.var)
    }

    /// `self(q(x))`.
    pub fn compose(&self, q: &Self) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * q) + &Poly::constant(c.clone());
        }
        acc.with_var(q.var)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.coeffs.iter().map(f).collect()).with_var(self.var)
    }

    /// Whether every coefficient equals the corresponding one of `other` times `k`;
    /// returns the factor `other/self` when it is a nonzero constant.
    pub fn proportional_factor(&self, other: &Self) -> Option<F> {
        if self.degree() != other.degree() || self.is_zero() {
            return None;
        }
        let k = other.leading() / self.leading();
        (self.scale(&k) == *other).then_some(k)
    }
}

impl<F: OrderedField> Poly<F> {
    pub fn sign_at(&self, x: &F) -> Sign {
        self.eval(x).sign()
    }

    /// Sign as `x → +∞` (`at_pos = true`) or `x → −∞`.
    pub fn sign_at_infinity(&self, at_pos: bool) -> Sign {
        let s = self.leading().sign();
        match self.degree() {
            Some(d) if !at_pos && d % 2 == 1 => s.negate(),
            _ => s,
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }
}

impl<'a, F: Field> Add<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: &Poly<F>) -> Poly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect()).with_var(self.var)
    }
}

impl<'a, F: Field> Sub<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: &Poly<F>) -> Poly<F> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect()).with_var(self.var)
    }
}

impl<'a, F: Field> Mul<&'a Poly<F>> for &'a Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: &Poly<F>) -> Poly<F> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero().with_var(self.var);
        }
        let mut v = vec![F::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(v).with_var(self.var)
    }
}

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect()).with_var(self.var)
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c}){}", self.var)?,
                _ => write!(f, "({c}){}^{i}", self.var)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{ratio, QSqrt3};
    use crate::Rational;

    fn rp(v: &[i64]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&c| ratio(c, 1)).collect())
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        assert!(rp(&[5]).derivative().is_zero());
        assert_eq!(rp(&[1, 2, 3]).derivative(), rp(&[2, 6]));
    }

    #[test]
    fn derivative_of_quadratic_form() {
        // d/db of b(1 − 2b)/3 = (1 − 4b)/3
        let p = Poly::new(vec![ratio(0, 1), ratio(1, 3), ratio(-2, 3)]);
        assert_eq!(p.derivative(), Poly::new(vec![ratio(1, 3), ratio(-4, 3)]));
    }

    #[test]
    fn division_and_gcd() {
        let a = rp(&[-1, 0, 1]); // x² − 1
        let b = rp(&[1, 1]); // x + 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, rp(&[-1, 1]));
        assert!(r.is_zero());
        let sq = &a * &a;
        assert_eq!(sq.squarefree().monic(), a);
        assert_eq!(a.gcd(&rp(&[2, 2])), rp(&[1, 1]));
    }

    #[test]
    fn quadratic_field_coefficients() {
        // (x − √3)(x + √3) = x² − 3
        let s = QSqrt3::sqrt3();
        let p = Poly::new(vec![-s.clone(), QSqrt3::from_int(1)]);
        let q = Poly::new(vec![s, QSqrt3::from_int(1)]);
        assert_eq!(&p * &q, Poly::new(vec![QSqrt3::from_int(-3), QSqrt3::from_int(0), QSqrt3::from_int(1)]));
        assert_eq!(p.sign_at(&QSqrt3::from_int(2)), Sign::Positive);
    }

    #[test]
    fn deflation_and_composition() {
        let p = rp(&[0, 0, 3, 1]);
        assert_eq!(p.deflate_at_zero(), rp(&[3, 1]));
        // (x+1)² composed with x−1 is x²
        let sq = rp(&[1, 2, 1]);
        assert_eq!(sq.compose(&rp(&[-1, 1])), rp(&[0, 0, 1]));
    }
}
