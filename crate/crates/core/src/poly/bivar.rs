use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Field, Poly};
use crate::Rational;

/// Bivariate polynomial in `(b, t)` keyed by exponent pair; `coeff(i, j)` multiplies
/// `b^i t^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivarPoly<F> {
    terms: BTreeMap<(usize, usize), F>,
}

/// Serialized as a list of `[i, j, coefficient]` terms.
impl<F: Field + Serialize> Serialize for BivarPoly<F> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<_> = self.terms.iter().map(|((i, j), c)| (*i, *j, c)).collect();
        terms.serialize(s)
    }
}

impl<'de, F: Field + Deserialize<'de>> Deserialize<'de> for BivarPoly<F> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms: Vec<(usize, usize, F)> = Vec::deserialize(d)?;
        Ok(BivarPoly::from_terms(terms.into_iter().map(|(i, j, c)| (c, i, j))))
    }
}

impl<F: Field> BivarPoly<F> {
    pub fn zero() -> Self {
        BivarPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: F) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: F, i: usize, j: usize) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        BivarPoly { terms }
    }

    /// The polynomial `b`.
    pub fn b() -> Self {
        Self::monomial(F::one(), 1, 0)
    }

    /// The polynomial `t`.
    pub fn t() -> Self {
        Self::monomial(F::one(), 0, 1)
    }

    /// Build from `(coefficient, b-exponent, t-exponent)` triples; repeats add up.
    pub fn from_terms(terms: impl IntoIterator<Item = (F, usize, usize)>) -> Self {
        let mut out = Self::zero();
        for (c, i, j) in terms {
            out = &out + &Self::monomial(c, i, j);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> F {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(F::zero)
    }

    /// Nonzero terms in ascending `(i, j)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &F)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|(i, j)| i + j).max()
    }

    pub fn degree_b(&self) -> Option<usize> {
        self.terms.keys().map(|(i, _)| *i).max()
    }

    pub fn degree_t(&self) -> Option<usize> {
        self.terms.keys().map(|(_, j)| *j).max()
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        BivarPoly { terms: self.terms.iter().map(|(k, v)| (*k, v.clone() * c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(F::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, b: &F, t: &F) -> F {
        let mut acc = F::zero();
        for ((i, j), c) in &self.terms {
            acc = acc + c.clone() * pow(b, *i) * pow(t, *j);
        }
        acc
    }

    /// Partial derivative in `b`.
    pub fn diff_b(&self) -> Self {
        BivarPoly::from_terms(
            self.terms.iter().filter(|((i, _), _)| *i > 0).map(|((i, j), c)| (c.clone() * int::<F>(*i), i - 1, *j)),
        )
    }

    /// Partial derivative in `t`.
    pub fn diff_t(&self) -> Self {
        BivarPoly::from_terms(
            self.terms.iter().filter(|((_, j), _)| *j > 0).map(|((i, j), c)| (c.clone() * int::<F>(*j), *i, j - 1)),
        )
    }

    /// Substitute `t := m·b + c`, giving a polynomial in `b`.
    pub fn restrict_to_line(&self, m: &F, c: &F) -> Poly<F> {
        let line = Poly::new(vec![c.clone(), m.clone()]);
        let mut out = Poly::zero();
        for ((i, j), k) in &self.terms {
            let mut term = Poly::monomial(k.clone(), *i);
            for _ in 0..*j {
                term = &term * &line;
            }
            out = &out + &term;
        }
        out.with_var('b')
    }

    /// Polynomial in `b` when no `t` appears.
    pub fn to_poly_in_b(&self) -> Option<Poly<F>> {
        if self.degree_t().unwrap_or(0) > 0 {
            return None;
        }
        Some(self.restrict_to_line(&F::zero(), &F::zero()))
    }

    /// Coefficient polynomial in `b` of `t^j`.
    pub fn coeff_of_t(&self, j: usize) -> Poly<F> {
        let n = self.degree_b().map_or(0, |d| d + 1);
        Poly::new((0..n).map(|i| self.coeff(i, j)).collect()).with_var('b')
    }

    /// Embed a univariate polynomial in `b`.
    pub fn from_poly_in_b(p: &Poly<F>) -> Self {
        BivarPoly::from_terms(p.coeffs().iter().enumerate().map(|(i, c)| (c.clone(), i, 0)))
    }

    /// Monomials where `self` and `other` differ, as `(i, j, self coeff, other coeff)`.
    pub fn differences(&self, other: &Self) -> Vec<(usize, usize, F, F)> {
        let mut keys: Vec<_> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .filter(|&(i, j)| self.coeff(i, j) != other.coeff(i, j))
            .map(|(i, j)| (i, j, self.coeff(i, j), other.coeff(i, j)))
            .collect()
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> BivarPoly<G> {
        BivarPoly::from_terms(self.terms.iter().map(|((i, j), c)| (f(c), *i, *j)))
    }
}

fn int<F: Field>(v: usize) -> F {
    F::from_rational(Rational::from_integer((v as i64).into()))
}

fn pow<F: Field>(x: &F, e: usize) -> F {
    let mut acc = F::one();
    for _ in 0..e {
        acc = acc * x.clone();
    }
    acc
}

impl<'a, F: Field> Add<&'a BivarPoly<F>> for &'a BivarPoly<F> {
    type Output = BivarPoly<F>;
    fn add(self, rhs: &BivarPoly<F>) -> BivarPoly<F> {
        let mut terms = self.terms.clone();
        for (k, v) in &rhs.terms {
            let s = terms.remove(k).map_or_else(|| v.clone(), |a| a + v.clone());
            if !s.is_zero() {
                terms.insert(*k, s);
            }
        }
        BivarPoly { terms }
    }
}

impl<F: Field> Neg for &BivarPoly<F> {
    type Output = BivarPoly<F>;
    fn neg(self) -> BivarPoly<F> {
        BivarPoly { terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect() }
    }
}

impl<'a, F: Field> Sub<&'a BivarPoly<F>> for &'a BivarPoly<F> {
    type Output = BivarPoly<F>;
    fn sub(self, rhs: &BivarPoly<F>) -> BivarPoly<F> {
        self + &(-rhs)
    }
}

impl<'a, F: Field> Mul<&'a BivarPoly<F>> for &'a BivarPoly<F> {
    type Output = BivarPoly<F>;
    fn mul(self, rhs: &BivarPoly<F>) -> BivarPoly<F> {
        let mut terms: BTreeMap<(usize, usize), F> = BTreeMap::new();
        for ((i, j), a) in &self.terms {
            for ((k, l), b) in &rhs.terms {
                let key = (i + k, j + l);
                let prod = a.clone() * b.clone();
                let s = terms.remove(&key).map_or(prod.clone(), |c| c + prod);
                if !s.is_zero() {
                    terms.insert(key, s);
                }
            }
        }
        BivarPoly { terms }
    }
}

impl<F: Field> fmt::Display for BivarPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((i, j), c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match i {
                0 => {}
                1 => write!(f, "b")?,
                _ => write!(f, "b^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{j}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{ratio, QSqrt3};
    use num_traits::One;

    #[test]
    fn restrict_bt_along_diagonal() {
        let p: BivarPoly<Rational> = &BivarPoly::b() * &BivarPoly::t();
        let r = p.restrict_to_line(&ratio(1, 1), &ratio(0, 1));
        assert_eq!(r, Poly::monomial(ratio(1, 1), 2));
    }

    #[test]
    fn derivatives_and_evaluation() {
        // b²t³ + 2√3 t
        let p = BivarPoly::from_terms([(QSqrt3::one(), 2, 3), (QSqrt3::from_ratios(0, 1, 2, 1), 0, 1)]);
        assert_eq!(p.diff_t().diff_t().diff_t(), BivarPoly::monomial(QSqrt3::from_int(6), 2, 0));
        assert_eq!(p.diff_b(), BivarPoly::monomial(QSqrt3::from_int(2), 1, 3));
        let v = p.eval(&QSqrt3::from_int(2), &QSqrt3::from_int(1));
        assert_eq!(v, QSqrt3::from_int(4) + QSqrt3::from_ratios(0, 1, 2, 1));
        assert_eq!(p.degree_t(), Some(3));
        assert_eq!(p.total_degree(), Some(5));
    }

    #[test]
    fn differences_listed() {
        let a = BivarPoly::from_terms([(ratio(1, 1), 1, 0), (ratio(2, 1), 0, 1)]);
        let b = BivarPoly::from_terms([(ratio(1, 1), 1, 0), (ratio(3, 1), 0, 1)]);
        let d = a.differences(&b);
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].0, d[0].1), (0, 1));
    }
}
