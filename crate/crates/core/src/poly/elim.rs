//! Radical elimination: `u + v√w = 0` only if `u² − v²w = 0`, iterated until no
//! square roots remain.
//!
//! Expressions are translated into fractions whose numerator and denominator are
//! multilinear in radical symbols `s_k = √R_k` with coefficients in ℚ(√3)[b, t].
//! Square roots of perfect squares in ℚ(√3) are folded into the coefficient field,
//! and constant radicands are matched against earlier symbols up to squares.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::{BivarPoly, Poly, PolyError};
use crate::exactnum::{Node, QSqrt3, RadicalExpr};

type Coeff = BivarPoly<QSqrt3>;

/// Multilinear combination of radical symbols; key bit `k` marks a factor `s_k`.
#[derive(Debug, Clone, PartialEq)]
struct Elem(BTreeMap<u64, Coeff>);

impl Elem {
    fn zero() -> Self {
        Elem(BTreeMap::new())
    }

    fn from_coeff(c: Coeff) -> Self {
        Self::term(0, c)
    }

    fn term(mask: u64, c: Coeff) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(mask, c);
        }
        Elem(m)
    }

    fn constant(c: QSqrt3) -> Self {
        Self::from_coeff(Coeff::constant(c))
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&self, o: &Elem) -> Elem {
        let mut m = self.0.clone();
        for (k, v) in &o.0 {
            let s = match m.remove(k) {
                Some(a) => &a + v,
                None => v.clone(),
            };
            if !s.is_zero() {
                m.insert(*k, s);
            }
        }
        Elem(m)
    }

    fn neg(&self) -> Elem {
        Elem(self.0.iter().map(|(k, v)| (*k, -v)).collect())
    }

    fn sub(&self, o: &Elem) -> Elem {
        self.add(&o.neg())
    }

    fn scale(&self, c: &QSqrt3) -> Elem {
        if c.is_zero() {
            return Elem::zero();
        }
        Elem(self.0.iter().map(|(k, v)| (*k, v.scale(c))).collect())
    }

    /// The value when free of symbols and variables.
    fn as_const(&self) -> Option<QSqrt3> {
        match self.0.len() {
            0 => Some(QSqrt3::zero()),
            1 => {
                let (k, v) = self.0.iter().next().unwrap();
                if *k != 0 || v.total_degree() != Some(0) {
                    return None;
                }
                Some(v.coeff(0, 0))
            }
            _ => None,
        }
    }

    fn has_vars(&self) -> bool {
        self.0.values().any(|c| c.total_degree().unwrap_or(0) > 0)
    }

    fn top_symbol(&self) -> Option<usize> {
        self.0.keys().copied().filter(|&k| k != 0).map(|k| 63 - k.leading_zeros() as usize).max()
    }

    /// If `self = k·other` for a constant `k`, return `k`.
    fn ratio_to(&self, other: &Elem) -> Option<QSqrt3> {
        if self.0.len() != other.0.len() || other.is_zero() {
            return None;
        }
        let (mk, oc) = other.0.iter().next().unwrap();
        let sc = self.0.get(mk)?;
        let ((i, j), ov) = oc.terms().next().unwrap();
        let k = sc.coeff(*i, *j) / ov.clone();
        (other.scale(&k) == *self).then_some(k)
    }
}

#[derive(Debug, Clone)]
struct Frac {
    num: Elem,
    den: Elem,
}

struct Engine {
    radicands: Vec<Elem>,
    constants: Vec<Option<QSqrt3>>,
    memo: HashMap<usize, Frac>,
    nvars: usize,
}

fn unsupported(msg: impl Into<String>) -> PolyError {
    PolyError::UnsupportedExpression(msg.into())
}

impl Engine {
    fn new(nvars: usize) -> Self {
        Engine { radicands: Vec::new(), constants: Vec::new(), memo: HashMap::new(), nvars }
    }

    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (ma, ca) in &a.0 {
            for (mb, cb) in &b.0 {
                let prod = ca * cb;
                if prod.is_zero() {
                    continue;
                }
                let mut term = Elem::term(ma ^ mb, prod);
                let mut common = ma & mb;
                while common != 0 {
                    let k = common.trailing_zeros() as usize;
                    common &= common - 1;
                    term = self.mul(&term, &self.radicands[k]);
                }
                out = out.add(&term);
            }
        }
        out
    }

    fn frac(&self, num: Elem, den: Elem) -> Result<Frac, PolyError> {
        if den.is_zero() {
            return Err(unsupported("division by zero"));
        }
        match den.as_const() {
            Some(c) if !c.is_one() => Ok(Frac { num: num.scale(&c.recip().expect("nonzero")), den: Elem::constant(QSqrt3::one()) }),
            _ => Ok(Frac { num, den }),
        }
    }

    fn convert(&mut self, e: &RadicalExpr) -> Result<Frac, PolyError> {
        if let Some(f) = self.memo.get(&e.id()) {
            return Ok(f.clone());
        }
        let one = || Elem::constant(QSqrt3::one());
        let f = match e.node() {
            Node::Const(r) => Frac { num: Elem::constant(QSqrt3::from_rational(r.clone())), den: one() },
            Node::Var(i) => {
                let c = match i {
                    0 if self.nvars >= 1 => Coeff::b(),
                    1 if self.nvars >= 2 => Coeff::t(),
                    _ => return Err(unsupported(format!("variable x{i} not allowed here"))),
                };
                Frac { num: Elem::from_coeff(c), den: one() }
            }
            Node::Pi => return Err(unsupported("π is not a radical")),
            Node::Neg(a) => {
                let a = self.convert(a)?;
                Frac { num: a.num.neg(), den: a.den }
            }
            Node::Add(a, b) | Node::Sub(a, b) => {
                let (x, y) = (self.convert(a)?, self.convert(b)?);
                let sub = matches!(e.node(), Node::Sub(..));
                let combine = |p: Elem, q: Elem| if sub { p.sub(&q) } else { p.add(&q) };
                if x.den == y.den {
                    Frac { num: combine(x.num, y.num), den: x.den }
                } else {
                    let num = combine(self.mul(&x.num, &y.den), self.mul(&y.num, &x.den));
                    self.frac(num, self.mul(&x.den, &y.den))?
                }
            }
            Node::Mul(a, b) => {
                let (x, y) = (self.convert(a)?, self.convert(b)?);
                if x.num == y.den {
                    self.frac(y.num, x.den)?
                } else if y.num == x.den {
                    self.frac(x.num, y.den)?
                } else {
                    self.frac(self.mul(&x.num, &y.num), self.mul(&x.den, &y.den))?
                }
            }
            Node::Div(a, b) => {
                let (x, y) = (self.convert(a)?, self.convert(b)?);
                if y.num.is_zero() {
                    return Err(unsupported("division by zero"));
                }
                if x.den == y.den {
                    self.frac(x.num, y.num)?
                } else {
                    self.frac(self.mul(&x.num, &y.den), self.mul(&x.den, &y.num))?
                }
            }
            Node::Sqrt(a) => {
                // √(N/D) = √(N·D)/D
                let x = self.convert(a)?;
                let w = if x.den.as_const().is_some_and(|c| c.is_one()) { x.num.clone() } else { self.mul(&x.num, &x.den) };
                let root = self.sqrt_elem(w)?;
                self.frac(root, x.den)?
            }
        };
        self.memo.insert(e.id(), f.clone());
        Ok(f)
    }

    fn sqrt_elem(&mut self, w: Elem) -> Result<Elem, PolyError> {
        if w.is_zero() {
            return Ok(Elem::zero());
        }
        if let Some(c) = w.as_const() {
            if c.sign() == crate::exactnum::Sign::Negative {
                return Err(unsupported("square root of a negative constant"));
            }
            if let Some(r) = c.sqrt_exact() {
                return Ok(Elem::constant(r));
            }
            for (i, wi) in self.constants.iter().enumerate() {
                if let Some(wi) = wi {
                    if let Some(r) = (c.clone() / wi.clone()).sqrt_exact() {
                        return Ok(Elem::term(1 << i, Coeff::constant(r)));
                    }
                }
            }
            for (i, wi) in self.constants.iter().enumerate() {
                for (j, wj) in self.constants.iter().enumerate().skip(i + 1) {
                    if let (Some(wi), Some(wj)) = (wi, wj) {
                        if let Some(r) = (c.clone() / (wi.clone() * wj.clone())).sqrt_exact() {
                            return Ok(Elem::term((1 << i) | (1 << j), Coeff::constant(r)));
                        }
                    }
                }
            }
            return self.new_symbol(w, Some(c));
        }
        for (i, ri) in self.radicands.iter().enumerate() {
            if let Some(k) = w.ratio_to(ri) {
                if let Some(r) = k.sqrt_exact() {
                    return Ok(Elem::term(1 << i, Coeff::constant(r)));
                }
            }
        }
        self.new_symbol(w, None)
    }

    fn new_symbol(&mut self, w: Elem, value: Option<QSqrt3>) -> Result<Elem, PolyError> {
        let k = self.radicands.len();
        if k >= 64 {
            return Err(unsupported("more than 64 distinct radicals"));
        }
        self.radicands.push(w);
        self.constants.push(value);
        Ok(Elem::term(1 << k, Coeff::constant(QSqrt3::one())))
    }

    /// Clear symbols from the top down: `u + v·s_k ↦ u² − v²·R_k`.
    fn eliminate(&self, mut e: Elem) -> Coeff {
        while let Some(k) = e.top_symbol() {
            let bit = 1u64 << k;
            let (mut u, mut v) = (Elem::zero(), Elem::zero());
            for (m, c) in &e.0 {
                if m & bit == 0 {
                    u = u.add(&Elem::term(*m, c.clone()));
                } else {
                    v = v.add(&Elem::term(m ^ bit, c.clone()));
                }
            }
            let v2r = self.mul(&self.mul(&v, &v), &self.radicands[k]);
            e = self.mul(&u, &u).sub(&v2r);
        }
        e.0.get(&0).cloned().unwrap_or_else(Coeff::zero)
    }
}

/// Polynomial in `(b, t) = (x0, x1)` vanishing wherever `expr` does.
pub fn eliminate_radicals_bivar(expr: &RadicalExpr) -> Result<BivarPoly<QSqrt3>, PolyError> {
    let mut eng = Engine::new(2);
    let f = eng.convert(expr)?;
    Ok(eng.eliminate(f.num))
}

/// Polynomial in `b = x0` vanishing wherever the one-variable `expr` does.
///
/// Necessary-condition semantics: every real root of `expr` is a root of the
/// result, which may have extraneous roots.
pub fn eliminate_radicals(expr: &RadicalExpr) -> Result<Poly<QSqrt3>, PolyError> {
    let mut eng = Engine::new(1);
    let f = eng.convert(expr)?;
    let p = eng.eliminate(f.num);
    Ok(p.to_poly_in_b().expect("only b occurs"))
}

/// Nonzero polynomial over ℚ(√3) having the constant `expr` as a root.
pub fn annihilating_polynomial(expr: &RadicalExpr) -> Result<Poly<QSqrt3>, PolyError> {
    let mut eng = Engine::new(0);
    let f = eng.convert(expr)?;
    if f.num.has_vars() || f.den.has_vars() {
        return Err(unsupported("expression is not constant"));
    }
    let x = Elem::from_coeff(Coeff::b());
    let shifted = f.num.sub(&eng.mul(&x, &f.den));
    let p = eng.eliminate(shifted).to_poly_in_b().expect("only the shift variable occurs");
    if p.is_zero() {
        return Err(unsupported("elimination collapsed to the zero polynomial"));
    }
    Ok(p.with_var('x'))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    fn c(v: i64) -> RadicalExpr {
        RadicalExpr::int(v)
    }

    #[test]
    fn constant_examples() {
        let p = eliminate_radicals(&(c(3) - c(9).sqrt())).unwrap();
        assert!(p.is_zero());
        let p = eliminate_radicals(&(c(1) + c(2).sqrt())).unwrap();
        assert_eq!(p, Poly::constant(QSqrt3::from_int(-1)));
    }

    #[test]
    fn sqrt3_is_in_the_field() {
        let p = annihilating_polynomial(&(c(3).sqrt() + c(1))).unwrap();
        assert_eq!(p.degree(), Some(1));
        assert!(p.eval(&(QSqrt3::sqrt3() + QSqrt3::one())).is_zero());
    }

    #[test]
    fn repeated_radicals_share_a_symbol() {
        let p = annihilating_polynomial(&(c(2).sqrt() - c(2).sqrt())).unwrap();
        assert_eq!(p.degree(), Some(1));
        assert!(p.coeff(0).is_zero());
        // √8 = 2√2 folds onto the same symbol
        let p = annihilating_polynomial(&(c(8).sqrt() - c(2) * c(2).sqrt())).unwrap();
        assert_eq!(p.degree(), Some(1));
    }

    #[test]
    fn univariate_root_is_preserved() {
        // √(1 + b²) − 2 vanishes at b = √3.
        let b = RadicalExpr::var(0);
        let e = (c(1) + b.clone() * b).sqrt() - c(2);
        let p = eliminate_radicals(&e).unwrap();
        assert!(p.eval(&QSqrt3::sqrt3()).is_zero());
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn bivariate_cancellation_of_denominator() {
        // (b − t + T) · (1 / (b − t + T)) eliminates to a constant.
        let b = RadicalExpr::var(0);
        let t = RadicalExpr::var(1);
        let tt = (c(1) + t.clone() * t.clone()).sqrt();
        let d = b - t + tt;
        let e = d.clone() * (c(1) / d);
        let p = eliminate_radicals_bivar(&e).unwrap();
        assert_eq!(p, BivarPoly::constant(QSqrt3::one()));
    }

    #[test]
    fn pi_is_rejected() {
        assert!(eliminate_radicals(&RadicalExpr::pi()).is_err());
        let _ = ratio(1, 2);
    }
}
