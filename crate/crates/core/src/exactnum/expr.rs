use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::dyadic::{Interval, IntervalFault};
use super::{pi_enclosure, QSqrt3};
use crate::Rational;

/// Node kinds of a [`RadicalExpr`].
#[derive(Debug)]
pub enum Node {
    Const(Rational),
    /// Free variable by index; `x0` is the univariate variable, `(x0, x1) = (b, t)`
    /// for slope-plane functions.
    Var(usize),
    /// The certified constant π. Not radical; only interval evaluation handles it.
    Pi,
    Add(RadicalExpr, RadicalExpr),
    Sub(RadicalExpr, RadicalExpr),
    Mul(RadicalExpr, RadicalExpr),
    Div(RadicalExpr, RadicalExpr),
    Neg(RadicalExpr),
    Sqrt(RadicalExpr),
}

/// Immutable, cheaply clonable expression tree over ℚ with `+ − × ÷ √`.
#[derive(Clone, Debug)]
pub struct RadicalExpr(Arc<Node>);

/// Evaluation failure located at a particular node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct NodeFault {
    pub fault: IntervalFault,
    pub node: usize,
}

impl RadicalExpr {
    pub fn from_node(n: Node) -> Self {
        RadicalExpr(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(r: Rational) -> Self {
        Self::from_node(Node::Const(r))
    }

    pub fn int(v: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::constant(Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn var(i: usize) -> Self {
        Self::from_node(Node::Var(i))
    }

    pub fn pi() -> Self {
        Self::from_node(Node::Pi)
    }

    pub fn sqrt3() -> Self {
        Self::int(3).sqrt()
    }

    /// `a + b√3` as a tree.
    pub fn from_qsqrt3(x: &QSqrt3) -> Self {
        let a = Self::constant(x.a.clone());
        if x.b.is_zero() {
            return a;
        }
        let b = Self::constant(x.b.clone()) * Self::sqrt3();
        if x.a.is_zero() {
            b
        } else {
            a + b
        }
    }

    pub fn sqrt(&self) -> Self {
        Self::from_node(Node::Sqrt(self.clone()))
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn powi(&self, n: u32) -> Self {
        if n == 0 {
            return Self::int(1);
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(r) => Some(r),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var(_) | Node::Pi => 1,
            Node::Neg(a) | Node::Sqrt(a) => 1 + a.depth(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Whether any `Var` node occurs.
    pub fn has_vars(&self) -> bool {
        match self.node() {
            Node::Var(_) => true,
            Node::Const(_) | Node::Pi => false,
            Node::Neg(a) | Node::Sqrt(a) => a.has_vars(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.has_vars() || b.has_vars()
            }
        }
    }

    pub fn has_pi(&self) -> bool {
        match self.node() {
            Node::Pi => true,
            Node::Const(_) | Node::Var(_) => false,
            Node::Neg(a) | Node::Sqrt(a) => a.has_pi(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.has_pi() || b.has_pi()
            }
        }
    }

    /// Replace `Var(var)` by `value` everywhere.
    pub fn subst(&self, var: usize, value: &RadicalExpr) -> RadicalExpr {
        match self.node() {
            Node::Var(i) if *i == var => value.clone(),
            Node::Const(_) | Node::Var(_) | Node::Pi => self.clone(),
            Node::Neg(a) => -a.subst(var, value),
            Node::Sqrt(a) => a.subst(var, value).sqrt(),
            Node::Add(a, b) => a.subst(var, value) + b.subst(var, value),
            Node::Sub(a, b) => a.subst(var, value) - b.subst(var, value),
            Node::Mul(a, b) => a.subst(var, value) * b.subst(var, value),
            Node::Div(a, b) => a.subst(var, value) / b.subst(var, value),
        }
    }

    /// Symbolic partial derivative with respect to `Var(var)`.
    pub fn diff(&self, var: usize) -> RadicalExpr {
        let zero = || RadicalExpr::int(0);
        match self.node() {
            Node::Const(_) | Node::Pi => zero(),
            Node::Var(i) => {
                if *i == var {
                    RadicalExpr::int(1)
                } else {
                    zero()
                }
            }
            Node::Neg(a) => -a.diff(var),
            Node::Add(a, b) => a.diff(var) + b.diff(var),
            Node::Sub(a, b) => a.diff(var) - b.diff(var),
            Node::Mul(a, b) => a.diff(var) * b.clone() + a.clone() * b.diff(var),
            Node::Div(a, b) => {
                (a.diff(var) * b.clone() - a.clone() * b.diff(var)) / b.square()
            }
            Node::Sqrt(a) => a.diff(var) / (RadicalExpr::int(2) * self.clone()),
        }
    }

    /// Floating-point evaluation; `env[i]` binds `Var(i)`.
    pub fn eval_f64(&self, env: &[f64]) -> f64 {
        match self.node() {
            Node::Const(r) => r.to_f64().unwrap_or(f64::NAN),
            Node::Var(i) => env.get(*i).copied().unwrap_or(f64::NAN),
            Node::Pi => std::f64::consts::PI,
            Node::Neg(a) => -a.eval_f64(env),
            Node::Sqrt(a) => a.eval_f64(env).sqrt(),
            Node::Add(a, b) => a.eval_f64(env) + b.eval_f64(env),
            Node::Sub(a, b) => a.eval_f64(env) - b.eval_f64(env),
            Node::Mul(a, b) => a.eval_f64(env) * b.eval_f64(env),
            Node::Div(a, b) => a.eval_f64(env) / b.eval_f64(env),
        }
    }

    /// One pass of interval evaluation at working precision `prec`.
    ///
    /// `nonneg` lists sqrt nodes whose operand has been certified non-negative by
    /// exact means; their straddling enclosures are clamped at zero.
    pub(crate) fn enclose(
        &self,
        prec: u32,
        env: &[Interval],
        nonneg: &HashSet<usize>,
    ) -> Result<Interval, NodeFault> {
        let at = |fault| NodeFault { fault, node: self.id() };
        Ok(match self.node() {
            Node::Const(r) => Interval::from_rational(r, prec),
            Node::Var(i) => match env.get(*i) {
                Some(iv) => iv.clone(),
                None => return Err(at(IntervalFault::DivisorStraddlesZero)),
            },
            Node::Pi => pi_enclosure(prec),
            Node::Neg(a) => a.enclose(prec, env, nonneg)?.neg(),
            Node::Add(a, b) => a.enclose(prec, env, nonneg)?.add(&b.enclose(prec, env, nonneg)?, prec),
            Node::Sub(a, b) => a.enclose(prec, env, nonneg)?.sub(&b.enclose(prec, env, nonneg)?, prec),
            Node::Mul(a, b) => {
                if Arc::ptr_eq(&a.0, &b.0) {
                    // x·x is never negative; keeps squares tight near zero.
                    let x = a.enclose(prec, env, nonneg)?;
                    let sq = x.mul(&x, prec);
                    if x.lo.sign() == super::Sign::Negative && x.hi.sign() == super::Sign::Positive {
                        Interval::new(super::Dyadic::zero(), sq.hi)
                    } else {
                        sq
                    }
                } else {
                    a.enclose(prec, env, nonneg)?.mul(&b.enclose(prec, env, nonneg)?, prec)
                }
            }
            Node::Div(a, b) => {
                let num = a.enclose(prec, env, nonneg)?;
                let den = b.enclose(prec, env, nonneg)?;
                num.div(&den, prec).map_err(at)?
            }
            Node::Sqrt(a) => {
                let inner = a.enclose(prec, env, nonneg)?;
                inner.sqrt(prec, nonneg.contains(&self.id())).map_err(at)?
            }
        })
    }

    /// Find the sub-expression with the given node id.
    pub(crate) fn find(&self, id: usize) -> Option<&RadicalExpr> {
        if self.id() == id {
            return Some(self);
        }
        match self.node() {
            Node::Const(_) | Node::Var(_) | Node::Pi => None,
            Node::Neg(a) | Node::Sqrt(a) => a.find(id),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.find(id).or_else(|| b.find(id))
            }
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Const(r) if r.is_one())
    }
}

/// Serialized form of a [`RadicalExpr`]; shared sub-trees are written out in full.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Tree {
    Const(#[serde(with = "super::serde_rational")] Rational),
    Var(usize),
    Pi,
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Div(Box<Tree>, Box<Tree>),
    Neg(Box<Tree>),
    Sqrt(Box<Tree>),
}

impl Tree {
    fn of(e: &RadicalExpr) -> Tree {
        let b = |x: &RadicalExpr| Box::new(Tree::of(x));
        match e.node() {
            Node::Const(r) => Tree::Const(r.clone()),
            Node::Var(i) => Tree::Var(*i),
            Node::Pi => Tree::Pi,
            Node::Add(x, y) => Tree::Add(b(x), b(y)),
            Node::Sub(x, y) => Tree::Sub(b(x), b(y)),
            Node::Mul(x, y) => Tree::Mul(b(x), b(y)),
            Node::Div(x, y) => Tree::Div(b(x), b(y)),
            Node::Neg(x) => Tree::Neg(b(x)),
            Node::Sqrt(x) => Tree::Sqrt(b(x)),
        }
    }

    fn build(self) -> RadicalExpr {
        match self {
            Tree::Const(r) => RadicalExpr::constant(r),
            Tree::Var(i) => RadicalExpr::var(i),
            Tree::Pi => RadicalExpr::pi(),
            Tree::Add(x, y) => x.build() + y.build(),
            Tree::Sub(x, y) => x.build() - y.build(),
            Tree::Mul(x, y) => x.build() * y.build(),
            Tree::Div(x, y) => x.build() / y.build(),
            Tree::Neg(x) => -x.build(),
            Tree::Sqrt(x) => x.build().sqrt(),
        }
    }
}

impl Serialize for RadicalExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Tree::of(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadicalExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Tree::deserialize(d)?.build())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $variant:ident) => {
        impl $tr for RadicalExpr {
            type Output = RadicalExpr;
            fn $m(self, rhs: RadicalExpr) -> RadicalExpr {
                RadicalExpr::from_node(Node::$variant(self, rhs))
            }
        }
        impl $tr<&RadicalExpr> for &RadicalExpr {
            type Output = RadicalExpr;
            fn $m(self, rhs: &RadicalExpr) -> RadicalExpr {
                RadicalExpr::from_node(Node::$variant(self.clone(), rhs.clone()))
            }
        }
        impl $tr<&RadicalExpr> for RadicalExpr {
            type Output = RadicalExpr;
            fn $m(self, rhs: &RadicalExpr) -> RadicalExpr {
                RadicalExpr::from_node(Node::$variant(self, rhs.clone()))
            }
        }
        impl $tr<RadicalExpr> for &RadicalExpr {
            type Output = RadicalExpr;
            fn $m(self, rhs: RadicalExpr) -> RadicalExpr {
                RadicalExpr::from_node(Node::$variant(self.clone(), rhs))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl Neg for RadicalExpr {
    type Output = RadicalExpr;
    fn neg(self) -> RadicalExpr {
        RadicalExpr::from_node(Node::Neg(self))
    }
}

impl Neg for &RadicalExpr {
    type Output = RadicalExpr;
    fn neg(self) -> RadicalExpr {
        RadicalExpr::from_node(Node::Neg(self.clone()))
    }
}

impl From<Rational> for RadicalExpr {
    fn from(r: Rational) -> Self {
        RadicalExpr::constant(r)
    }
}

impl From<&QSqrt3> for RadicalExpr {
    fn from(x: &QSqrt3) -> Self {
        RadicalExpr::from_qsqrt3(x)
    }
}

impl fmt::Display for RadicalExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(r) => {
                if r.is_integer() && r >= &Rational::zero() {
                    write!(f, "{}", r)
                } else {
                    write!(f, "({})", r)
                }
            }
            Node::Var(0) => write!(f, "x"),
            Node::Var(i) => write!(f, "x{}", i),
            Node::Pi => write!(f, "π"),
            Node::Neg(a) => write!(f, "-{}", a),
            Node::Sqrt(a) => write!(f, "√({})", a),
            Node::Add(a, b) => write!(f, "({} + {})", a, b),
            Node::Sub(a, b) => write!(f, "({} - {})", a, b),
            Node::Mul(a, b) => write!(f, "{}·{}", a, b),
            Node::Div(a, b) => write!(f, "{}/{}", a, b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_eval_and_derivative() {
        let x = RadicalExpr::var(0);
        let e = (&x * &x + RadicalExpr::int(1)).sqrt();
        assert!((e.eval_f64(&[3.0]) - 10f64.sqrt()).abs() < 1e-15);
        // d/dx √(x²+1) = x/√(x²+1)
        let d = e.diff(0);
        assert!((d.eval_f64(&[3.0]) - 3.0 / 10f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn substitution() {
        let x = RadicalExpr::var(0);
        let e = &x * &x - RadicalExpr::int(2);
        let s = e.subst(0, &RadicalExpr::int(2).sqrt());
        assert!(!s.has_vars());
        assert!(s.eval_f64(&[]).abs() < 1e-15);
    }
}
