use std::collections::HashSet;

use num_traits::Zero;

use super::dyadic::{Interval, IntervalFault};
use super::expr::NodeFault;
use super::{ExactError, Node, QSqrt3, RadicalExpr, Sign, DEFAULT_PRECISION_CAP};
use crate::poly::{annihilating_polynomial, Bound, SturmChain};
use crate::Rational;

/// Environment variable overriding [`DEFAULT_PRECISION_CAP`].
pub const PRECISION_CAP_ENV: &str = "MOBIUS_PRECISION_CAP";

/// Working-precision schedule for interval evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    pub start_precision: u32,
    pub precision_cap: u32,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { start_precision: 64, precision_cap: DEFAULT_PRECISION_CAP }
    }
}

impl EvalConfig {
    /// Default schedule with the cap taken from `MOBIUS_PRECISION_CAP` when set.
    pub fn from_env() -> Self {
        let mut cfg = EvalConfig::default();
        if let Some(cap) = std::env::var(PRECISION_CAP_ENV).ok().and_then(|s| s.parse::<u32>().ok()) {
            cfg.precision_cap = cap.max(cfg.start_precision);
        }
        cfg
    }
}

// Precision from which straddling radicands and divisors are settled exactly.
const EXACT_FALLBACK_PRECISION: u32 = 256;

/// One evaluation at `prec`, resolving straddling sqrt operands exactly once the
/// precision is high enough. `Ok(None)` means "refine further".
fn enclose_resolving(
    expr: &RadicalExpr,
    prec: u32,
    env: &[Interval],
    nonneg: &mut HashSet<usize>,
    cfg: &EvalConfig,
) -> Result<Option<Interval>, ExactError> {
    loop {
        match expr.enclose(prec, env, nonneg) {
            Ok(iv) => return Ok(Some(iv)),
            Err(NodeFault { fault: IntervalFault::NegativeRadicand, .. }) => {
                return Err(ExactError::NegativeRadicand)
            }
            Err(NodeFault { fault: IntervalFault::RadicandStraddlesZero, node }) => {
                if prec < EXACT_FALLBACK_PRECISION {
                    return Ok(None);
                }
                let sub = expr.find(node).expect("fault node belongs to expression");
                let operand = match sub.node() {
                    Node::Sqrt(a) => a,
                    _ => unreachable!("radicand fault raised by a sqrt node"),
                };
                if operand.has_vars() {
                    return Ok(None);
                }
                match sign_with(operand, cfg)? {
                    Sign::Negative => return Err(ExactError::NegativeRadicand),
                    _ => {
                        nonneg.insert(node);
                    }
                }
            }
            Err(NodeFault { fault: IntervalFault::DivisorStraddlesZero, node }) => {
                if prec < EXACT_FALLBACK_PRECISION {
                    return Ok(None);
                }
                if let Some(sub) = expr.find(node) {
                    if let Node::Div(_, den) = sub.node() {
                        if !den.has_vars() && sign_with(den, cfg)? == Sign::Zero {
                            return Err(ExactError::DivisionByZero);
                        }
                    }
                    if let Node::Var(i) = sub.node() {
                        return Err(ExactError::UnboundVariable(*i));
                    }
                }
                return Ok(None);
            }
        }
    }
}

/// Enclosure of a constant expression with width at most `target_width`.
pub fn interval_eval(expr: &RadicalExpr, target_width: &Rational) -> Result<Interval, ExactError> {
    interval_eval_with(expr, target_width, &[], &EvalConfig::from_env())
}

/// As [`interval_eval`], with `env[i]` enclosing `Var(i)` and an explicit schedule.
pub fn interval_eval_with(
    expr: &RadicalExpr,
    target_width: &Rational,
    env: &[Interval],
    cfg: &EvalConfig,
) -> Result<Interval, ExactError> {
    let mut nonneg = HashSet::new();
    let mut prec = cfg.start_precision;
    loop {
        if let Some(iv) = enclose_resolving(expr, prec, env, &mut nonneg, cfg)? {
            if &iv.width() <= target_width {
                return Ok(iv);
            }
        }
        if prec >= cfg.precision_cap {
            return Err(ExactError::NonConvergence(cfg.precision_cap));
        }
        prec = (prec * 2).min(cfg.precision_cap);
    }
}

/// Exact sign of a constant radical expression.
///
/// Interval refinement settles nonzero values; zero is certified through an
/// annihilating polynomial of the value and a Sturm count that leaves no other
/// candidate root inside the enclosure.
pub fn sign_of(expr: &RadicalExpr) -> Result<Sign, ExactError> {
    sign_with(expr, &EvalConfig::from_env())
}

pub(crate) fn sign_with(expr: &RadicalExpr, cfg: &EvalConfig) -> Result<Sign, ExactError> {
    if expr.has_vars() {
        return Err(ExactError::UnboundVariable(0));
    }
    let mut nonneg = HashSet::new();
    let mut prec = cfg.start_precision;
    while prec <= EXACT_FALLBACK_PRECISION.min(cfg.precision_cap) {
        if let Some(iv) = enclose_resolving(expr, prec, &[], &mut nonneg, cfg)? {
            match iv.certain_sign() {
                Some(s) => return Ok(s),
                None => {}
            }
        }
        prec *= 2;
    }
    let poly = if expr.has_pi() {
        None
    } else {
        match annihilating_polynomial(expr) {
            Ok(p) => Some(p),
            Err(_) => None,
        }
    };
    let deflated = match &poly {
        Some(p) if !p.eval(&QSqrt3::zero()).is_zero() => None,
        Some(p) => {
            let q = p.deflate_at_zero();
            if q.degree() == Some(0) {
                return Ok(Sign::Zero);
            }
            Some(SturmChain::new(&q).map_err(|e| ExactError::Unsupported(e.to_string()))?)
        }
        None => None,
    };
    loop {
        if let Some(iv) = enclose_resolving(expr, prec, &[], &mut nonneg, cfg)? {
            if let Some(s) = iv.certain_sign() {
                return Ok(s);
            }
            if let Some(chain) = &deflated {
                let lo = QSqrt3::from_rational(iv.lo_rational());
                let hi = QSqrt3::from_rational(iv.hi_rational());
                if chain.count_roots_closed(&Bound::At(lo), &Bound::At(hi)) == 0 {
                    return Ok(Sign::Zero);
                }
            }
        }
        if prec >= cfg.precision_cap {
            return Err(ExactError::NonConvergence(cfg.precision_cap));
        }
        prec = (prec * 2).min(cfg.precision_cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    fn sqrt(v: i64) -> RadicalExpr {
        RadicalExpr::int(v).sqrt()
    }

    #[test]
    fn easy_signs() {
        assert_eq!(sign_of(&(sqrt(27) - sqrt(11))).unwrap(), Sign::Positive);
        assert_eq!(sign_of(&(sqrt(2) - sqrt(2))).unwrap(), Sign::Zero);
        assert_eq!(sign_of(&(sqrt(2) - RadicalExpr::ratio(3, 2))).unwrap(), Sign::Negative);
    }

    #[test]
    fn hidden_zero_with_nested_radicals() {
        // √(4 − 2√3) − (√3 − 1) = 0
        let e = (RadicalExpr::int(4) - RadicalExpr::int(2) * sqrt(3)).sqrt() - (sqrt(3) - RadicalExpr::int(1));
        assert_eq!(sign_of(&e).unwrap(), Sign::Zero);
        // √2 + √3 − √(5 + 2√6) = 0
        let e = sqrt(2) + sqrt(3) - (RadicalExpr::int(5) + RadicalExpr::int(2) * sqrt(6)).sqrt();
        assert_eq!(sign_of(&e).unwrap(), Sign::Zero);
    }

    #[test]
    fn negative_radicand_is_reported() {
        let e = (sqrt(2) - RadicalExpr::int(2)).sqrt();
        assert_eq!(interval_eval(&e, &ratio(1, 1000)), Err(ExactError::NegativeRadicand));
    }

    #[test]
    fn radicand_exactly_zero_is_allowed() {
        let e = (sqrt(2) * sqrt(2) - RadicalExpr::int(2)).sqrt() + RadicalExpr::int(1);
        let iv = interval_eval(&e, &ratio(1, 1 << 20)).unwrap();
        assert!(iv.contains_rational(&ratio(1, 1)));
    }

    #[test]
    fn known_constants() {
        let a = (sqrt(27) - sqrt(11)) / RadicalExpr::int(4);
        let iv = interval_eval(&a, &ratio(1, 1_000_000)).unwrap();
        assert!(iv.contains_f64(0.469_8) || (iv.midpoint_f64() - 0.469_84).abs() < 1e-4);
        let t0 = -(RadicalExpr::int(2) / sqrt(3) - RadicalExpr::int(1)).sqrt();
        let iv = interval_eval(&t0, &ratio(1, 1_000_000)).unwrap();
        assert!((iv.midpoint_f64() + 0.393_32).abs() < 1e-5);
    }

    #[test]
    fn pi_comparisons() {
        let e = RadicalExpr::pi() / RadicalExpr::int(2) - sqrt(3);
        assert_eq!(sign_of(&e).unwrap(), Sign::Negative);
    }
}
