//! Minimizing `max(f, g)` over `D = {b ≥ t}` along the curve `f = g`.
//!
//! One-variable expressions here use `x0 = t`.

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certs::{CertReport, Check};
use crate::exactnum::{interval_eval, ratio, serde_rational, ExactError, Interval, QSqrt3, RadicalExpr, Sign};
use crate::poly::{eliminate_radicals, Bound, PolyError};
use crate::Rational;

#[derive(Debug, Error)]
pub enum LambdaError {
    #[error("t = {0} is outside D* = (−∞, 1/√3)")]
    OutOfDomain(QSqrt3),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("grid step must be positive")]
    BadStep,
}

fn t() -> RadicalExpr {
    RadicalExpr::var(0)
}

fn k(v: i64) -> RadicalExpr {
    RadicalExpr::int(v)
}

fn big_t() -> RadicalExpr {
    (k(1) + t().square()).sqrt()
}

fn inv_sqrt3() -> QSqrt3 {
    QSqrt3::from_ratios(0, 1, 1, 3)
}

/// Position of `t` relative to `±1/√3`.
fn check_domain(tv: &QSqrt3) -> Result<(), LambdaError> {
    if (tv.clone() - inv_sqrt3()).sign() != Sign::Negative {
        return Err(LambdaError::OutOfDomain(tv.clone()));
    }
    Ok(())
}

/// `β(t) = (t³ − T³ − 3t)/(3t² − 1)` as an expression in `x0 = t`.
pub fn beta_expr() -> RadicalExpr {
    (t().powi(3) - big_t().powi(3) - k(3) * t()) / (k(3) * t().square() - k(1))
}

/// `φ*(t) = 2T(t² − tT − 1)/(3t² − 1)`, in the equivalent form
/// `2T/(1 − t² − tT)` whose denominator vanishes on `D*` only at `1/√3`.
pub fn phi_star_expr() -> RadicalExpr {
    let tt = big_t();
    k(2) * tt.clone() / (k(1) - t().square() - t() * tt)
}

/// The reference form `2T(t² − tT − 1)/(3t² − 1)`.
pub fn phi_star_reference_expr() -> RadicalExpr {
    let tt = big_t();
    k(2) * tt.clone() * (t().square() - t() * tt - k(1)) / (k(3) * t().square() - k(1))
}

/// `b = β(t)` solving `f(b, t) = g(b, t)`; the removable singularity at
/// `t = −1/√3` takes the value 0.
pub fn beta(tv: &QSqrt3) -> Result<RadicalExpr, LambdaError> {
    check_domain(tv)?;
    if (tv.clone() + inv_sqrt3()).is_zero() {
        return Ok(k(0));
    }
    Ok(beta_expr().subst(0, &RadicalExpr::from_qsqrt3(tv)))
}

/// `φ*(t) = f(β(t), t)`.
pub fn phi_star(tv: &QSqrt3) -> Result<RadicalExpr, LambdaError> {
    check_domain(tv)?;
    Ok(phi_star_expr().subst(0, &RadicalExpr::from_qsqrt3(tv)))
}

/// `dφ*/dt`.
pub fn dphi_star_expr() -> RadicalExpr {
    phi_star_expr().diff(0)
}

/// `t₀ = −√(2/√3 − 1)`.
pub fn t0_closed_form() -> RadicalExpr {
    -(k(2) / RadicalExpr::sqrt3() - k(1)).sqrt()
}

/// `λ₁ = (2√(4 − 2√3) + 4)/(∜3·√2 + 2√(2√3 − 3))`, with `∜3·√2 = √(2√3)`.
pub fn lambda1_closed_form() -> RadicalExpr {
    let s3 = RadicalExpr::sqrt3();
    (k(2) * (k(4) - k(2) * s3.clone()).sqrt() + k(4))
        / ((k(2) * s3.clone()).sqrt() + k(2) * (k(2) * s3 - k(3)).sqrt())
}

/// Certified optimum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub t0: Interval,
    pub lambda1: Interval,
    pub lambda1_closed_form: RadicalExpr,
    /// Filled in by [`grid_min_oracle`] when requested.
    #[serde(with = "option_rational")]
    pub oracle_min: Option<Rational>,
    pub certificate: CertReport,
}

mod option_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "serde_rational")] Rational);

    pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        v.clone().map(W).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

const ANCHOR: &str = "min_D φ = λ_1";

/// Enclosure of `t₀` with the certificate that it is the only critical
/// point of `φ*` on `D*`.
pub fn critical_point_certificate(width: &Rational) -> (Result<Interval, LambdaError>, CertReport) {
    let mut r = CertReport::new("critical_point");
    let d = dphi_star_expr();
    match eliminate_radicals(&d) {
        Ok(p) => {
            r.step(ANCHOR, "dφ*/dt = 0 only if its elimination polynomial vanishes", Check::Elimination { expr: d.clone(), poly: p });
        }
        Err(e) => r.fail(ANCHOR, "eliminate radicals from dφ*/dt", e.to_string()),
    }
    r.step(ANCHOR, "dφ*/dt has exactly one zero in D* = (−∞, 1/√3)", Check::ZeroCount {
        expr: d.clone(),
        lo: Bound::NegInf,
        hi: Bound::At(inv_sqrt3()),
        count: 1,
    });
    let t0 = t0_closed_form();
    r.step(ANCHOR, "the zero is t₀ = −√(2/√3 − 1)", Check::Sign { expr: d.subst(0, &t0), sign: Sign::Zero });
    r.step(ANCHOR, "t₀ ≈ −0.39332", Check::Enclosure { expr: t0.clone(), lo: ratio(-393330, 1_000_000), hi: ratio(-393310, 1_000_000) });
    (interval_eval(&t0, width).map_err(Into::into), r)
}

/// `λ₁` to the requested width, with the certificate chain behind it.
pub fn lambda1(width: &Rational) -> Result<OptimizationResult, LambdaError> {
    let start = std::time::Instant::now();
    let (t0, mut r) = critical_point_certificate(width);
    let t0 = t0?;
    r.id = "lambda1".into();
    let phi = phi_star_expr();
    let den = k(1) - t().square() - t() * big_t();
    r.step(ANCHOR, "the rationalized φ* agrees with 2T(t² − tT − 1)/(3t² − 1) at t = 0", Check::Sign {
        expr: (phi.clone() - phi_star_reference_expr()).subst(0, &k(0)),
        sign: Sign::Zero,
    });
    r.step(ANCHOR, "the denominator 1 − t² − tT vanishes only at ±1/√3 (elimination 1 − 3t²)", Check::Elimination {
        expr: den.clone(),
        poly: crate::QPoly::new(vec![QSqrt3::from_int(1), QSqrt3::zero(), QSqrt3::from_int(-3)]),
    });
    r.step(ANCHOR, "1 − t² − tT > 0 on D* (value at t = 0)", Check::Sign { expr: den.subst(0, &k(0)), sign: Sign::Positive });
    r.step(ANCHOR, "1 − t² − tT = 0 at t = 1/√3, so φ* → +∞ there", Check::Sign {
        expr: den.subst(0, &RadicalExpr::from_qsqrt3(&inv_sqrt3())),
        sign: Sign::Zero,
    });
    r.step(ANCHOR, "1 − t² − tT is not zero at t = −1/√3 (removable singularity)", Check::Sign {
        expr: den.subst(0, &RadicalExpr::from_qsqrt3(&-inv_sqrt3())),
        sign: Sign::Positive,
    });
    r.step(ANCHOR, "φ*(−1/√3) = √3", Check::Sign {
        expr: phi.subst(0, &RadicalExpr::from_qsqrt3(&-inv_sqrt3())) - RadicalExpr::sqrt3(),
        sign: Sign::Zero,
    });
    let closed = lambda1_closed_form();
    let at_t0 = phi.subst(0, &t0_closed_form());
    r.step(ANCHOR, "φ*(t₀) = λ₁", Check::Sign { expr: at_t0 - closed.clone(), sign: Sign::Zero });
    r.step(ANCHOR, "λ₁ ≈ 1.69497", Check::Enclosure { expr: closed.clone(), lo: ratio(169497, 100_000), hi: ratio(169498, 100_000) });
    r.step(ANCHOR, "λ₁ < √3 = φ*(−1/√3), so the minimum is interior", Check::Sign {
        expr: RadicalExpr::sqrt3() - closed.clone(),
        sign: Sign::Positive,
    });
    r.step(ANCHOR, "λ₁ > √3 − 1/26", Check::Sign {
        expr: closed.clone() - RadicalExpr::sqrt3() + RadicalExpr::ratio(1, 26),
        sign: Sign::Positive,
    });
    r.step(ANCHOR, "λ₁ > (1 + √5)/2", Check::Sign {
        expr: closed.clone() - (k(1) + k(5).sqrt()) / k(2),
        sign: Sign::Positive,
    });
    let lambda1 = interval_eval(&closed, width)?;
    r.wall_time = start.elapsed();
    Ok(OptimizationResult { t0, lambda1, lambda1_closed_form: closed, oracle_min: None, certificate: r })
}

/// `max(f, g)` in floating point.
pub fn phi_f64(b: f64, t: f64) -> f64 {
    let tt = (1.0 + t * t).sqrt();
    let f = b - t + tt;
    let g = -b + t + (4.0 * (1.0 + b * b) + tt * tt).sqrt();
    f.max(g)
}

/// Minimum of `max(f, g)` over the grid points of `b_range × t_range` with
/// spacing `step` and `b ≥ t`.
pub fn grid_min_oracle(
    b_range: (Rational, Rational),
    t_range: (Rational, Rational),
    step: &Rational,
) -> Result<Rational, LambdaError> {
    if step <= &Rational::zero() {
        return Err(LambdaError::BadStep);
    }
    let count = |lo: &Rational, hi: &Rational| ((hi - lo) / step).floor().to_integer().to_usize().unwrap_or(0);
    let nb = count(&b_range.0, &b_range.1);
    let nt = count(&t_range.0, &t_range.1);
    let to_f = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
    let (b0, t0, h) = (to_f(&b_range.0), to_f(&t_range.0), to_f(step));
    let best = (0..=nb)
        .into_par_iter()
        .map(|i| {
            let b = b0 + i as f64 * h;
            (0..=nt)
                .map(|j| t0 + j as f64 * h)
                .filter(|&t| b >= t)
                .map(|t| phi_f64(b, t))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(Rational::from_float(best).unwrap_or_else(Rational::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::sign_of;

    fn approx(e: &RadicalExpr) -> f64 {
        interval_eval(e, &ratio(1, 1_000_000_000)).unwrap().midpoint_f64()
    }

    #[test]
    fn beta_values() {
        assert_eq!(sign_of(&beta(&-inv_sqrt3()).unwrap()).unwrap(), Sign::Zero);
        assert_eq!(sign_of(&(beta(&QSqrt3::zero()).unwrap() - k(1))).unwrap(), Sign::Zero);
        assert!(matches!(beta(&inv_sqrt3()), Err(LambdaError::OutOfDomain(_))));
    }

    #[test]
    fn phi_star_values() {
        let s = phi_star(&-inv_sqrt3()).unwrap() - RadicalExpr::sqrt3();
        assert_eq!(sign_of(&s).unwrap(), Sign::Zero);
        assert_eq!(sign_of(&(phi_star(&QSqrt3::zero()).unwrap() - k(2))).unwrap(), Sign::Zero);
        // agrees with the reference form away from ±1/√3
        let tv = RadicalExpr::ratio(-2, 5);
        let diff = phi_star_expr().subst(0, &tv) - phi_star_reference_expr().subst(0, &tv);
        assert_eq!(sign_of(&diff).unwrap(), Sign::Zero);
    }

    #[test]
    fn f_equals_g_along_beta() {
        for tv in [ratio(-3, 1), ratio(-1, 2), ratio(0, 1), ratio(1, 2)] {
            let be = beta(&QSqrt3::from_rational(tv.clone())).unwrap();
            let tvx = RadicalExpr::constant(tv);
            let f = crate::region::f_expr().subst(0, &be).subst(1, &tvx);
            let g = crate::region::g_expr().subst(0, &be).subst(1, &tvx);
            assert_eq!(sign_of(&(f.clone() - g)).unwrap(), Sign::Zero);
            let phi = phi_star_expr().subst(0, &tvx);
            assert_eq!(sign_of(&(f - phi)).unwrap(), Sign::Zero);
        }
    }

    #[test]
    fn lambda1_certifies() {
        let res = lambda1(&ratio(1, 1_000_000_000_000)).unwrap();
        assert!(res.certificate.is_verified(), "{}", res.certificate);
        assert!(res.lambda1.width() <= ratio(1, 1_000_000_000_000));
        assert!((res.lambda1.midpoint_f64() - 1.69497).abs() < 1e-5);
        assert!((res.lambda1.midpoint_f64() - lambda1_closed_form().eval_f64(&[])).abs() < 1e-12);
        assert!((approx(&t0_closed_form()) + 0.39332).abs() < 1e-5);
    }

    #[test]
    fn oracle_boundary_slice() {
        // On b = t only: g(b, b) = √5·B, minimized at b = 0.
        let v = (0..=1000).map(|i| phi_f64(i as f64 / 1000.0, i as f64 / 1000.0)).fold(f64::INFINITY, f64::min);
        assert!((v - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_is_not_below_fine_grid() {
        let br = (ratio(-1, 1), ratio(1, 1));
        let tr = (ratio(-1, 1), ratio(0, 1));
        let coarse = grid_min_oracle(br.clone(), tr.clone(), &ratio(1, 10)).unwrap();
        let fine = grid_min_oracle(br, tr, &ratio(1, 100)).unwrap();
        assert!(coarse >= fine);
    }
}
