use num_integer::Integer;
use num_traits::{Float, One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::report::{CertReport, Check};
use crate::exactnum::{ratio, QSqrt3, RadicalExpr, Sign};
use crate::poly::{eliminate_radicals, eliminate_radicals_bivar, Bound, PolyError};
use crate::region::{self, boundary_t_symbolic, right_vertex_b, Branch};
use crate::{QBivarPoly, QPoly, Rational};

#[derive(Debug, Error)]
pub enum CertError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{} monomials differ from the reference: {}", .0.len(), .0.join(", "))]
    MismatchAgainstReference(Vec<String>),
}

fn q(a: i64, r: i64) -> QSqrt3 {
    QSqrt3::from_ratios(a, 1, r, 1)
}

fn b() -> RadicalExpr {
    RadicalExpr::var(0)
}

fn t() -> RadicalExpr {
    RadicalExpr::var(1)
}

fn k(v: i64) -> RadicalExpr {
    RadicalExpr::int(v)
}

/// The reference constraint polynomial `P(b, t)`.
pub fn reference_p() -> QBivarPoly {
    QBivarPoly::from_terms([
        (q(4, 0), 6, 0),
        (q(-8, 0), 5, 1),
        (q(-16, 0), 5, 0),
        (q(20, 0), 4, 1),
        (q(12, 12), 4, 0),
        (q(-8, -24), 3, 1),
        (q(-8, -24), 3, 0),
        (q(9, 0), 2, 2),
        (q(12, 30), 2, 1),
        (q(59, -12), 2, 0),
        (q(18, 0), 1, 3),
        (q(-42, 0), 1, 1),
        (q(0, -12), 1, 0),
        (q(27, 0), 0, 2),
        (q(0, 18), 0, 1),
        (q(9, 0), 0, 0),
    ])
}

/// `(b − t + T)·ψ̂` written without division:
/// `2 + b² + t² + bT − tT + (b − t + T)(b(1 − 2b)/3 − √3)`.
pub fn cleared_psi_hat_expr() -> RadicalExpr {
    let tt = region::big_t();
    k(2) + b().square() + t().square() + b() * tt.clone() - t() * tt.clone()
        + (b() - t() + tt) * (region::correction_expr() - RadicalExpr::sqrt3())
}

/// Scale a polynomial over ℚ(√3) so that all rational components are coprime
/// integers and the lowest monomial has a positive coefficient.
pub fn primitive_part(p: &QBivarPoly) -> QBivarPoly {
    let mut den = num_bigint::BigInt::one();
    let mut num = num_bigint::BigInt::zero();
    for (_, c) in p.terms() {
        for r in [&c.a, &c.b] {
            den = den.lcm(r.denom());
        }
    }
    for (_, c) in p.terms() {
        for r in [&c.a, &c.b] {
            let scaled = r * Rational::from_integer(den.clone());
            num = num.gcd(scaled.numer());
        }
    }
    if num.is_zero() {
        return p.clone();
    }
    let mut f = QSqrt3::from_rational(Rational::new(den, num));
    if let Some((_, c)) = p.terms().next() {
        if c.sign() == Sign::Negative {
            f = -f;
        }
    }
    p.scale(&f)
}

/// The elimination polynomial of `(b − t + T)·ψ̂`, normalized by
/// [`primitive_part`], compared monomial by monomial with [`reference_p`].
pub fn expand_p() -> Result<QBivarPoly, CertError> {
    let p = primitive_part(&eliminate_radicals_bivar(&cleared_psi_hat_expr())?);
    let diffs = p.differences(&reference_p());
    if diffs.is_empty() {
        Ok(p)
    } else {
        Err(CertError::MismatchAgainstReference(
            diffs.iter().map(|(i, j, ours, theirs)| format!("b^{i}t^{j}: {ours} vs {theirs}")).collect(),
        ))
    }
}

/// Coefficient-for-coefficient comparison of the expanded `P` with the
/// reference one.
pub fn expand_p_certificate() -> CertReport {
    let start = std::time::Instant::now();
    let mut r = CertReport::new("expand_p");
    let mismatches = match expand_p() {
        Ok(_) => 0,
        Err(CertError::MismatchAgainstReference(v)) => v.len(),
        Err(e) => {
            r.fail("4 b⁶−8 b⁵t", "expand P", e.to_string());
            return r;
        }
    };
    r.step("4 b⁶−8 b⁵t", "coefficients differing from the reference P", Check::Numeric {
        quantity: "mismatch count".into(),
        value: mismatches as f64,
        lo: Some(0.0),
        hi: Some(0.0),
        tolerance: 0.0,
    });
    r.wall_time = start.elapsed();
    r
}

/// Every certificate with its id, in a fixed order.
pub fn all_certificates() -> Vec<(&'static str, fn() -> CertReport)> {
    vec![
        ("trapezoid", crate::region::trapezoid_certificate as fn() -> CertReport),
        ("expand_p", expand_p_certificate),
        ("statement1", statement1_certificate),
        ("statement2_x", statement2_x_certificate),
        ("statement2_y", statement2_y_certificate),
        ("statement3", statement3_certificate),
    ]
}

fn d_t(p: &QBivarPoly, n: usize) -> QBivarPoly {
    (0..n).fold(p.clone(), |acc, _| acc.diff_t())
}

fn coeffs(v: &[QSqrt3]) -> QPoly {
    QPoly::new(v.to_vec()).with_var('b')
}

const S1: &str = "S_j ≥ √3 − b(1−2b)/3";

/// `ψ̂ ≥ 0` on Ω, via positivity of `P` on Ω.
pub fn statement1_certificate() -> CertReport {
    let start = std::time::Instant::now();
    let mut r = CertReport::new("statement1");
    let cleared = cleared_psi_hat_expr();
    let raw = match eliminate_radicals_bivar(&cleared) {
        Ok(p) => p,
        Err(e) => {
            r.fail(S1, "eliminate radicals from (b − t + T)ψ̂", e.to_string());
            return r;
        }
    };
    r.step(S1, "ψ̂ = 0 only if the elimination polynomial of (b − t + T)ψ̂ vanishes", Check::BivarElimination {
        expr: cleared.clone(),
        poly: raw.clone(),
    });
    let p = primitive_part(&raw);
    let factor = raw.coeff(6, 0) / p.coeff(6, 0);
    r.step(S1, "the elimination polynomial is a constant multiple of the reference P", Check::BivarProportional {
        computed: raw,
        expected: reference_p(),
        factor,
    });
    let anchor = region::SlopePoint::anchor();
    r.step(S1, "b − t + T > 0 at (0, −1/√3)", Check::Sign {
        expr: anchor.apply(&(b() - t() + region::big_t())),
        sign: Sign::Positive,
    });
    r.step(S1, "ψ̂(0, −1/√3) = 0", Check::Sign { expr: anchor.apply(&region::psi_hat_expr()), sign: Sign::Zero });
    let sample = region::SlopePoint::rational(ratio(1, 5), ratio(-2, 5));
    r.step(S1, "ψ̂ > 0 at the interior point (1/5, −2/5)", Check::Sign {
        expr: sample.apply(&region::psi_hat_expr()),
        sign: Sign::Positive,
    });

    // Reach: Ω lies above the lower trapezoid edge, which carries Z, and in 0 < b < a < 1/2.
    r.step(S1, "a < 1/2, so vertical rays from Z = {t = (2/3)b − 1/√3, 0 < b < 1/2} cover Ω", Check::Sign {
        expr: RadicalExpr::ratio(1, 2) - right_vertex_b(),
        sign: Sign::Positive,
    });

    let half = QSqrt3::from_ratios(1, 2, 0, 1);
    let p3 = d_t(&p, 3);
    r.step(S1, "P''' = 108b", Check::BivarProportional {
        computed: p3,
        expected: QBivarPoly::monomial(QSqrt3::from_int(108), 1, 0),
        factor: QSqrt3::one(),
    });
    r.step(S1, "108b > 0 for 0 < b < 1/2", Check::Positive {
        poly: coeffs(&[q(0, 0), q(108, 0)]),
        lo: QSqrt3::zero(),
        hi: half.clone(),
    });

    let m = QSqrt3::from_ratios(2, 3, 0, 1);
    let c = QSqrt3::from_ratios(0, 1, -1, 3);
    let reference: [(usize, &str, QPoly, QSqrt3); 3] = [
        (2, "P'' on Z = 54 − 36√3 b + 90b²", coeffs(&[q(54, 0), q(0, -36), q(90, 0)]), QSqrt3::one()),
        (
            1,
            "P' on Z = b(12 + 12b + 28b² − 24√3 b²) + b⁴(20 − 8b)",
            coeffs(&[q(0, 0), q(12, 0), q(12, 0), q(28, -24), q(20, 0), q(-8, 0)]),
            QSqrt3::one(),
        ),
        (
            0,
            "(3/4)P on Z = b²(21 − 12√3 + 18b − 10√3 b + 12b² − 8√3 b² − 2b³) + b⁵(2√3 − b)",
            coeffs(&[q(0, 0), q(0, 0), q(21, -12), q(18, -10), q(12, -8), q(-2, 2), q(-1, 0)]),
            QSqrt3::from_ratios(4, 3, 0, 1),
        ),
    ];
    for (order, desc, expected, factor) in reference {
        let on_z = d_t(&p, order).restrict_to_line(&m, &c).with_var('b');
        r.step(S1, desc, Check::PolyProportional { computed: on_z.clone(), expected, factor });
        r.step(S1, &format!("∂^{order}P/∂t^{order} > 0 on Z"), Check::Positive { poly: on_z, lo: QSqrt3::zero(), hi: half.clone() });
    }
    r.wall_time = start.elapsed();
    r
}

/// `T/2 + √((B + x)² + T²/4) − √3` at `x = 1/18` on `t = (2/3)b − 1/2`.
pub fn statement2_x_phi() -> RadicalExpr {
    let x = RadicalExpr::ratio(1, 18);
    let tt = region::big_t();
    let f = tt.clone() / k(2) + ((region::big_b() + x).square() + tt.square() / k(4)).sqrt() - RadicalExpr::sqrt3();
    f.subst(1, &upper_line())
}

/// `√(B² + (T/2 + y)²) + T/2 + y − √3` at `y = 1/30` on `t = (2/3)b − 1/2`.
pub fn statement2_y_h() -> RadicalExpr {
    let y = RadicalExpr::ratio(1, 30);
    let tt = region::big_t();
    let h = (region::big_b().square() + (tt.clone() / k(2) + y.clone()).square()).sqrt() + tt / k(2) + y
        - RadicalExpr::sqrt3();
    h.subst(1, &upper_line())
}

fn upper_line() -> RadicalExpr {
    RadicalExpr::ratio(2, 3) * b() - RadicalExpr::ratio(1, 2)
}

/// The reference degree-8 polynomial.
pub fn reference_degree8() -> QPoly {
    let v: [i64; 9] = [
        379204871936,
        -2821217402880,
        -3788174241792,
        59974706921472,
        -81516306161664,
        -11284439629824,
        30126667530240,
        0,
        -2821109907456,
    ];
    QPoly::new(v.iter().map(|&c| QSqrt3::from_int(c)).collect()).with_var('b')
}

/// The reference quartic.
pub fn reference_quartic() -> QPoly {
    coeffs(&[q(-79, 80), q(-600, 0), q(1600, -40), q(0, 0), q(-300, 0)])
}

const S2: &str = "x < 1/18 and |y| < 1/30";

fn downward_monotone_step(r: &mut CertReport, what: &str, value: impl Fn(f64, f64) -> f64) {
    // Both functions depend on t only through T, increase with T, and T
    // decreases in t for t < 0.
    let omega = region::OmegaRegion::default();
    let n = 40;
    let (mut samples, mut failures) = (0, 0);
    for i in 1..n {
        for j in 1..n {
            let bv = 0.47 * i as f64 / n as f64;
            let tv = -0.6 + 0.5 * j as f64 / n as f64;
            if !omega.in_trapezoid_f64(bv, tv) {
                continue;
            }
            samples += 1;
            let h = 1e-6;
            if value(bv, tv + h) >= value(bv, tv) {
                failures += 1;
            }
        }
    }
    r.step(S2, &format!("{what} decreases in t on the trapezoid (depends on t through T, and T decreases for t < 0)"), Check::Sampled {
        description: format!("finite differences of {what} on a grid of the trapezoid"),
        samples,
        failures,
    });
}

fn proportional_step(r: &mut CertReport, desc: &str, computed: &QPoly, expected: QPoly) {
    match expected.proportional_factor(computed) {
        Some(factor) => {
            r.step(S2, desc, Check::PolyProportional { computed: computed.clone(), expected, factor });
        }
        None => r.fail(S2, desc, format!("elimination gives {computed}, not a multiple of {expected}")),
    }
}

/// `x < 1/18`: `φ(b) > 0` on `[0, 1/2]`.
pub fn statement2_x_certificate() -> CertReport {
    let start = std::time::Instant::now();
    let mut r = CertReport::new("statement2_x");
    let phi = statement2_x_phi();
    downward_monotone_step(&mut r, "T/2 + √((B + 1/18)² + T²/4)", |bv, tv| {
        let bb = (1.0 + bv * bv).sqrt() + 1.0 / 18.0;
        let tt = (1.0 + tv * tv).sqrt();
        tt / 2.0 + (bb * bb + tt * tt / 4.0).sqrt()
    });
    r.step(S2, "Ω lies below Z = {t = (2/3)b − 1/2} with 0 < b < a < 1/2", Check::Sign {
        expr: RadicalExpr::ratio(1, 2) - right_vertex_b(),
        sign: Sign::Positive,
    });
    r.step(S2, "φ(0) > 0", Check::Sign { expr: phi.subst(0, &k(0)), sign: Sign::Positive });
    let p = match eliminate_radicals(&phi) {
        Ok(p) => p.with_var('b'),
        Err(e) => {
            r.fail(S2, "eliminate radicals from φ", e.to_string());
            return r;
        }
    };
    r.step(S2, "φ = 0 only if the degree-8 elimination polynomial vanishes", Check::Elimination { expr: phi.clone(), poly: p.clone() });
    proportional_step(&mut r, "the elimination polynomial matches the reference degree-8 polynomial", &p, reference_degree8());
    let z = QSqrt3::zero();
    let half = QSqrt3::from_ratios(1, 2, 0, 1);
    r.step(S2, "no root on [0, 1/2]", Check::RootCount { poly: p.clone(), lo: Bound::At(z), hi: Bound::At(half), count: 0 });
    r.step(S2, "no root on [−1/8, 0.624324]", Check::RootCount {
        poly: p.clone(),
        lo: Bound::At(QSqrt3::from_ratios(-1, 8, 0, 1)),
        hi: Bound::At(QSqrt3::from_ratios(624324, 1_000_000, 0, 1)),
        count: 0,
    });
    r.step(S2, "the closest root lies in [0.624324, 0.624326]", Check::RootCount {
        poly: p,
        lo: Bound::At(QSqrt3::from_ratios(624324, 1_000_000, 0, 1)),
        hi: Bound::At(QSqrt3::from_ratios(624326, 1_000_000, 0, 1)),
        count: 1,
    });
    r.wall_time = start.elapsed();
    r
}

/// `|y| < 1/30`: `h(b) > 0` on `[0, 1/2]`. The bound is on `|y|` after the
/// reflection `(x, y) ↦ (x, −y)` that makes `y ≥ 0`.
pub fn statement2_y_certificate() -> CertReport {
    let start = std::time::Instant::now();
    let mut r = CertReport::new("statement2_y");
    let h = statement2_y_h();
    downward_monotone_step(&mut r, "√(B² + (T/2 + 1/30)²) + T/2", |bv, tv| {
        let tt = (1.0 + tv * tv).sqrt();
        (1.0 + bv * bv + (tt / 2.0 + 1.0 / 30.0).powi(2)).sqrt() + tt / 2.0
    });
    r.step(S2, "h(0) > 0", Check::Sign { expr: h.subst(0, &k(0)), sign: Sign::Positive });
    let p = match eliminate_radicals(&h) {
        Ok(p) => p.with_var('b'),
        Err(e) => {
            r.fail(S2, "eliminate radicals from h", e.to_string());
            return r;
        }
    };
    r.step(S2, "h = 0 only if the quartic elimination polynomial vanishes", Check::Elimination { expr: h.clone(), poly: p.clone() });
    proportional_step(&mut r, "the elimination polynomial matches the reference quartic", &p, reference_quartic());
    r.step(S2, "exactly two real roots", Check::RootCount { poly: p.clone(), lo: Bound::NegInf, hi: Bound::PosInf, count: 2 });
    r.step(S2, "one negative root", Check::RootCount { poly: p.clone(), lo: Bound::NegInf, hi: Bound::At(QSqrt3::zero()), count: 1 });
    r.step(S2, "no root on [0, 1/2]", Check::RootCount {
        poly: p.clone(),
        lo: Bound::At(QSqrt3::zero()),
        hi: Bound::At(QSqrt3::from_ratios(1, 2, 0, 1)),
        count: 0,
    });
    r.step(S2, "the positive root lies in [2, 21/10], outside [0, 1/2]", Check::RootCount {
        poly: p,
        lo: Bound::At(QSqrt3::from_int(2)),
        hi: Bound::At(QSqrt3::from_ratios(21, 10, 0, 1)),
        count: 1,
    });
    r.wall_time = start.elapsed();
    r
}

/// The convex hull of the two bend images of a T-pattern: a vertical base of
/// length `T`, a horizontal altitude of length `B + x` whose foot is `|y|`
/// from the base midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullTriangle<S> {
    pub base: S,
    pub altitude: S,
    pub foot_offset: S,
}

impl<S: Float> HullTriangle<S> {
    pub fn new(base: S, altitude: S, foot_offset: S) -> Self {
        HullTriangle { base, altitude, foot_offset: foot_offset.abs() }
    }

    /// The hull is a triangle with the altitude foot inside the base.
    pub fn is_triangle(&self) -> bool {
        let two = S::one() + S::one();
        self.base > S::zero() && self.altitude > S::zero() && self.foot_offset < self.base / two
    }

    fn halves(&self) -> (S, S) {
        let two = S::one() + S::one();
        (self.base / two - self.foot_offset, self.base / two + self.foot_offset)
    }

    /// Angles at the two base vertices, nearer one first.
    pub fn base_angles(&self) -> (S, S) {
        let (near, far) = self.halves();
        ((self.altitude / near).atan(), (self.altitude / far).atan())
    }

    /// Angle at the apex opposite the base.
    pub fn apex_angle(&self) -> S {
        let (near, far) = self.halves();
        (near / self.altitude).atan() + (far / self.altitude).atan()
    }

    pub fn min_angle(&self) -> S {
        let (a, b) = self.base_angles();
        a.min(b).min(self.apex_angle())
    }
}

const S3: &str = "minimum angle greater than π/4";

/// `(B + 1/18)/T` along the upper boundary `t = t_g(b)` of Ω.
pub fn ratio_on_upper_boundary() -> RadicalExpr {
    let tg = boundary_t_symbolic(Branch::G);
    (region::big_b() + RadicalExpr::ratio(1, 18)) / (k(1) + tg.square()).sqrt()
}

/// Every angle of the hull triangle exceeds `π/4`.
pub fn statement3_certificate() -> CertReport {
    let start = std::time::Instant::now();
    let mut r = CertReport::new("statement3");
    let s3 = RadicalExpr::sqrt3();
    r.step(S3, "|y| < 1/30 < 1/8", Check::Sign { expr: RadicalExpr::ratio(1, 8) - RadicalExpr::ratio(1, 30), sign: Sign::Positive });
    r.step(S3, "Ω lies above t = (2/3)b − 1/√3 ≥ −1/√3 and below t = (2/3)b − 1/2 < 0, so |t| < 1/√3", Check::Sign {
        expr: RadicalExpr::ratio(1, 2) - RadicalExpr::ratio(2, 3) * right_vertex_b(),
        sign: Sign::Positive,
    });
    r.step(S3, "base T < √(1 + 1/3) < 5/4", Check::Sign {
        expr: RadicalExpr::ratio(5, 4) - (k(1) + (k(1) / s3.clone()).square()).sqrt(),
        sign: Sign::Positive,
    });
    r.step(S3, "the foot is at most 5/8 + 1/8 = 3/4 from either base vertex; the altitude B + x is at least 1", Check::Sign {
        expr: RadicalExpr::ratio(3, 4) - RadicalExpr::ratio(5, 8) - RadicalExpr::ratio(1, 8),
        sign: Sign::Zero,
    });
    r.step(S3, "top and bottom angles exceed arctan(4/3) > π/4", Check::ArctanSumExceedsQuarterPi { u: ratio(4, 3), v: ratio(0, 1) });

    let rho = ratio_on_upper_boundary();
    let a = right_vertex_b();
    r.step(S3, "for fixed b, (B + 1/18)/T is largest where |t| is smallest, on the upper boundary t = t_g(b)", Check::Sign {
        expr: boundary_t_symbolic(Branch::G).subst(0, &a),
        sign: Sign::Negative,
    });
    r.step(S3, "the ratio at the right vertex is in (1.125, 1.13)", Check::Enclosure {
        expr: rho.subst(0, &a),
        lo: ratio(1125, 1000),
        hi: ratio(113, 100),
    });
    r.step(S3, "1.13 − (B + 1/18)/T_g > 0 on [0, 47/100] ⊃ [0, a]", Check::SignOnSegment {
        expr: RadicalExpr::ratio(113, 100) - rho,
        lo: QSqrt3::zero(),
        hi: QSqrt3::from_ratios(47, 100, 0, 1),
        sample: QSqrt3::from_ratios(1, 4, 0, 1),
        sign: Sign::Positive,
    });
    r.step(S3, "left angle ≥ arctan((3/8)/1.13) + arctan((5/8)/1.13) > π/4", Check::ArctanSumExceedsQuarterPi {
        u: ratio(75, 226),
        v: ratio(125, 226),
    });
    r.wall_time = start.elapsed();
    r
}

/// Lengths measured on a T-pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TPatternMeasurements {
    pub big_b: f64,
    pub big_t: f64,
    pub b: f64,
    pub t: f64,
    pub l: [f64; 2],
    pub r: [f64; 2],
    pub x: f64,
    pub y: f64,
    pub eps: f64,
}

impl TPatternMeasurements {
    /// `S_j = L_j + R_j` for `j ∈ {1, 2}`.
    pub fn s(&self, j: usize) -> f64 {
        self.l[j - 1] + self.r[j - 1]
    }

    /// `λ = (S₁ + S₂)/2`.
    pub fn lambda(&self) -> f64 {
        (self.s(1) + self.s(2)) / 2.0
    }

    /// `R₁ + R₂ ≥ T`.
    pub fn right_arcs_ok(&self, tol: f64) -> bool {
        self.r[0] + self.r[1] >= self.big_t - tol
    }

    /// `L₁ + L₂ ≥ 2√(B² + T²/4)`.
    pub fn left_arcs_ok(&self, tol: f64) -> bool {
        self.l[0] + self.l[1] >= 2.0 * (self.big_b.powi(2) + self.big_t.powi(2) / 4.0).sqrt() - tol
    }
}

/// Relative tolerance for the floating-point constraint checks.
pub const MEASURE_TOL: f64 = 1e-9;

/// `B² − L_j² + (T − R_j)² ≤ 0`.
pub fn const3_check(m: &TPatternMeasurements, j: usize) -> bool {
    let v = m.big_b.powi(2) - m.l[j - 1].powi(2) + (m.big_t - m.r[j - 1]).powi(2);
    v <= MEASURE_TOL * (1.0 + m.l[j - 1].powi(2))
}

/// `S_j + b(1 − 2b)/3 − √3 ≥ 0`.
pub fn s_bound(m: &TPatternMeasurements, j: usize) -> bool {
    m.s(j) - s_lower_bound(m.b) >= -MEASURE_TOL
}

/// `√3 − b(1 − 2b)/3`.
pub fn s_lower_bound(b: f64) -> f64 {
    3f64.sqrt() - b * (1.0 - 2.0 * b) / 3.0
}
