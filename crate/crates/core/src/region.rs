//! The slope constraints `f`, `g`, `ψ`, `ψ̂` and the region
//! Ω = {(b, t) : max(f, g) < √3}.
//!
//! Expressions use `x0 = b` (bottom-bend slope) and `x1 = t` (top-bend slope).

use std::fmt::Write as _;
use std::path::Path;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certs::{CertReport, Check};
use crate::exactnum::{interval_eval, ratio, sign_of, ExactError, Interval, QSqrt3, RadicalExpr, Sign};
use crate::poly::{eliminate_radicals, Bound, PolyError, SturmChain};
use crate::{QPoly, Rational};

#[derive(Debug, Error)]
pub enum RegionError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("denominator b − t + T vanishes")]
    DenominatorZero,
    #[error("no boundary point: {0}")]
    NoSolution(String),
    #[error("plot resolution must be at least 16, got {0}")]
    Resolution(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A point of the slope plane with coordinates in ℚ(√3), so that the anchor
/// `(0, −1/√3)` is representable exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopePoint {
    pub b: QSqrt3,
    pub t: QSqrt3,
}

impl SlopePoint {
    pub fn new(b: QSqrt3, t: QSqrt3) -> Self {
        SlopePoint { b, t }
    }

    pub fn rational(b: Rational, t: Rational) -> Self {
        SlopePoint { b: QSqrt3::from_rational(b), t: QSqrt3::from_rational(t) }
    }

    /// `(0, −1/√3)`, where `f = g = √3`.
    pub fn anchor() -> Self {
        SlopePoint { b: QSqrt3::zero(), t: QSqrt3::from_ratios(0, 1, -1, 3) }
    }

    /// `B = √(1 + b²)`.
    pub fn big_b(&self) -> RadicalExpr {
        big_b().subst(0, &RadicalExpr::from_qsqrt3(&self.b))
    }

    /// `T = √(1 + t²)`.
    pub fn big_t(&self) -> RadicalExpr {
        big_t().subst(1, &RadicalExpr::from_qsqrt3(&self.t))
    }

    /// Substitute this point into a `(b, t)` expression.
    pub fn apply(&self, e: &RadicalExpr) -> RadicalExpr {
        e.subst(0, &RadicalExpr::from_qsqrt3(&self.b)).subst(1, &RadicalExpr::from_qsqrt3(&self.t))
    }
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

fn sqrt3() -> RadicalExpr {
    RadicalExpr::sqrt3()
}

/// `B = √(1 + b²)`.
pub fn big_b() -> RadicalExpr {
    (k(1) + b().square()).sqrt()
}

/// `T = √(1 + t²)`.
pub fn big_t() -> RadicalExpr {
    (k(1) + t().square()).sqrt()
}

/// `f(b, t) = b − t + T`.
pub fn f_expr() -> RadicalExpr {
    b() - t() + big_t()
}

/// `g(b, t) = −b + t + √(4B² + T²)`.
pub fn g_expr() -> RadicalExpr {
    -b() + t() + (k(4) * (k(1) + b().square()) + k(1) + t().square()).sqrt()
}

/// `∂f/∂t = −1 + t/T`.
pub fn df_dt_expr() -> RadicalExpr {
    -k(1) + t() / big_t()
}

/// `∂g/∂t = 1 + t/√(4B² + T²)`.
pub fn dg_dt_expr() -> RadicalExpr {
    k(1) + t() / (k(4) * (k(1) + b().square()) + k(1) + t().square()).sqrt()
}

/// `ψ(b, t) = (2 + b² + t² + bT − tT)/(b − t + T)`.
pub fn psi_expr() -> RadicalExpr {
    let tt = big_t();
    (k(2) + b().square() + t().square() + b() * tt.clone() - t() * tt.clone()) / (b() - t() + tt)
}

/// `b(1 − 2b)/3`.
pub fn correction_expr() -> RadicalExpr {
    b() * (k(1) - k(2) * b()) / k(3)
}

/// `ψ̂ = ψ + b(1 − 2b)/3 − √3`.
pub fn psi_hat_expr() -> RadicalExpr {
    psi_expr() + correction_expr() - sqrt3()
}

pub fn eval_f(p: &SlopePoint) -> RadicalExpr {
    p.apply(&f_expr())
}

pub fn eval_g(p: &SlopePoint) -> RadicalExpr {
    p.apply(&g_expr())
}

fn check_denominator(p: &SlopePoint) -> Result<(), RegionError> {
    let d = p.apply(&(b() - t() + big_t()));
    match sign_of(&d)? {
        Sign::Zero => Err(RegionError::DenominatorZero),
        _ => Ok(()),
    }
}

pub fn eval_psi(p: &SlopePoint) -> Result<RadicalExpr, RegionError> {
    check_denominator(p)?;
    Ok(p.apply(&psi_expr()))
}

pub fn eval_psi_hat(p: &SlopePoint) -> Result<RadicalExpr, RegionError> {
    check_denominator(p)?;
    Ok(p.apply(&psi_hat_expr()))
}

/// Three-valued membership in Ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Outside,
    /// `max(f, g) = √3` exactly.
    Boundary,
}

/// Exact membership: inside iff `f < √3` and `g < √3`.
pub fn omega_member(p: &SlopePoint) -> Result<Membership, RegionError> {
    let sf = sign_of(&(eval_f(p) - sqrt3()))?;
    if sf == Sign::Positive {
        return Ok(Membership::Outside);
    }
    let sg = sign_of(&(eval_g(p) - sqrt3()))?;
    Ok(match (sf, sg) {
        (_, Sign::Positive) => Membership::Outside,
        (Sign::Negative, Sign::Negative) => Membership::Inside,
        _ => Membership::Boundary,
    })
}

/// Floating-point membership test, for plotting and sampling.
pub fn omega_member_f64(b: f64, t: f64) -> bool {
    let s3 = 3f64.sqrt();
    let tt = (1.0 + t * t).sqrt();
    let f = b - t + tt;
    let g = -b + t + (4.0 * (1.0 + b * b) + tt * tt).sqrt();
    f < s3 && g < s3
}

/// Which constraint curve: `Γ_f = {f = √3}` or `Γ_g = {g = √3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    F,
    G,
}

/// Closed form of the boundary curve over `b`:
/// `t_f = −(b² − 2√3b + 2)/(2(√3 − b))` for `b < √3` and
/// `t_g = −(3b² − 2√3b + 2)/(2(b + √3))` for `b > −√3`.
pub fn boundary_t_exact(bv: &RadicalExpr, branch: Branch) -> Result<RadicalExpr, RegionError> {
    let s3 = sqrt3();
    let sq = bv.square();
    let (num, den) = match branch {
        Branch::F => (sq - k(2) * s3.clone() * bv.clone() + k(2), k(2) * (s3 - bv.clone())),
        Branch::G => (k(3) * sq - k(2) * s3.clone() * bv.clone() + k(2), k(2) * (bv.clone() + s3)),
    };
    if sign_of(&den)? != Sign::Positive {
        return Err(RegionError::NoSolution(format!("{branch:?} branch requires |b| < √3 on its side")));
    }
    Ok(-(num / den))
}

/// Enclosure of the unique `t` with `branch(b, t) = √3`, by bisection on the
/// monotone function `t ↦ branch(b, t)` (`f` decreasing, `g` increasing).
pub fn boundary_t(bv: &RadicalExpr, branch: Branch, width: &Rational) -> Result<Interval, RegionError> {
    let e = match branch {
        Branch::F => f_expr(),
        Branch::G => g_expr(),
    };
    let h = e.subst(0, bv) - sqrt3();
    // s(t) = sign of h(t), oriented so that it is −1 below the root and +1 above.
    let orient = match branch {
        Branch::F => Sign::Negative,
        Branch::G => Sign::Positive,
    };
    let side = |tv: &Rational| -> Result<Sign, RegionError> {
        Ok(sign_of(&h.subst(1, &RadicalExpr::constant(tv.clone())))?.mul(orient))
    };
    let (mut lo, mut hi) = (ratio(-1, 1), ratio(0, 1));
    let mut grow = 0;
    while side(&lo)? != Sign::Negative {
        lo = &lo * ratio(2, 1);
        grow += 1;
        if grow > 64 {
            return Err(RegionError::NoSolution("bracket below not found".into()));
        }
    }
    while side(&hi)? != Sign::Positive {
        hi = if hi.is_zero() { ratio(1, 1) } else { &hi * ratio(2, 1) };
        grow += 1;
        if grow > 128 {
            return Err(RegionError::NoSolution("bracket above not found".into()));
        }
    }
    let two = ratio(2, 1);
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        match side(&mid)? {
            Sign::Negative => lo = mid,
            Sign::Positive => hi = mid,
            Sign::Zero => return Ok(Interval::from_rational_bounds(&mid, &mid, 512)),
        }
    }
    Ok(Interval::from_rational_bounds(&lo, &hi, 512))
}

/// Right vertex abscissa `a = (√27 − √11)/4`.
pub fn right_vertex_b() -> RadicalExpr {
    (k(27).sqrt() - k(11).sqrt()) / k(4)
}

/// A point where `Γ_f` and `Γ_g` cross.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub b: RadicalExpr,
    pub t: RadicalExpr,
    pub b_enclosure: Interval,
    pub t_enclosure: Interval,
}

/// Numerator of `t_g(b) − t_f(b)`; its roots in `(−√3, √3)` are the crossings.
pub fn branch_difference_poly() -> Result<QPoly, RegionError> {
    let d = boundary_t_symbolic(Branch::G) - boundary_t_symbolic(Branch::F);
    Ok(eliminate_radicals(&d)?)
}

/// The boundary curve `t_f(b)` or `t_g(b)` as an expression in `x0 = b`.
pub fn boundary_t_symbolic(branch: Branch) -> RadicalExpr {
    let s3 = sqrt3();
    let (num, den) = match branch {
        Branch::F => (b().square() - k(2) * s3.clone() * b() + k(2), k(2) * (s3 - b())),
        Branch::G => (k(3) * b().square() - k(2) * s3.clone() * b() + k(2), k(2) * (b() + s3)),
    };
    -(num / den)
}

pub(crate) fn poly_at(p: &QPoly, x: &RadicalExpr) -> RadicalExpr {
    let mut acc = RadicalExpr::int(0);
    for c in p.coeffs().iter().rev() {
        acc = acc * x.clone() + RadicalExpr::from_qsqrt3(c);
    }
    acc
}

/// Exactly the two crossings `(0, −1/√3)` and `(a, −a/2)`; fails if the
/// certified root structure differs.
pub fn branch_intersections() -> Result<Vec<BranchPoint>, RegionError> {
    let p = branch_difference_poly()?;
    let lo = Bound::At(-QSqrt3::sqrt3());
    let hi = Bound::At(QSqrt3::sqrt3());
    let chain = SturmChain::new(&p)?;
    let n = chain.count_roots_open(&lo, &hi);
    if n != 2 {
        return Err(RegionError::NoSolution(format!("{n} crossings of the branches, expected 2")));
    }
    let a = right_vertex_b();
    let candidates = [RadicalExpr::int(0), a];
    let width = ratio(1, 1_000_000_000_000);
    let mut out = Vec::new();
    for bv in candidates {
        if sign_of(&poly_at(&p, &bv))? != Sign::Zero {
            return Err(RegionError::NoSolution(format!("{bv} is not a crossing")));
        }
        let tv = boundary_t_exact(&bv, Branch::F)?;
        out.push(BranchPoint {
            b_enclosure: interval_eval(&bv, &width)?,
            t_enclosure: interval_eval(&tv, &width)?,
            b: bv,
            t: tv,
        });
    }
    Ok(out)
}

/// A line `t = m·b + c` in the slope plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeLine {
    pub m: QSqrt3,
    pub c: QSqrt3,
}

impl SlopeLine {
    pub fn expr(&self) -> RadicalExpr {
        RadicalExpr::from_qsqrt3(&self.m) * b() + RadicalExpr::from_qsqrt3(&self.c)
    }

    pub fn at_f64(&self, bv: f64) -> f64 {
        self.m.to_f64() * bv + self.c.to_f64()
    }
}

/// Ω with its bounding trapezoid.
#[derive(Debug, Clone)]
pub struct OmegaRegion {
    /// `t = (2/3)b − 1/√3`; Ω lies above it.
    pub lower: SlopeLine,
    /// `t = (2/3)b − 1/2`; Ω lies below it.
    pub upper: SlopeLine,
    /// `t = (4/3)b − 1/√3`; Ω lies below it.
    pub steep: SlopeLine,
    /// `a = (√27 − √11)/4`; Ω lies in `0 < b < a`.
    pub a: RadicalExpr,
}

impl Default for OmegaRegion {
    fn default() -> Self {
        let inv_sqrt3 = QSqrt3::from_ratios(0, 1, 1, 3);
        OmegaRegion {
            lower: SlopeLine { m: QSqrt3::from_ratios(2, 3, 0, 1), c: -inv_sqrt3.clone() },
            upper: SlopeLine { m: QSqrt3::from_ratios(2, 3, 0, 1), c: QSqrt3::from_ratios(-1, 2, 0, 1) },
            steep: SlopeLine { m: QSqrt3::from_ratios(4, 3, 0, 1), c: -inv_sqrt3 },
            a: right_vertex_b(),
        }
    }
}

impl OmegaRegion {
    /// Floating-point trapezoid test (closed).
    pub fn in_trapezoid_f64(&self, bv: f64, tv: f64) -> bool {
        let a = self.a.eval_f64(&[]);
        let eps = 1e-12;
        bv >= -eps
            && bv <= a + eps
            && tv >= self.lower.at_f64(bv) - eps
            && tv <= self.upper.at_f64(bv) + eps
            && tv <= self.steep.at_f64(bv) + eps
    }
}

/// Rational upper bound for `a` used as the right end of certified segments.
fn a_upper() -> QSqrt3 {
    QSqrt3::from_ratios(47, 100, 0, 1)
}

const ANCHOR: &str = "Ω is a subset of the trapezoid";

/// Certificate that Ω lies in the trapezoid `0 ≤ b ≤ a`, between the lines of
/// slope 2/3 and below the line of slope 4/3.
pub fn trapezoid_certificate() -> CertReport {
    let start = std::time::Instant::now();
    let mut r = CertReport::new("trapezoid");
    let omega = OmegaRegion::default();
    let a = omega.a.clone();
    let s3 = sqrt3();

    // Monotonicity in t of both constraints.
    r.step(ANCHOR, "∂f/∂t = −1 + t/T has no zero: its elimination is the constant −1", Check::BivarElimination {
        expr: df_dt_expr(),
        poly: crate::QBivarPoly::constant(QSqrt3::from_int(-1)),
    });
    r.step(ANCHOR, "∂f/∂t < 0 at (0, 0)", Check::Sign { expr: SlopePoint::rational(ratio(0, 1), ratio(0, 1)).apply(&df_dt_expr()), sign: Sign::Negative });
    r.step(ANCHOR, "∂g/∂t = 1 + t/√(4B²+T²) never vanishes: its elimination has no real zero", Check::BivarElimination {
        expr: dg_dt_expr(),
        poly: crate::QBivarPoly::from_terms([(QSqrt3::from_int(-4), 2, 0), (QSqrt3::from_int(-5), 0, 0)]),
    });
    r.step(ANCHOR, "∂g/∂t > 0 at (0, 0)", Check::Sign { expr: SlopePoint::rational(ratio(0, 1), ratio(0, 1)).apply(&dg_dt_expr()), sign: Sign::Positive });

    // (i) strip
    match branch_difference_poly() {
        Ok(p) => {
            r.step(ANCHOR, "t_g − t_f eliminates to a cubic", Check::Elimination {
                expr: boundary_t_symbolic(Branch::G) - boundary_t_symbolic(Branch::F),
                poly: p.clone(),
            });
            let eps = QSqrt3::from_ratios(1, 1_000_000, 0, 1);
            r.step(ANCHOR, "Γ_f and Γ_g cross exactly twice for |b| < √3", Check::RootCount {
                poly: p.clone(),
                lo: Bound::At(-QSqrt3::sqrt3() + eps.clone()),
                hi: Bound::At(QSqrt3::sqrt3() - eps),
                count: 2,
            });
            r.step(ANCHOR, "crossing at b = 0", Check::Sign { expr: poly_at(&p, &k(0)), sign: Sign::Zero });
            r.step(ANCHOR, "crossing at b = a = (√27 − √11)/4", Check::Sign { expr: poly_at(&p, &a), sign: Sign::Zero });
            r.step(ANCHOR, "a ≈ 0.4698", Check::Enclosure { expr: a.clone(), lo: ratio(4698, 10000), hi: ratio(4699, 10000) });
            r.step(ANCHOR, "a < 47/100", Check::Sign { expr: RadicalExpr::ratio(47, 100) - a.clone(), sign: Sign::Positive });
            r.step(ANCHOR, "t_f(a) = −a/2", Check::Sign {
                expr: boundary_t_symbolic(Branch::F).subst(0, &a) + a.clone() / k(2),
                sign: Sign::Zero,
            });
            r.step(ANCHOR, "t_f(0) = −1/√3", Check::Sign {
                expr: boundary_t_symbolic(Branch::F).subst(0, &k(0)) + k(1) / s3.clone(),
                sign: Sign::Zero,
            });
            for bv in [-1, 1] {
                r.step(ANCHOR, &format!("Γ_g lies below Γ_f at b = {bv}"), Check::Sign {
                    expr: (boundary_t_symbolic(Branch::G) - boundary_t_symbolic(Branch::F)).subst(0, &k(bv)),
                    sign: Sign::Negative,
                });
            }
            r.step(ANCHOR, "Γ_g lies above Γ_f at b = 1/4", Check::Sign {
                expr: (boundary_t_symbolic(Branch::G) - boundary_t_symbolic(Branch::F)).subst(0, &RadicalExpr::ratio(1, 4)),
                sign: Sign::Positive,
            });
            // f = b + (T − t) > b and g = −b + (t + √(4B²+T²)) > −b.
            let origin = SlopePoint::rational(ratio(0, 1), ratio(0, 1));
            let t_gap = big_t() - t();
            r.step(ANCHOR, "T − t never vanishes", Check::BivarElimination { expr: t_gap.clone(), poly: crate::QBivarPoly::constant(QSqrt3::from_int(-1)) });
            r.step(ANCHOR, "T − t > 0, so f > b and Ω lies in b < √3", Check::Sign { expr: origin.apply(&t_gap), sign: Sign::Positive });
            let g_gap = g_expr() + b();
            r.step(ANCHOR, "t + √(4B²+T²) never vanishes", Check::BivarElimination {
                expr: g_gap.clone(),
                poly: crate::QBivarPoly::from_terms([(QSqrt3::from_int(-4), 2, 0), (QSqrt3::from_int(-5), 0, 0)]),
            });
            r.step(ANCHOR, "t + √(4B²+T²) > 0, so g > −b and Ω lies in b > −√3", Check::Sign { expr: origin.apply(&g_gap), sign: Sign::Positive });
        }
        Err(e) => r.fail(ANCHOR, "t_g − t_f elimination", e.to_string()),
    }

    // (ii) below t = (2/3)b − 1/2: g > √3 along the whole line.
    let g_line = g_expr().subst(1, &omega.upper.expr()) - s3.clone();
    match eliminate_radicals(&g_line) {
        Ok(p) => {
            r.step(ANCHOR, "g − √3 on t = (2/3)b − 1/2 eliminates to a quadratic", Check::Elimination { expr: g_line.clone(), poly: p.clone() });
            r.step(ANCHOR, "the quadratic has no real root", Check::RootCount { poly: p, lo: Bound::NegInf, hi: Bound::PosInf, count: 0 });
            r.step(ANCHOR, "g − √3 > 0 at b = 0 on the line", Check::Sign { expr: g_line.subst(0, &k(0)), sign: Sign::Positive });
        }
        Err(e) => r.fail(ANCHOR, "g on the upper line", e.to_string()),
    }
    let dg = g_line.diff(0);
    match eliminate_radicals(&dg) {
        Ok(p) => {
            let crit = (k(39) + k(8151).sqrt()) / k(520);
            r.step(ANCHOR, "d/db of g on the line eliminates to a polynomial", Check::Elimination { expr: dg.clone(), poly: p.clone() });
            r.step(ANCHOR, "one critical point in [0, 47/100]", Check::RootCount {
                poly: p,
                lo: Bound::At(QSqrt3::zero()),
                hi: Bound::At(a_upper()),
                count: 1,
            });
            r.step(ANCHOR, "the critical point is b = (39 + √8151)/520", Check::Sign { expr: dg.subst(0, &crit), sign: Sign::Zero });
            r.step(ANCHOR, "b = (39 + √8151)/520 ≈ 0.2486", Check::Enclosure { expr: crit.clone(), lo: ratio(2485, 10000), hi: ratio(2487, 10000) });
            r.step(ANCHOR, "derivative negative at b = 0", Check::Sign { expr: dg.subst(0, &k(0)), sign: Sign::Negative });
            r.step(ANCHOR, "derivative positive at b = 47/100", Check::Sign { expr: dg.subst(0, &RadicalExpr::ratio(47, 100)), sign: Sign::Positive });
            r.step(ANCHOR, "minimum of g on the line exceeds √3 by a margin in (1e−5, 5e−5)", Check::Enclosure {
                expr: g_line.subst(0, &crit),
                lo: ratio(1, 100_000),
                hi: ratio(5, 100_000),
            });
        }
        Err(e) => r.fail(ANCHOR, "critical point of g on the line", e.to_string()),
    }

    // (iii) above t = (2/3)b − 1/√3 and (iv) below t = (4/3)b − 1/√3.
    for (name, e, line) in [
        ("f", f_expr(), omega.lower.clone()),
        ("g", g_expr(), omega.steep.clone()),
    ] {
        let along = e.subst(1, &line.expr()) - s3.clone();
        match eliminate_radicals(&along) {
            Ok(p) => {
                let label = format!("{name} − √3 on t = ({})b + ({})", line.m, line.c);
                r.step(ANCHOR, &format!("{label} eliminates to a multiple of b²"), Check::Elimination { expr: along.clone(), poly: p.clone() });
                r.step(ANCHOR, "its only root in [0, 47/100] is b = 0", Check::RootCount {
                    poly: p.clone(),
                    lo: Bound::At(QSqrt3::zero()),
                    hi: Bound::At(a_upper()),
                    count: 1,
                });
                r.step(ANCHOR, "positive on (0, 47/100)", Check::Positive { poly: p.scale(&p.coeff(2).recip().unwrap_or(QSqrt3::one())), lo: QSqrt3::zero(), hi: a_upper() });
                r.step(ANCHOR, &format!("infimum {name} = √3 at b = 0"), Check::Sign { expr: along.subst(0, &k(0)), sign: Sign::Zero });
                r.step(ANCHOR, &format!("{name} − √3 > 0 at b = 1/4"), Check::Sign { expr: along.subst(0, &RadicalExpr::ratio(1, 4)), sign: Sign::Positive });
            }
            Err(e) => r.fail(ANCHOR, name, e.to_string()),
        }
    }
    r.wall_time = start.elapsed();
    r
}

/// Result of sampling Ω on a grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlotSummary {
    pub resolution: usize,
    pub samples: usize,
    pub inside: Vec<(f64, f64)>,
    pub boundary: usize,
}

/// Plot viewport `[b0, b1] × [t0, t1]`.
pub const VIEWPORT: (f64, f64, f64, f64) = (-0.05, 0.55, -0.65, -0.15);

/// Sample Ω on a `resolution × resolution` grid of rational cell centers with
/// exact membership and write an SVG with the trapezoid lines and the points
/// `(0, −1/√3)` and `(a, −a/2)`.
pub fn plot_omega(resolution: usize, path: &Path) -> Result<PlotSummary, RegionError> {
    if resolution < 16 {
        return Err(RegionError::Resolution(resolution));
    }
    let (b0, b1, t0, t1) = VIEWPORT;
    // Cell centers as exact rationals: lo + (i + 1/2)·(hi − lo)/n, with the
    // viewport corners given in hundredths.
    let n = resolution as i64;
    let hundredths = |x: f64| ratio((x * 100.0).round() as i64, 100);
    let center = |lo: f64, hi: f64, i: i64| -> Rational {
        let (lo, hi) = (hundredths(lo), hundredths(hi));
        &lo + (hi - &lo) * ratio(2 * i + 1, 2 * n)
    };
    let cells: Vec<(i64, i64)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let results: Vec<Result<(Rational, Rational, Membership), RegionError>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let bv = center(b0, b1, i);
            let tv = center(t0, t1, j);
            let m = omega_member(&SlopePoint::rational(bv.clone(), tv.clone()))?;
            Ok((bv, tv, m))
        })
        .collect();
    let mut inside = Vec::new();
    let mut boundary = 0;
    for res in results {
        let (bv, tv, m) = res?;
        match m {
            Membership::Inside => inside.push((to_f64(&bv), to_f64(&tv))),
            Membership::Boundary => boundary += 1,
            Membership::Outside => {}
        }
    }
    std::fs::write(path, render_svg(resolution, &inside))?;
    Ok(PlotSummary { resolution, samples: cells.len(), inside, boundary })
}

fn to_f64(r: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

fn render_svg(resolution: usize, inside: &[(f64, f64)]) -> String {
    let (b0, b1, t0, t1) = VIEWPORT;
    let size = 600.0;
    let sx = |bv: f64| (bv - b0) / (b1 - b0) * size;
    let sy = |tv: f64| (t1 - tv) / (t1 - t0) * size;
    let cell = size / resolution as f64;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
    let _ = writeln!(s, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    let _ = writeln!(s, r##"<g fill="#7aa6d8" stroke="none">"##);
    for &(bv, tv) in inside {
        let _ = writeln!(s, r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#, sx(bv) - cell / 2.0, sy(tv) - cell / 2.0, cell, cell);
    }
    let _ = writeln!(s, "</g>");
    let omega = OmegaRegion::default();
    let a = omega.a.eval_f64(&[]);
    for (line, color) in [(&omega.lower, "black"), (&omega.upper, "red"), (&omega.steep, "black")] {
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{color}" stroke-width="1"/>"#,
            sx(b0),
            sy(line.at_f64(b0)),
            sx(b1),
            sy(line.at_f64(b1))
        );
    }
    for bv in [0.0, a] {
        let _ = writeln!(s, r#"<line x1="{:.3}" y1="0" x2="{:.3}" y2="{size}" stroke="gray" stroke-dasharray="4 3"/>"#, sx(bv), sx(bv));
    }
    for (bv, tv) in [(0.0, -1.0 / 3f64.sqrt()), (a, -a / 2.0)] {
        let _ = writeln!(s, r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="black"/>"#, sx(bv), sy(tv));
    }
    let _ = writeln!(s, "</svg>");
    s
}

/// Whether the sampled points of Ω all lie strictly right of `b = 0` and below
/// `t = 0`.
pub fn sampled_signs_ok(inside: &[(f64, f64)]) -> bool {
    inside.iter().all(|&(bv, tv)| bv > 0.0 && tv < 0.0)
}
