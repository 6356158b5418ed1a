use std::fmt;
use std::time::Duration;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactnum::{
    atan_enclosure, interval_eval, pi_enclosure, serde_rational, Interval, QSqrt3, RadicalExpr, Sign,
};
use crate::poly::{
    eliminate_radicals, eliminate_radicals_bivar, isolate_roots, positive_on_segment, BivarPoly, Bound, Poly,
    RationalBounds, SturmChain,
};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Failed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Verified => "verified",
            Status::Failed => "failed",
        })
    }
}

/// Outcome recorded for one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub verified: bool,
    pub detail: String,
}

/// A self-contained claim about exact data. Every variant can be re-checked
/// from its own fields, which is what [`CertReport::replay`] does.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Check {
    /// Eliminating the radicals of a one-variable expression gives `poly`.
    Elimination { expr: RadicalExpr, poly: Poly<QSqrt3> },
    /// Eliminating the radicals of a `(b, t)` expression gives `poly`.
    BivarElimination { expr: RadicalExpr, poly: BivarPoly<QSqrt3> },
    /// `computed = factor · expected`, coefficient by coefficient.
    PolyProportional { computed: Poly<QSqrt3>, expected: Poly<QSqrt3>, factor: QSqrt3 },
    /// `computed = factor · expected` for bivariate polynomials.
    BivarProportional { computed: BivarPoly<QSqrt3>, expected: BivarPoly<QSqrt3>, factor: QSqrt3 },
    /// Number of distinct real roots in `[lo, hi]` (closed where finite).
    RootCount { poly: Poly<QSqrt3>, lo: Bound<QSqrt3>, hi: Bound<QSqrt3>, count: usize },
    /// `poly > 0` on the open segment `(lo, hi)`.
    Positive { poly: Poly<QSqrt3>, lo: QSqrt3, hi: QSqrt3 },
    /// Exact sign of a constant expression.
    Sign { expr: RadicalExpr, sign: Sign },
    /// The constant `expr` lies strictly between `lo` and `hi`.
    Enclosure {
        expr: RadicalExpr,
        #[serde(with = "serde_rational")]
        lo: Rational,
        #[serde(with = "serde_rational")]
        hi: Rational,
    },
    /// The one-variable `expr` has sign `sign` on the closed segment `[lo, hi]`:
    /// every root of its elimination polynomial there is shown not to be a root
    /// of `expr`, and the sign is read at `sample`.
    SignOnSegment { expr: RadicalExpr, lo: QSqrt3, hi: QSqrt3, sample: QSqrt3, sign: Sign },
    /// The one-variable `expr` has exactly `count` zeros in the open range
    /// `(lo, hi)`: each root of its elimination polynomial there is either shown
    /// not to be a zero or bracketed by a sign change of `expr`.
    ZeroCount { expr: RadicalExpr, lo: Bound<QSqrt3>, hi: Bound<QSqrt3>, count: usize },
    /// `arctan(u) + arctan(v) > π/4` with `u, v ≥ 0`, `uv < 1`, via the tangent
    /// addition formula and a certified enclosure.
    ArctanSumExceedsQuarterPi {
        #[serde(with = "serde_rational")]
        u: Rational,
        #[serde(with = "serde_rational")]
        v: Rational,
    },
    /// A floating-point sampling check; recorded, not exact.
    Sampled { description: String, samples: usize, failures: usize },
    /// A floating-point measurement compared against optional bounds with a
    /// tolerance; recorded, not exact.
    Numeric { quantity: String, value: f64, lo: Option<f64>, hi: Option<f64>, tolerance: f64 },
}

const ENCLOSURE_WIDTH: (i64, i64) = (1, 1_000_000_000_000);

fn tiny() -> Rational {
    Rational::new(ENCLOSURE_WIDTH.0.into(), ENCLOSURE_WIDTH.1.into())
}

impl Check {
    /// Re-run the claim. `Ok` carries a human-readable summary.
    pub fn verify(&self) -> Result<String, String> {
        let e2s = |e: &dyn fmt::Display| e.to_string();
        match self {
            Check::Elimination { expr, poly } => {
                let p = eliminate_radicals(expr).map_err(|e| e2s(&e))?;
                if &p == poly {
                    Ok(format!("degree {}", p.degree().map_or(-1, |d| d as i64)))
                } else {
                    Err(format!("elimination gives {p}"))
                }
            }
            Check::BivarElimination { expr, poly } => {
                let p = eliminate_radicals_bivar(expr).map_err(|e| e2s(&e))?;
                if &p == poly {
                    Ok(format!("total degree {}", p.total_degree().map_or(-1, |d| d as i64)))
                } else {
                    Err(format!("elimination gives {p}"))
                }
            }
            Check::PolyProportional { computed, expected, factor } => {
                if factor.is_zero() {
                    return Err("zero factor".into());
                }
                let diffs = (0..=computed.degree().max(expected.degree()).unwrap_or(0))
                    .filter(|&i| computed.coeff(i) != factor.clone() * expected.coeff(i))
                    .count();
                if diffs == 0 {
                    Ok(format!("computed = ({factor}) × expected"))
                } else {
                    Err(format!("{diffs} coefficients differ"))
                }
            }
            Check::BivarProportional { computed, expected, factor } => {
                if factor.is_zero() {
                    return Err("zero factor".into());
                }
                let diffs = computed.differences(&expected.scale(factor));
                if diffs.is_empty() {
                    Ok(format!("computed = ({factor}) × expected"))
                } else {
                    let list: Vec<String> = diffs.iter().map(|(i, j, _, _)| format!("b^{i}t^{j}")).collect();
                    Err(format!("{} monomials differ: {}", diffs.len(), list.join(", ")))
                }
            }
            Check::RootCount { poly, lo, hi, count } => {
                let chain = SturmChain::new(poly).map_err(|e| e2s(&e))?;
                let n = chain.count_roots_closed(lo, hi);
                if n == *count {
                    Ok(format!("{n} roots, Sturm chain of length {}", chain.len()))
                } else {
                    Err(format!("{n} roots, expected {count}"))
                }
            }
            Check::Positive { poly, lo, hi } => positive_on_segment(poly, lo, hi)
                .map(|t| format!("positive at {}; {} roots inside", t.sample, t.roots_in_open_segment))
                .map_err(|e| e2s(&e)),
            Check::Sign { expr, sign } => {
                let s = crate::exactnum::sign_of(expr).map_err(|e| e2s(&e))?;
                if s == *sign {
                    Ok(format!("sign {s}"))
                } else {
                    Err(format!("sign {s}, expected {sign}"))
                }
            }
            Check::Enclosure { expr, lo, hi } => {
                let iv = interval_eval(expr, &tiny()).map_err(|e| e2s(&e))?;
                if &iv.lo_rational() > lo && &iv.hi_rational() < hi {
                    Ok(format!("value ≈ {:.12}", iv.midpoint_f64()))
                } else {
                    Err(format!("value ≈ {:.12} outside bounds", iv.midpoint_f64()))
                }
            }
            Check::SignOnSegment { expr, lo, hi, sample, sign } => sign_on_segment(expr, lo, hi, sample, *sign),
            Check::ZeroCount { expr, lo, hi, count } => zero_count(expr, lo, hi, *count),
            Check::ArctanSumExceedsQuarterPi { u, v } => {
                if u.is_negative() || v.is_negative() || u * v >= Rational::one() {
                    return Err("requires u, v ≥ 0 and uv < 1".into());
                }
                // tan(arctan u + arctan v) = (u + v)/(1 − uv) > 1 = tan(π/4)
                let tan_sum = (u + v) / (Rational::one() - u * v);
                if tan_sum <= Rational::one() {
                    return Err(format!("tangent of the sum is {tan_sum} ≤ 1"));
                }
                let prec = 96;
                let sum = atan_enclosure(u, prec).add(&atan_enclosure(v, prec), prec);
                let quarter = pi_enclosure(prec).mul(&Interval::from_rational(&Rational::new(1.into(), 4.into()), prec), prec);
                let margin = sum.sub(&quarter, prec);
                if margin.certain_sign() == Some(Sign::Positive) {
                    Ok(format!("tangent of the sum {tan_sum}; margin ≥ {:.6}", margin.lo.to_f64()))
                } else {
                    Err("enclosure does not separate from π/4".into())
                }
            }
            Check::Sampled { failures, samples, .. } => {
                if *failures == 0 {
                    Ok(format!("{samples} samples, no failures"))
                } else {
                    Err(format!("{failures} of {samples} samples failed"))
                }
            }
            Check::Numeric { quantity, value, lo, hi, tolerance } => {
                let above = lo.is_none_or(|l| *value >= l - tolerance);
                let below = hi.is_none_or(|h| *value <= h + tolerance);
                if value.is_finite() && above && below {
                    Ok(format!("{quantity} = {value:.12}"))
                } else {
                    Err(format!("{quantity} = {value:.12} outside [{lo:?}, {hi:?}] ± {tolerance:e}"))
                }
            }
        }
    }
}

fn sign_on_segment(expr: &RadicalExpr, lo: &QSqrt3, hi: &QSqrt3, sample: &QSqrt3, sign: Sign) -> Result<String, String> {
    if sample < lo || sample > hi {
        return Err("sample outside the segment".into());
    }
    let poly = eliminate_radicals(expr).map_err(|e| e.to_string())?;
    if poly.is_zero() {
        return Err("elimination polynomial vanishes identically".into());
    }
    let roots = isolate_roots(&poly, &Bound::At(lo.clone()), &Bound::At(hi.clone()), &Rational::new(1.into(), 1_000_000.into()))
        .map_err(|e| e.to_string())?;
    let mut extraneous = 0;
    for iv in &roots {
        if !root_is_extraneous(expr, &poly, iv) {
            return Err(format!("candidate zero in [{}, {}]", iv.lo_rational(), iv.hi_rational()));
        }
        extraneous += 1;
    }
    let at = expr.subst(0, &RadicalExpr::from_qsqrt3(sample));
    let s = crate::exactnum::sign_of(&at).map_err(|e| e.to_string())?;
    if s != sign {
        return Err(format!("sign {s} at the sample point"));
    }
    Ok(format!("sign {s}; {} candidate roots, all extraneous", extraneous))
}

fn zero_count(expr: &RadicalExpr, lo: &Bound<QSqrt3>, hi: &Bound<QSqrt3>, count: usize) -> Result<String, String> {
    let poly = eliminate_radicals(expr).map_err(|e| e.to_string())?;
    if poly.is_zero() {
        return Err("elimination polynomial vanishes identically".into());
    }
    let roots = isolate_roots(&poly, lo, hi, &Rational::new(1.into(), 1_000_000.into())).map_err(|e| e.to_string())?;
    let at_endpoint = |iv: &Interval| {
        [lo, hi].iter().any(|b| match b {
            Bound::At(x) => {
                let (xl, xh) = x.rational_bounds();
                poly.sign_at(x) == Sign::Zero && iv.lo_rational() <= xh && xl <= iv.hi_rational()
            }
            _ => false,
        })
    };
    let (mut genuine, mut extraneous) = (0, 0);
    for iv in roots.iter().filter(|iv| !at_endpoint(iv)) {
        if root_is_extraneous(expr, &poly, iv) {
            extraneous += 1;
            continue;
        }
        let sign_at = |r: Rational| crate::exactnum::sign_of(&expr.subst(0, &RadicalExpr::constant(r)));
        let sl = sign_at(iv.lo_rational()).map_err(|e| e.to_string())?;
        let sh = sign_at(iv.hi_rational()).map_err(|e| e.to_string())?;
        if sl.mul(sh) != Sign::Negative {
            return Err(format!("root in [{}, {}] neither excluded nor bracketed", iv.lo_rational(), iv.hi_rational()));
        }
        genuine += 1;
    }
    if genuine == count {
        Ok(format!("{genuine} zeros; {extraneous} extraneous candidates"))
    } else {
        Err(format!("{genuine} zeros, expected {count}"))
    }
}

/// The unique root of `poly` in `iv` is not a root of `expr`: shrink the
/// isolating interval until the enclosure of `expr` over it excludes zero.
fn root_is_extraneous(expr: &RadicalExpr, poly: &Poly<QSqrt3>, iv: &Interval) -> bool {
    let chain = match SturmChain::new(poly) {
        Ok(c) => c,
        Err(_) => return false,
    };
    let (mut l, mut h) = (iv.lo_rational(), iv.hi_rational());
    let q = |r: &Rational| Bound::At(QSqrt3::from_rational(r.clone()));
    let two = Rational::from_integer(2.into());
    for _ in 0..200 {
        let env = [Interval::from_rational_bounds(&l, &h, 256)];
        let enclosure = crate::exactnum::interval_eval_with(
            expr,
            &Rational::from_integer(1_000_000.into()),
            &env,
            &crate::exactnum::EvalConfig { start_precision: 256, precision_cap: 256 },
        );
        if let Ok(e) = enclosure {
            if e.certain_sign().is_some_and(|s| s != Sign::Zero) {
                return true;
            }
        }
        let m = (&l + &h) / &two;
        if poly.sign_at(&QSqrt3::from_rational(m.clone())) == Sign::Zero {
            return crate::exactnum::sign_of(&expr.subst(0, &RadicalExpr::constant(m))).is_ok_and(|s| s != Sign::Zero);
        }
        if chain.count_roots(&q(&l), &q(&m)) == 1 {
            h = m;
        } else {
            l = m;
        }
    }
    false
}

/// One verified or failed claim with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Step {
    pub anchor: String,
    pub description: String,
    #[serde(flatten)]
    pub check: Check,
    pub result: StepResult,
}

impl Step {
    /// Run `check` and record its outcome.
    pub fn run(anchor: &str, description: &str, check: Check) -> Step {
        let result = match check.verify() {
            Ok(detail) => StepResult { verified: true, detail },
            Err(detail) => StepResult { verified: false, detail },
        };
        Step { anchor: anchor.to_string(), description: description.to_string(), check, result }
    }
}

/// Machine-checked certificate: a list of steps, verified iff all steps are.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertReport {
    pub id: String,
    pub status: Status,
    pub steps: Vec<Step>,
    /// Measured run time; kept out of the serialized payload so reports are
    /// byte-reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CertReport {
    pub fn new(id: &str) -> Self {
        CertReport { id: id.to_string(), status: Status::Verified, steps: Vec::new(), wall_time: Duration::ZERO }
    }

    /// Run and append a step.
    pub fn step(&mut self, anchor: &str, description: &str, check: Check) -> &Step {
        let s = Step::run(anchor, description, check);
        if !s.result.verified {
            self.status = Status::Failed;
        }
        self.steps.push(s);
        self.steps.last().unwrap()
    }

    /// Append a failed step that could not even be formulated.
    pub fn fail(&mut self, anchor: &str, description: &str, detail: String) {
        self.status = Status::Failed;
        self.steps.push(Step {
            anchor: anchor.to_string(),
            description: description.to_string(),
            check: Check::Sampled { description: "not formulated".into(), samples: 0, failures: 1 },
            result: StepResult { verified: false, detail },
        });
    }

    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Re-verify every step from its recorded data; returns the indices of steps
    /// whose outcome differs from the recorded one.
    pub fn replay(&self) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.check.verify().is_ok() != s.result.verified)
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for CertReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} [{}]", self.id, self.status)?;
        for s in &self.steps {
            let mark = if s.result.verified { "ok  " } else { "FAIL" };
            writeln!(f, "  {mark} {} ({}): {}", s.description, s.anchor, s.result.detail)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    #[test]
    fn report_round_trips_and_replays() {
        let mut r = CertReport::new("demo");
        let b = RadicalExpr::var(0);
        r.step("demo", "root count", Check::RootCount {
            poly: Poly::new(vec![QSqrt3::from_int(-2), QSqrt3::zero(), QSqrt3::one()]),
            lo: Bound::At(QSqrt3::zero()),
            hi: Bound::PosInf,
            count: 1,
        });
        r.step("demo", "sign", Check::Sign { expr: RadicalExpr::int(27).sqrt() - RadicalExpr::int(11).sqrt(), sign: Sign::Positive });
        r.step("demo", "enclosure", Check::Enclosure { expr: RadicalExpr::int(2).sqrt(), lo: ratio(14, 10), hi: ratio(15, 10) });
        r.step("demo", "on segment", Check::SignOnSegment {
            expr: (RadicalExpr::int(1) + b.clone() * b).sqrt() - RadicalExpr::ratio(1, 2),
            lo: QSqrt3::zero(),
            hi: QSqrt3::one(),
            sample: QSqrt3::from_ratios(1, 2, 0, 1),
            sign: Sign::Positive,
        });
        r.step("demo", "arctan", Check::ArctanSumExceedsQuarterPi { u: ratio(4, 3), v: ratio(0, 1) });
        assert!(r.is_verified(), "{r}");
        let json = r.to_json();
        let back = CertReport::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert!(back.replay().is_empty());
    }

    #[test]
    fn failing_step_marks_report_failed() {
        let mut r = CertReport::new("bad");
        r.step("x", "wrong sign", Check::Sign { expr: RadicalExpr::int(1), sign: Sign::Negative });
        assert_eq!(r.status, Status::Failed);
        assert!(r.replay().is_empty());
    }

    #[test]
    fn extraneous_roots_are_discarded() {
        // √(1 + b²) + 2b vanishes at −1/√3; its elimination polynomial 1 − 3b²
        // also has the extraneous root 1/√3.
        let b = RadicalExpr::var(0);
        let e = (RadicalExpr::int(1) + b.clone() * b.clone()).sqrt() + RadicalExpr::int(2) * b;
        let res = sign_on_segment(&e, &QSqrt3::from_int(-1), &QSqrt3::from_int(0), &QSqrt3::from_int(-1), Sign::Negative);
        assert!(res.is_err());
        let res = sign_on_segment(&e, &QSqrt3::from_int(0), &QSqrt3::from_int(1), &QSqrt3::from_ratios(1, 2, 0, 1), Sign::Positive);
        assert!(res.is_ok(), "{res:?}");
    }
}
