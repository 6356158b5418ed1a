use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{OrderedField, Poly, PolyError};
use crate::exactnum::{Interval, QSqrt3, Sign};
use crate::Rational;

/// Endpoint of a root-counting range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound<F> {
    NegInf,
    At(F),
    PosInf,
}

/// Sturm sequence of the squarefree part of a polynomial.
#[derive(Debug, Clone)]
pub struct SturmChain<F> {
    chain: Vec<Poly<F>>,
}

/// Rational enclosures of field elements, used to seed rational bisection.
pub trait RationalBounds {
    fn rational_bounds(&self) -> (Rational, Rational);
}

impl RationalBounds for Rational {
    fn rational_bounds(&self) -> (Rational, Rational) {
        (self.clone(), self.clone())
    }
}

impl RationalBounds for QSqrt3 {
    fn rational_bounds(&self) -> (Rational, Rational) {
        if self.b.is_zero() {
            return (self.a.clone(), self.a.clone());
        }
        let r3 = Interval::from_rational(&Rational::from_integer(3.into()), 128)
            .sqrt(128, false)
            .expect("3 > 0");
        let (lo, hi) = (r3.lo_rational(), r3.hi_rational());
        let (x, y) = (&self.b * &lo, &self.b * &hi);
        let (m, n) = if x <= y { (x, y) } else { (y, x) };
        (&self.a + m, &self.a + n)
    }
}

fn sign_variations(signs: impl Iterator<Item = Sign>) -> usize {
    let mut last = Sign::Zero;
    let mut count = 0;
    for s in signs {
        if s == Sign::Zero {
            continue;
        }
        if last != Sign::Zero && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn cmp_f<F: OrderedField>(a: &F, b: &F) -> Sign {
    (a.clone() - b.clone()).sign()
}

impl<F: OrderedField> SturmChain<F> {
    /// Chain `p, p', −rem(p, p'), ...` of the squarefree part of `p`.
    pub fn new(p: &Poly<F>) -> Result<Self, PolyError> {
        if p.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let p0 = p.squarefree();
        let mut chain = vec![p0.clone()];
        let mut a = p0.clone();
        let mut b = p0.derivative();
        while !b.is_zero() {
            chain.push(b.clone());
            let (_, r) = a.div_rem(&b);
            a = b;
            b = -&r;
        }
        Ok(SturmChain { chain })
    }

    pub fn polys(&self) -> &[Poly<F>] {
        &self.chain
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// The squarefree polynomial whose roots are counted.
    pub fn base(&self) -> &Poly<F> {
        &self.chain[0]
    }

    pub fn variations(&self, at: &Bound<F>) -> usize {
        match at {
            Bound::NegInf => sign_variations(self.chain.iter().map(|p| p.sign_at_infinity(false))),
            Bound::PosInf => sign_variations(self.chain.iter().map(|p| p.sign_at_infinity(true))),
            Bound::At(x) => sign_variations(self.chain.iter().map(|p| p.sign_at(x))),
        }
    }

    /// Distinct real roots in the half-open range `(lo, hi]`.
    pub fn count_roots(&self, lo: &Bound<F>, hi: &Bound<F>) -> usize {
        self.variations(lo).saturating_sub(self.variations(hi))
    }

    /// Distinct real roots in the closed range `[lo, hi]`.
    pub fn count_roots_closed(&self, lo: &Bound<F>, hi: &Bound<F>) -> usize {
        let at_lo = match lo {
            Bound::At(x) => usize::from(self.base().sign_at(x) == Sign::Zero),
            _ => 0,
        };
        self.count_roots(lo, hi) + at_lo
    }

    /// Distinct real roots in the open range `(lo, hi)`.
    pub fn count_roots_open(&self, lo: &Bound<F>, hi: &Bound<F>) -> usize {
        let at_hi = match hi {
            Bound::At(x) => usize::from(self.base().sign_at(x) == Sign::Zero),
            _ => 0,
        };
        self.count_roots(lo, hi) - at_hi
    }

    pub fn total_real_roots(&self) -> usize {
        self.count_roots(&Bound::NegInf, &Bound::PosInf)
    }
}

/// Rational bound on the absolute value of every real root (Cauchy).
fn cauchy_bound<F: OrderedField + RationalBounds>(p: &Poly<F>) -> Rational {
    let lead = p.leading();
    let mut m = Rational::zero();
    for c in &p.coeffs()[..p.coeffs().len() - 1] {
        let (l, h) = (c.clone() / lead.clone()).rational_bounds();
        m = m.max(l.abs()).max(h.abs());
    }
    let b = m + Rational::one();
    Rational::from_integer(b.ceil().to_integer())
}

fn rational_floor(r: &Rational) -> Rational {
    Rational::from_integer(r.floor().to_integer())
}

fn rational_ceil(r: &Rational) -> Rational {
    Rational::from_integer(r.ceil().to_integer())
}

/// Disjoint enclosures of the real roots of `p` in `[lo, hi]`, each of width at
/// most `width` and containing exactly one root.
pub fn isolate_roots<F: OrderedField + RationalBounds>(
    p: &Poly<F>,
    lo: &Bound<F>,
    hi: &Bound<F>,
    width: &Rational,
) -> Result<Vec<Interval>, PolyError> {
    let chain = SturmChain::new(p)?;
    if chain.base().degree() == Some(0) {
        return Ok(Vec::new());
    }
    let cb = cauchy_bound(chain.base());
    let start = match lo {
        Bound::NegInf => -cb.clone(),
        Bound::At(x) => rational_floor(&x.rational_bounds().0) - Rational::one(),
        Bound::PosInf => return Err(PolyError::EmptyInterval),
    };
    let end = match hi {
        Bound::PosInf => cb.clone(),
        Bound::At(x) => rational_ceil(&x.rational_bounds().1),
        Bound::NegInf => return Err(PolyError::EmptyInterval),
    };
    let at = |r: &Rational| Bound::At(F::from_rational(r.clone()));
    let mut out = Vec::new();
    let mut work = vec![(start, end)];
    let two = Rational::from_integer(BigInt::from(2));
    while let Some((l, h)) = work.pop() {
        let n = chain.count_roots(&at(&l), &at(&h));
        if n == 0 {
            continue;
        }
        if n == 1 && &(&h - &l) <= width {
            out.push((l, h));
            continue;
        }
        let m = (&l + &h) / &two;
        work.push((m.clone(), h));
        work.push((l, m));
    }
    // Keep only enclosures whose root lies in the requested range.
    let keep = |l: &Rational, h: &Rational| -> bool {
        let (lf, hf) = (F::from_rational(l.clone()), F::from_rational(h.clone()));
        let a = match lo {
            Bound::At(x) if cmp_f(x, &lf) == Sign::Positive => Bound::At(x.clone()),
            _ => Bound::At(lf.clone()),
        };
        let b = match hi {
            Bound::At(x) if cmp_f(x, &hf) == Sign::Negative => Bound::At(x.clone()),
            _ => Bound::At(hf.clone()),
        };
        if let (Bound::At(av), Bound::At(bv)) = (&a, &b) {
            if cmp_f(av, bv) == Sign::Positive {
                return false;
            }
        }
        let lo_root = match lo {
            Bound::At(x) => {
                chain.base().sign_at(x) == Sign::Zero
                    && cmp_f(&lf, x) == Sign::Negative
                    && cmp_f(x, &hf) != Sign::Positive
            }
            _ => false,
        };
        lo_root || chain.count_roots(&a, &b) > 0
    };
    out.sort();
    Ok(out
        .into_iter()
        .filter(|(l, h)| keep(l, h))
        .map(|(l, h)| Interval::from_rational_bounds(&l, &h, 512))
        .collect())
}

/// Record of a positivity certificate on an open segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityTrace {
    pub polynomial: String,
    pub segment: (String, String),
    pub sample: String,
    pub sample_sign: Sign,
    pub endpoint_signs: (Sign, Sign),
    pub chain: Vec<String>,
    pub roots_in_open_segment: usize,
}

/// Certify `p > 0` on the open segment `(lo, hi)`: positive at the midpoint and no
/// root strictly inside.
pub fn positive_on_segment<F: OrderedField + RationalBounds>(
    p: &Poly<F>,
    lo: &F,
    hi: &F,
) -> Result<PositivityTrace, PolyError> {
    let fail = |l: String, h: String| PolyError::CertFailed { lo: l, hi: h };
    if cmp_f(lo, hi) != Sign::Negative {
        return Err(PolyError::EmptyInterval);
    }
    if p.is_zero() {
        return Err(fail(lo.to_string(), hi.to_string()));
    }
    let chain = SturmChain::new(p)?;
    let two = F::from_rational(Rational::from_integer(BigInt::from(2)));
    let mid = (lo.clone() + hi.clone()) / two;
    let sample_sign = p.sign_at(&mid);
    let roots = chain.count_roots_open(&Bound::At(lo.clone()), &Bound::At(hi.clone()));
    if roots > 0 {
        let found = isolate_roots(p, &Bound::At(lo.clone()), &Bound::At(hi.clone()), &Rational::new(1.into(), 1024.into()))?;
        let w = found
            .first()
            .map(|iv| (iv.lo_rational().to_string(), iv.hi_rational().to_string()))
            .unwrap_or((lo.to_string(), hi.to_string()));
        return Err(fail(w.0, w.1));
    }
    if sample_sign != Sign::Positive {
        return Err(fail(lo.to_string(), hi.to_string()));
    }
    Ok(PositivityTrace {
        polynomial: p.to_string(),
        segment: (lo.to_string(), hi.to_string()),
        sample: mid.to_string(),
        sample_sign,
        endpoint_signs: (p.sign_at(lo), p.sign_at(hi)),
        chain: chain.polys().iter().map(|q| q.to_string()).collect(),
        roots_in_open_segment: roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    fn rp(v: &[i64]) -> Poly<Rational> {
        Poly::new(v.iter().map(|&c| ratio(c, 1)).collect())
    }

    fn at(p: i64, q: i64) -> Bound<Rational> {
        Bound::At(ratio(p, q))
    }

    #[test]
    fn chain_of_x_squared_minus_two() {
        let c = SturmChain::new(&rp(&[-2, 0, 1])).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.count_roots(&at(0, 1), &at(2, 1)), 1);
        assert_eq!(c.total_real_roots(), 2);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(SturmChain::new(&rp(&[])).unwrap_err(), PolyError::ZeroPolynomial);
    }

    #[test]
    fn half_open_and_closed_counts() {
        // roots 0, 1, 2
        let c = SturmChain::new(&rp(&[0, 2, -3, 1])).unwrap();
        assert_eq!(c.count_roots(&at(0, 1), &at(2, 1)), 2);
        assert_eq!(c.count_roots_closed(&at(0, 1), &at(2, 1)), 3);
        assert_eq!(c.count_roots_open(&at(0, 1), &at(2, 1)), 1);
    }

    #[test]
    fn multiple_roots_counted_once() {
        let p = &rp(&[-1, 1]) * &rp(&[-1, 1]);
        let c = SturmChain::new(&(&p * &rp(&[2, 1]))).unwrap();
        assert_eq!(c.total_real_roots(), 2);
    }

    #[test]
    fn isolates_sqrt_two() {
        let r = isolate_roots(&rp(&[-2, 0, 1]), &at(0, 1), &at(2, 1), &ratio(1, 1_000_000)).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].contains_f64(std::f64::consts::SQRT_2));
        assert!(r[0].width() <= ratio(1, 1_000_000));
        let all = isolate_roots(&rp(&[-2, 0, 1]), &Bound::NegInf, &Bound::PosInf, &ratio(1, 1000)).unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn isolation_respects_qsqrt3_bounds() {
        // x² − 3 on [√3, 2] contains √3 itself.
        let p = Poly::new(vec![QSqrt3::from_int(-3), QSqrt3::zero(), QSqrt3::one()]);
        let r = isolate_roots(&p, &Bound::At(QSqrt3::sqrt3()), &Bound::At(QSqrt3::from_int(2)), &ratio(1, 1000)).unwrap();
        assert_eq!(r.len(), 1);
        let r = isolate_roots(&p, &Bound::At(QSqrt3::from_ratios(17, 10, 0, 1)), &Bound::At(QSqrt3::sqrt3() - QSqrt3::from_ratios(1, 1_000_000_000, 0, 1)), &ratio(1, 1000)).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn positivity_certificates() {
        // 54 − 36√3 b + 90 b² on (0, 1/2)
        let p = Poly::new(vec![QSqrt3::from_int(54), QSqrt3::from_ratios(0, 1, -36, 1), QSqrt3::from_int(90)]);
        let tr = positive_on_segment(&p, &QSqrt3::zero(), &QSqrt3::from_ratios(1, 2, 0, 1)).unwrap();
        assert_eq!(tr.roots_in_open_segment, 0);
        assert!(positive_on_segment(&rp(&[0, 1]), &ratio(0, 1), &ratio(1, 1)).is_ok());
        assert!(matches!(
            positive_on_segment(&rp(&[-1, 1]), &ratio(0, 1), &ratio(1, 2)),
            Err(PolyError::CertFailed { .. })
        ));
        assert!(matches!(
            positive_on_segment(&rp(&[-1, 4]), &ratio(0, 1), &ratio(1, 1)),
            Err(PolyError::CertFailed { .. })
        ));
    }
}
