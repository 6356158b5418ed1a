use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dyadic::{Dyadic, Interval};
use crate::Rational;

const GUARD_BITS: u32 = 64;

/// Fixed-point Taylor sum of arctan(p/q) for |p/q| <= 1/2, with a rigorous
/// bound on truncation and per-term rounding error.
fn atan_small(x: &Rational, prec: u32) -> Interval {
    debug_assert!(x.abs() * Rational::from_integer(BigInt::from(2)) <= Rational::one());
    if x.is_zero() {
        return Interval::point(Dyadic::zero());
    }
    let bits = prec + GUARD_BITS;
    let scale = BigInt::one() << bits;
    let p = x.numer().clone();
    let q = x.denom().clone();
    let p2 = &p * &p;
    let q2 = &q * &q;
    // power = floor(scale · x^(2k+1)), tracked in absolute value with sign by k.
    let mut power = (&scale * p.abs()).div_floor(&q);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    let tiny = BigInt::one();
    loop {
        let term = power.div_floor(&BigInt::from(2 * k + 1));
        if k.is_multiple_of(2) {
            sum += &term;
        } else {
            sum -= &term;
        }
        if power <= tiny {
            break;
        }
        power = (&power * &p2).div_floor(&q2);
        k += 1;
    }
    // Truncation: the next term is below 1 ulp. Rounding: <= 3 ulps per term.
    let err = BigInt::from(3 * (k + 1) + 2);
    let (lo, hi) = (&sum - &err, &sum + &err);
    let e = -(bits as i64);
    let iv = Interval::new(Dyadic::new(lo, e), Dyadic::new(hi, e));
    if p.is_negative() {
        iv.neg()
    } else {
        iv
    }
}

/// Certified enclosure of π at working precision `prec` (Machin's formula).
pub fn pi_enclosure(prec: u32) -> Interval {
    let a = atan_small(&Rational::new(BigInt::from(1), BigInt::from(5)), prec);
    let b = atan_small(&Rational::new(BigInt::from(1), BigInt::from(239)), prec);
    let p = prec + GUARD_BITS;
    let sixteen = Interval::point(Dyadic::from_int(16));
    let four = Interval::point(Dyadic::from_int(4));
    sixteen.mul(&a, p).sub(&four.mul(&b, p), p)
}

/// Certified enclosure of arctan(x) for any rational `x`.
pub fn atan_enclosure(x: &Rational, prec: u32) -> Interval {
    let p = prec + GUARD_BITS;
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let one = Rational::one();
    if x.abs() <= half {
        return atan_small(x, prec);
    }
    if x.is_negative() {
        return atan_enclosure(&-x.clone(), prec).neg();
    }
    if x > &one {
        // π/2 − arctan(1/x)
        let half_pi = pi_enclosure(prec).mul(&Interval::from_rational(&half, p), p);
        return half_pi.sub(&atan_enclosure(&x.recip(), prec), p);
    }
    // 1/2 < x <= 1: arctan(x) = arctan(1/2) + arctan((x − 1/2)/(1 + x/2)).
    let y = (x - &half) / (&one + x * &half);
    atan_small(&half, prec).add(&atan_small(&y, prec), p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    #[test]
    fn pi_digits() {
        let pi = pi_enclosure(200);
        assert!(pi.contains_f64(std::f64::consts::PI));
        assert!(pi.width() < ratio(1, 1 << 60));
        // 3.14159265358979323846264338327950288...
        let lo = Rational::new(
            "314159265358979323846264338327950288".parse().unwrap(),
            num_traits::pow(BigInt::from(10), 35),
        );
        let hi = lo.clone() + Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 35));
        assert!(pi.lo_rational() >= lo && pi.hi_rational() <= hi);
    }

    #[test]
    fn atan_values() {
        for &(p, q) in &[(4, 3), (1, 1), (-3, 5), (1, 3), (7, 1), (3, 4)] {
            let v = atan_enclosure(&ratio(p, q), 80);
            let f = (p as f64 / q as f64).atan();
            assert!(v.contains_f64(f) || (v.midpoint_f64() - f).abs() < 1e-15, "atan({p}/{q})");
            assert!(v.width() < ratio(1, 1 << 40));
        }
    }
}
