use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Sign;
use crate::Rational;

/// A dyadic rational `mantissa · 2^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

#[derive(Serialize, Deserialize)]
struct DyadicRepr {
    mantissa: String,
    exponent: i64,
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DyadicRepr { mantissa: self.mantissa.to_string(), exponent: self.exponent }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = DyadicRepr::deserialize(d)?;
        let m = r.mantissa.parse::<BigInt>().map_err(serde::de::Error::custom)?;
        Ok(Dyadic::new(m, r.exponent))
    }
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            Dyadic { mantissa, exponent: 0 }
        } else {
            Dyadic { mantissa, exponent }
        }
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn sign(&self) -> Sign {
        Sign::of_bigint(&self.mantissa)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    fn bits(&self) -> u64 {
        self.mantissa.magnitude().bits()
    }

    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::from_integer(&self.mantissa * pow2(self.exponent as u64))
        } else {
            Rational::new(self.mantissa.clone(), pow2((-self.exponent) as u64))
        }
    }

    pub fn to_f64(&self) -> f64 {
        // Keep 64 significant bits before handing over to the float path.
        let b = self.bits();
        let (m, e) = if b > 64 {
            let s = b - 64;
            (self.mantissa.div_floor(&pow2(s)), self.exponent + s as i64)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        m.to_f64().unwrap_or(f64::NAN) * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic::new(-self.mantissa.clone(), self.exponent)
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = a.exponent.min(b.exponent);
        let ma = &a.mantissa * pow2((a.exponent - e) as u64);
        let mb = &b.mantissa * pow2((b.exponent - e) as u64);
        (ma, mb, e)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = Dyadic::aligned(self, other);
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &other.mantissa, self.exponent + other.exponent)
    }

    /// Largest dyadic with at most `prec` significant bits that is `<= self`.
    pub fn round_floor(&self, prec: u32) -> Dyadic {
        let b = self.bits();
        if b <= prec as u64 {
            return self.clone();
        }
        let s = b - prec as u64;
        Dyadic::new(self.mantissa.div_floor(&pow2(s)), self.exponent + s as i64)
    }

    /// Smallest dyadic with at most `prec` significant bits that is `>= self`.
    pub fn round_ceil(&self, prec: u32) -> Dyadic {
        self.neg().round_floor(prec).neg()
    }

    /// `floor(r · 2^k) · 2^-k` with `k` chosen to retain about `prec` bits.
    pub fn from_rational_floor(r: &Rational, prec: u32) -> Dyadic {
        if r.is_zero() {
            return Dyadic::zero();
        }
        let nb = r.numer().magnitude().bits() as i64;
        let db = r.denom().magnitude().bits() as i64;
        let k = prec as i64 - (nb - db) + 1;
        let (num, den) = if k >= 0 {
            (r.numer() * pow2(k as u64), r.denom().clone())
        } else {
            (r.numer().clone(), r.denom() * pow2((-k) as u64))
        };
        Dyadic::new(num.div_floor(&den), -k)
    }

    pub fn from_rational_ceil(r: &Rational, prec: u32) -> Dyadic {
        Dyadic::from_rational_floor(&-r.clone(), prec).neg()
    }

    /// `floor(self / other)` to about `prec` bits. `other` must be nonzero.
    pub fn div_floor(&self, other: &Dyadic, prec: u32) -> Dyadic {
        debug_assert!(!other.is_zero());
        if self.is_zero() {
            return Dyadic::zero();
        }
        let k = prec as i64 + other.bits() as i64 - self.bits() as i64 + 2;
        let (num, den) = if k >= 0 {
            (&self.mantissa * pow2(k as u64), other.mantissa.clone())
        } else {
            (self.mantissa.clone(), &other.mantissa * pow2((-k) as u64))
        };
        Dyadic::new(num.div_floor(&den), self.exponent - other.exponent - k)
    }

    pub fn div_ceil(&self, other: &Dyadic, prec: u32) -> Dyadic {
        self.neg().div_floor(other, prec).neg()
    }

    /// `floor(√self)` to about `prec` bits; `self` must be non-negative.
    pub fn sqrt_floor(&self, prec: u32) -> Dyadic {
        debug_assert!(self.sign() != Sign::Negative);
        if self.is_zero() {
            return Dyadic::zero();
        }
        let (m, e) = self.sqrt_scaled(prec);
        Dyadic::new(m.sqrt(), e / 2)
    }

    pub fn sqrt_ceil(&self, prec: u32) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        let (m, e) = self.sqrt_scaled(prec);
        let r = m.sqrt();
        let r = if &r * &r == m { r } else { r + 1 };
        Dyadic::new(r, e / 2)
    }

    // Scale mantissa so the exponent is even and the integer root keeps `prec` bits.
    fn sqrt_scaled(&self, prec: u32) -> (BigInt, i64) {
        let want = 2 * prec as i64 + 4;
        let mut shift = (want - self.bits() as i64).max(0);
        if (self.exponent - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        (&self.mantissa * pow2(shift as u64), self.exponent - shift)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = Dyadic::aligned(self, other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e}", self.to_f64())
    }
}

/// Why an interval operation could not produce an enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalFault {
    /// Divisor enclosure contains zero.
    DivisorStraddlesZero,
    /// Square-root operand enclosure is entirely negative.
    NegativeRadicand,
    /// Square-root operand enclosure contains both signs.
    RadicandStraddlesZero,
}

/// A closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(d: Dyadic) -> Self {
        Interval { lo: d.clone(), hi: d }
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        Interval {
            lo: Dyadic::from_rational_floor(r, prec),
            hi: Dyadic::from_rational_ceil(r, prec),
        }
    }

    /// Enclosure of `[lo, hi]` given by rational endpoints.
    pub fn from_rational_bounds(lo: &Rational, hi: &Rational, prec: u32) -> Self {
        Interval {
            lo: Dyadic::from_rational_floor(lo, prec),
            hi: Dyadic::from_rational_ceil(hi, prec),
        }
    }

    pub fn lo_rational(&self) -> Rational {
        self.lo.to_rational()
    }

    pub fn hi_rational(&self) -> Rational {
        self.hi.to_rational()
    }

    pub fn width(&self) -> Rational {
        self.hi.sub(&self.lo).to_rational()
    }

    pub fn midpoint_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        &self.lo_rational() <= r && r <= &self.hi_rational()
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.lo.to_f64() <= x && x <= self.hi.to_f64()
    }

    /// Whether `self` lies inside `outer`.
    pub fn subset_of(&self, outer: &Interval) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }

    /// The sign of every point of the interval, if they all agree.
    pub fn certain_sign(&self) -> Option<Sign> {
        if self.lo.sign() == Sign::Positive {
            Some(Sign::Positive)
        } else if self.hi.sign() == Sign::Negative {
            Some(Sign::Negative)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Sign::Zero)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Interval, prec: u32) -> Interval {
        Interval {
            lo: self.lo.add(&o.lo).round_floor(prec),
            hi: self.hi.add(&o.hi).round_ceil(prec),
        }
    }

    pub fn sub(&self, o: &Interval, prec: u32) -> Interval {
        Interval {
            lo: self.lo.sub(&o.hi).round_floor(prec),
            hi: self.hi.sub(&o.lo).round_ceil(prec),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn mul(&self, o: &Interval, prec: u32) -> Interval {
        let products = [
            self.lo.mul(&o.lo),
            self.lo.mul(&o.hi),
            self.hi.mul(&o.lo),
            self.hi.mul(&o.hi),
        ];
        let lo = products.iter().min().unwrap().round_floor(prec);
        let hi = products.iter().max().unwrap().round_ceil(prec);
        Interval { lo, hi }
    }

    pub fn div(&self, o: &Interval, prec: u32) -> Result<Interval, IntervalFault> {
        if o.lo.sign() != Sign::Positive && o.hi.sign() != Sign::Negative {
            return Err(IntervalFault::DivisorStraddlesZero);
        }
        let mut lows = Vec::with_capacity(4);
        let mut highs = Vec::with_capacity(4);
        for a in [&self.lo, &self.hi] {
            for b in [&o.lo, &o.hi] {
                lows.push(a.div_floor(b, prec));
                highs.push(a.div_ceil(b, prec));
            }
        }
        Ok(Interval {
            lo: lows.into_iter().min().unwrap(),
            hi: highs.into_iter().max().unwrap(),
        })
    }

    /// `allow_clamp` permits a straddling operand whose exact value is known to be
    /// non-negative; the negative part is then discarded.
    pub fn sqrt(&self, prec: u32, allow_clamp: bool) -> Result<Interval, IntervalFault> {
        if self.hi.sign() == Sign::Negative {
            return Err(IntervalFault::NegativeRadicand);
        }
        let lo = if self.lo.sign() == Sign::Negative {
            if !allow_clamp {
                return Err(IntervalFault::RadicandStraddlesZero);
            }
            Dyadic::zero()
        } else {
            self.lo.sqrt_floor(prec)
        };
        Ok(Interval { lo, hi: self.hi.sqrt_ceil(prec) })
    }

    /// Smallest interval containing both.
    pub fn hull(&self, o: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lo.sign() == Sign::Positive
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    #[test]
    fn rounding_brackets_rationals() {
        let r = ratio(1, 3);
        let lo = Dyadic::from_rational_floor(&r, 40);
        let hi = Dyadic::from_rational_ceil(&r, 40);
        assert!(lo.to_rational() < r && r < hi.to_rational());
        assert!(hi.sub(&lo).to_rational() < ratio(1, 1 << 30));
        let neg = Dyadic::from_rational_floor(&ratio(-5, 7), 20);
        assert!(neg.to_rational() <= ratio(-5, 7));
    }

    #[test]
    fn sqrt_two_enclosure() {
        let two = Interval::point(Dyadic::from_int(2));
        let r = two.sqrt(60, false).unwrap();
        let lo = r.lo_rational();
        let hi = r.hi_rational();
        assert!(&lo * &lo <= ratio(2, 1));
        assert!(&hi * &hi >= ratio(2, 1));
        assert!(r.width() < ratio(1, 1 << 50));
    }

    #[test]
    fn division_outward() {
        let one = Interval::point(Dyadic::from_int(1));
        let three = Interval::point(Dyadic::from_int(3));
        let q = one.div(&three, 30).unwrap();
        assert!(q.contains_rational(&ratio(1, 3)));
        let straddle = Interval::new(Dyadic::from_int(-1), Dyadic::from_int(1));
        assert_eq!(one.div(&straddle, 30), Err(IntervalFault::DivisorStraddlesZero));
    }

    #[test]
    fn negative_radicand() {
        let m = Interval::point(Dyadic::from_int(-2));
        assert_eq!(m.sqrt(30, true), Err(IntervalFault::NegativeRadicand));
        let s = Interval::new(Dyadic::from_int(-1), Dyadic::from_int(4));
        assert_eq!(s.sqrt(30, false), Err(IntervalFault::RadicandStraddlesZero));
        let c = s.sqrt(30, true).unwrap();
        assert!(c.lo.is_zero() && c.hi >= Dyadic::from_int(2));
    }
}
