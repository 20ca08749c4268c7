//! Arbitrary-precision dyadic numbers with directed rounding, and closed
//! intervals built from them.
//!
//! An [`Interval`] always contains the exact real it stands for. Products are
//! rounded outward to a caller-chosen number of significant bits, so the
//! interval width is an honest bound on the accumulated error.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::real::Real;

/// `mant · 2^exp`, exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }.normalized()
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    /// `2^exp`
    pub fn pow2(exp: i64) -> Self {
        Dyadic {
            mant: BigInt::one(),
            exp,
        }
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Dyadic::new(BigInt::from(sign) * BigInt::from(m), e))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    /// Strip trailing zero bits so multiplications stay small.
    fn normalized(mut self) -> Self {
        if self.mant.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz as usize;
            self.exp += tz as i64;
        }
        self
    }

    /// Significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as usize;
        let b = &other.mant << (other.exp - e) as usize;
        Dyadic::new(a + b, e)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    /// Round toward −∞ to at most `prec` significant bits.
    pub fn round_floor(&self, prec: u64) -> Dyadic {
        let b = self.bits();
        if b <= prec {
            return self.clone();
        }
        let shift = b - prec;
        // BigInt >> floors for negative values
        Dyadic::new(&self.mant >> shift as usize, self.exp + shift as i64)
    }

    /// Round toward +∞ to at most `prec` significant bits.
    pub fn round_ceil(&self, prec: u64) -> Dyadic {
        self.neg().round_floor(prec).neg()
    }

    /// Largest integer ≤ self.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as usize
        } else {
            &self.mant >> (-self.exp) as usize
        }
    }

    /// `self − floor(self)`, in `[0, 1)`.
    pub fn frac(&self) -> Dyadic {
        if self.exp >= 0 {
            return Dyadic::zero();
        }
        let modulus = BigInt::one() << (-self.exp) as usize;
        Dyadic::new(self.mant.mod_floor(&modulus), self.exp)
    }

    /// `floor(frac(self) · 2^64)`.
    pub fn frac_q64(&self) -> u64 {
        let f = self.frac();
        if f.is_zero() {
            return 0;
        }
        let shifted = if f.exp + 64 >= 0 {
            &f.mant << (f.exp + 64) as usize
        } else {
            &f.mant >> (-(f.exp + 64)) as usize
        };
        shifted.to_u64().unwrap_or(u64::MAX)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as usize)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        crate::real::rational_to_f64(&self.to_rational())
    }

    pub fn from_rational_floor(q: &BigRational, prec: u64) -> Dyadic {
        rational_bound(q, prec, false)
    }

    pub fn from_rational_ceil(q: &BigRational, prec: u64) -> Dyadic {
        rational_bound(q, prec, true)
    }
}

fn rational_bound(q: &BigRational, prec: u64, up: bool) -> Dyadic {
    if q.is_zero() {
        return Dyadic::zero();
    }
    let n = q.numer();
    let d = q.denom();
    // floor(n·2^s / d) carries about prec+2 significant bits
    let s = prec as i64 + 2 + d.bits() as i64 - n.bits() as i64;
    let (quot, rem) = if s >= 0 {
        (n << s as usize).div_mod_floor(d)
    } else {
        n.div_mod_floor(&(d << (-s) as usize))
    };
    let m = if up && !rem.is_zero() { quot + 1 } else { quot };
    let v = Dyadic::new(m, -s);
    if up {
        v.round_ceil(prec)
    } else {
        v.round_floor(prec)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.sub(other);
        d.mant.sign().cmp(&num_bigint::Sign::NoSign)
    }
}

/// A closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Dyadic,
    pub hi: Dyadic,
}

impl Interval {
    pub fn point(x: Dyadic) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Interval::point(Dyadic::from_int(n))
    }

    pub fn from_rational(q: &BigRational, prec: u64) -> Self {
        Interval {
            lo: Dyadic::from_rational_floor(q, prec),
            hi: Dyadic::from_rational_ceil(q, prec),
        }
    }

    /// Enclosure of a [`Real`] with roughly `prec` correct bits after the
    /// binary point (plus the integer part).
    pub fn from_real(r: &Real, prec: u64) -> Self {
        if let Some(q) = r.as_rational() {
            return Interval::from_rational(&q, prec);
        }
        let bits = prec as u32 + 8;
        let (lo, hi) = r.enclose_fixed(bits);
        Interval {
            lo: Dyadic::new(lo, -(bits as i64)),
            hi: Dyadic::new(hi, -(bits as i64)),
        }
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.add(&other.lo),
            hi: self.hi.add(&other.hi),
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    /// Product rounded outward to `prec` significant bits.
    pub fn mul(&self, other: &Interval, prec: u64) -> Interval {
        let nonneg = |i: &Interval| !i.lo.is_negative();
        if nonneg(self) && nonneg(other) {
            return Interval {
                lo: self.lo.mul(&other.lo).round_floor(prec),
                hi: self.hi.mul(&other.hi).round_ceil(prec),
            };
        }
        let candidates = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = candidates.iter().min().cloned().unwrap_or_else(Dyadic::zero);
        let hi = candidates.iter().max().cloned().unwrap_or_else(Dyadic::zero);
        Interval {
            lo: lo.round_floor(prec),
            hi: hi.round_ceil(prec),
        }
    }

    /// `self^n` by binary powering, rounded outward.
    pub fn pow(&self, mut n: u64, prec: u64) -> Interval {
        let mut result = Interval::from_int(1);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base, prec);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base, prec);
            }
        }
        result
    }

    /// Fractional part of the enclosed value, certified when the interval is
    /// narrower than `2^-bits`. Returns `floor(frac(lo) · 2^64)`; the true
    /// fractional part lies within `width` above it, circularly.
    pub fn certified_frac_q64(&self, bits: u64) -> Option<u64> {
        if self.width() > Dyadic::pow2(-(bits as i64)) {
            return None;
        }
        Some(self.lo.frac_q64())
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        let lo = self.lo.to_rational();
        let hi = self.hi.to_rational();
        &lo <= q && q <= &hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn f64_roundtrip_is_exact() {
        for x in [0.5, -3.25, 1e-300, 123456.789, f64::MIN_POSITIVE / 8.0] {
            assert_eq!(Dyadic::from_f64(x).unwrap().to_f64(), x);
        }
        assert!(Dyadic::from_f64(f64::NAN).is_none());
    }

    #[test]
    fn directed_rounding_brackets() {
        let third = q(1, 3);
        let i = Interval::from_rational(&third, 100);
        assert!(i.contains_rational(&third));
        assert!(i.width() <= Dyadic::pow2(-100));
        let neg = Interval::from_rational(&-third.clone(), 100);
        assert!(neg.contains_rational(&-third));
    }

    #[test]
    fn big_rational_bounds() {
        let big = BigRational::new(BigInt::from(10).pow(80) + 1, BigInt::from(3));
        let i = Interval::from_rational(&big, 64);
        assert!(i.contains_rational(&big));
        let x = BigRational::from_integer(BigInt::from(1) << 200usize);
        let i = Interval::from_rational(&x, 16);
        assert!(i.is_point());
    }

    #[test]
    fn frac_of_negative() {
        let d = Dyadic::new(BigInt::from(-3), -2); // -0.75
        assert_eq!(d.floor(), BigInt::from(-1));
        assert_eq!(d.frac().to_rational(), q(1, 4));
        assert_eq!(d.frac_q64(), 1u64 << 62);
    }

    #[test]
    fn pow_matches_exact() {
        let three_halves = Interval::from_rational(&q(3, 2), 64);
        let p = three_halves.pow(5, 64);
        assert!(p.is_point());
        assert_eq!(p.lo.to_rational(), q(243, 32));
        let third = Interval::from_rational(&q(1, 3), 80);
        let p = third.pow(7, 80);
        assert!(p.contains_rational(&q(1, 2187)));
    }

    #[test]
    fn mixed_sign_multiplication() {
        let a = Interval {
            lo: Dyadic::from_int(-2),
            hi: Dyadic::from_int(3),
        };
        let b = Interval {
            lo: Dyadic::from_int(-5),
            hi: Dyadic::from_int(1),
        };
        let p = a.mul(&b, 32);
        assert_eq!(p.lo, Dyadic::from_int(-15));
        assert_eq!(p.hi, Dyadic::from_int(10));
    }
}
