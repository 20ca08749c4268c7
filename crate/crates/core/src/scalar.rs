//! Coordinate arithmetic backends for torus flows.
//!
//! [`BigRational`] gives exact lifts (the orbit polynomials are checked against
//! it); [`Fixed`] is a binary fixed-point real with `BITS` fractional bits that
//! carries irrational parameters such as `√2` through long orbits.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::real::{rational_to_f64, Real};

/// Parameter values that can be tested for zero; shared by the arithmetic
/// backends and by [`Real`], which describes parameters before conversion.
pub trait Coefficient: Clone + fmt::Debug + PartialEq {
    fn is_zero_coeff(&self) -> bool;
}

impl Coefficient for Real {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
}

impl Coefficient for BigRational {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
}

impl<const BITS: u32> Coefficient for Fixed<BITS> {
    fn is_zero_coeff(&self) -> bool {
        self.mant.is_zero()
    }
}

pub trait Scalar: Coefficient + Send + Sync + 'static {
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_bigint(n: &BigInt) -> Self;
    fn from_real(r: &Real) -> Result<Self>;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn floor_int(&self) -> BigInt;
    fn to_f64(&self) -> f64;
    fn as_rational(&self) -> Option<BigRational>;

    fn from_int(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    fn zero_val() -> Self {
        Self::from_int(0)
    }

    fn is_zero_val(&self) -> bool {
        self.is_zero_coeff()
    }

    fn scale_int(&self, n: &BigInt) -> Self {
        self.times(&Self::from_bigint(n))
    }

    fn frac(&self) -> Self {
        self.minus(&Self::from_bigint(&self.floor_int()))
    }

    /// Fractional part as an `f64` in `[0, 1)`.
    fn frac_f64(&self) -> f64 {
        let f = self.frac().to_f64();
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn from_real(r: &Real) -> Result<Self> {
        r.as_rational()
            .ok_or_else(|| Error::NotExact(format!("{} is irrational", r)))
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn minus(&self, other: &Self) -> Self {
        self - other
    }

    fn times(&self, other: &Self) -> Self {
        self * other
    }

    fn floor_int(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn as_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn frac_f64(&self) -> f64 {
        let r = self.numer().mod_floor(self.denom());
        let f = rational_to_f64(&BigRational::new(r, self.denom().clone()));
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    }
}

/// Fixed-point real `mant · 2^-BITS`, truncating toward −∞ on multiplication.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Fixed<const BITS: u32> {
    mant: BigInt,
}

/// Default high-precision backend.
pub type HpReal = Fixed<256>;

impl<const BITS: u32> Fixed<BITS> {
    pub fn from_mantissa(mant: BigInt) -> Self {
        Fixed { mant }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }
}

impl<const BITS: u32> fmt::Debug for Fixed<BITS> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fixed<{}>({})", BITS, self.to_f64())
    }
}

impl<const BITS: u32> Scalar for Fixed<BITS> {
    const EXACT: bool = false;

    fn from_bigint(n: &BigInt) -> Self {
        Fixed {
            mant: n << BITS as usize,
        }
    }

    fn from_real(r: &Real) -> Result<Self> {
        Ok(Fixed {
            mant: r.enclose_fixed(BITS).0,
        })
    }

    fn plus(&self, other: &Self) -> Self {
        Fixed {
            mant: &self.mant + &other.mant,
        }
    }

    fn minus(&self, other: &Self) -> Self {
        Fixed {
            mant: &self.mant - &other.mant,
        }
    }

    fn times(&self, other: &Self) -> Self {
        Fixed {
            mant: (&self.mant * &other.mant) >> BITS as usize,
        }
    }

    fn scale_int(&self, n: &BigInt) -> Self {
        Fixed {
            mant: &self.mant * n,
        }
    }

    fn floor_int(&self) -> BigInt {
        &self.mant >> BITS as usize
    }

    fn frac(&self) -> Self {
        let modulus = BigInt::one() << BITS as usize;
        Fixed {
            mant: self.mant.mod_floor(&modulus),
        }
    }

    fn frac_f64(&self) -> f64 {
        let modulus = BigInt::one() << BITS as usize;
        let r = self.mant.mod_floor(&modulus);
        // top 53 bits of the fraction
        let top = if BITS > 53 {
            r >> (BITS - 53) as usize
        } else {
            r << (53 - BITS) as usize
        };
        top.to_f64().unwrap_or(0.0) * 2f64.powi(-53)
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(&BigRational::new(
            self.mant.clone(),
            BigInt::one() << BITS as usize,
        ))
    }

    fn as_rational(&self) -> Option<BigRational> {
        None
    }
}

/// Signed circular offset `x − y` reduced to `[-1/2, 1/2)` as `f64`.
pub fn circle_offset<S: Scalar>(x: &S, y: &S) -> f64 {
    let d = x.minus(y).frac_f64();
    if d >= 0.5 {
        d - 1.0
    } else {
        d
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_tracks_surds() {
        let r: Real = "sqrt(2)".parse().unwrap();
        let x = HpReal::from_real(&r).unwrap();
        let sq = x.times(&x);
        assert!((sq.to_f64() - 2.0).abs() < 1e-70);
        let big = x.scale_int(&BigInt::from(1_000_000_007i64));
        let expected = (1_000_000_007f64 * std::f64::consts::SQRT_2).fract();
        assert!((big.frac_f64() - expected).abs() < 1e-6);
    }

    #[test]
    fn negative_fraction() {
        let x = HpReal::from_real(&"-1/4".parse().unwrap()).unwrap();
        assert_eq!(x.floor_int(), BigInt::from(-1));
        assert_eq!(x.frac_f64(), 0.75);
        let q = BigRational::from_real(&"-1/4".parse().unwrap()).unwrap();
        assert_eq!(q.frac_f64(), 0.75);
        assert_eq!(q.frac(), BigRational::new(3.into(), 4.into()));
    }

    #[test]
    fn exact_rejects_irrational() {
        let r: Real = "phi".parse().unwrap();
        assert!(BigRational::from_real(&r).is_err());
    }

    #[test]
    fn circle_offsets() {
        let a = BigRational::from_real(&"0.9".parse().unwrap()).unwrap();
        let b = BigRational::from_int(0);
        assert!((circle_offset(&a, &b) + 0.1).abs() < 1e-15);
    }
}
