use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::RationalPoly;
use crate::error::{Error, Result};
use crate::phasor::q128_to_f64;
use crate::real::rational_to_f64;

/// Real polynomial with `f64` coefficients, constant term first.
///
/// Each coefficient is an exact dyadic `m·2^e`, so `P(n) mod 1` can be
/// evaluated without rounding: `c·nʲ mod 1` only depends on the low bits of
/// `m·nʲ`, which wrapping `u128` arithmetic gets exactly.
#[derive(Clone, PartialEq)]
pub struct PhasePolynomial {
    coeffs: Vec<f64>,
    dyadic: Vec<(i64, i32)>,
}

impl fmt::Debug for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhasePolynomial({:?})", self.coeffs)
    }
}

impl fmt::Display for PhasePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, "]")
    }
}

/// `x = m·2^e` with `m` odd (or zero).
fn decompose(x: f64) -> (i64, i32) {
    if x == 0.0 {
        return (0, 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i64;
    let (mut m, mut e) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), exp_bits - 1075)
    };
    let tz = m.trailing_zeros() as i32;
    m >>= tz;
    e += tz;
    (sign * m, e)
}

impl PhasePolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Result<Self> {
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("non-finite coefficient {}", c)));
        }
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        let dyadic = coeffs.iter().map(|&c| decompose(c)).collect();
        Ok(PhasePolynomial { coeffs, dyadic })
    }

    pub fn zero() -> Self {
        PhasePolynomial {
            coeffs: Vec::new(),
            dyadic: Vec::new(),
        }
    }

    /// Nearest-`f64` rounding of each coefficient.
    pub fn from_rational(p: &RationalPoly) -> Self {
        Self::new(p.coeffs().iter().map(rational_to_f64).collect())
            .expect("rational coefficients are finite")
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect()).expect("finite")
    }

    /// `floor(frac(P(n)) · 2¹²⁸)`, up to one unit per coefficient below 2⁻¹²⁸.
    pub fn eval_q128(&self, n: u64) -> u128 {
        let mut acc = 0u128;
        let mut pow = 1u128; // nʲ mod 2¹²⁸
        for (j, &(m, e)) in self.dyadic.iter().enumerate() {
            if j > 0 {
                pow = pow.wrapping_mul(n as u128);
            }
            if m == 0 || e >= 0 {
                continue;
            }
            let s = (-e) as u32;
            let term = if s <= 128 {
                let t = (m as i128 as u128).wrapping_mul(pow);
                if s == 128 {
                    t
                } else {
                    t << (128 - s)
                }
            } else {
                // |c| < 2⁻⁷⁵: needs the high bits of m·nʲ
                let full = BigInt::from(m) * num_traits::pow(BigInt::from(n), j);
                let shifted = full >> (s - 128) as usize;
                let r = shifted & ((BigInt::one() << 128usize) - 1u32);
                r.to_u128().expect("reduced mod 2^128")
            };
            acc = acc.wrapping_add(term);
        }
        acc
    }

    /// `P(n) mod 1` in `[0, 1)`.
    pub fn eval_mod1(&self, n: u64) -> f64 {
        q128_to_f64(self.eval_q128(n))
    }

    /// Plain `f64` Horner value (not reduced), for diagnostics.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::parse_rational;
    use num_rational::BigRational;
    use num_traits::Zero;
    use proptest::prelude::*;

    #[test]
    fn decompose_is_exact() {
        for x in [1.0, -0.75, 0.1, 1e-300, 5e-324, 123456.789, -2f64.powi(70)] {
            let (m, e) = decompose(x);
            assert_eq!(m as f64 * 2f64.powi(e), x);
            assert!(m % 2 != 0);
        }
    }

    #[test]
    fn examples() {
        let p = PhasePolynomial::new(vec![0.0, 0.25]).unwrap();
        assert_eq!(p.eval_mod1(6), 0.5);
        assert_eq!(PhasePolynomial::zero().eval_mod1(5), 0.0);
        let p = PhasePolynomial::new(vec![0.0, 0.5]).unwrap();
        assert_eq!(p.eval_q128(3), 1 << 127);
        assert!(PhasePolynomial::new(vec![f64::NAN]).is_err());
        assert_eq!(PhasePolynomial::new(vec![1.0, 0.0, 0.0]).unwrap().degree(), 0);
    }

    #[test]
    fn large_arguments_stay_exact() {
        // θ n² with θ = 0.1 (as an f64) at n = 10⁹ is far beyond f64 Horner
        let theta = 0.1f64;
        let p = PhasePolynomial::new(vec![0.0, 0.0, theta]).unwrap();
        let q = BigRational::from_float(theta).unwrap();
        let n = 1_000_000_007u64;
        let exact = RationalPoly::from_coeffs(vec![BigRational::zero(), BigRational::zero(), q]);
        let want = rational_to_f64(&exact.eval_mod1(n as i64));
        assert!((p.eval_mod1(n) - want).abs() < 1e-15);
    }

    #[test]
    fn tiny_coefficients_use_big_path() {
        let c = 3.0 * 2f64.powi(-140);
        let p = PhasePolynomial::new(vec![0.0, 0.0, 0.0, c]).unwrap();
        let n = 1u64 << 40;
        // c·n³ = 3·2⁻²⁰
        assert_eq!(p.eval_q128(n), 3u128 << 108);
    }

    proptest! {
        #[test]
        fn matches_exact_rational_evaluation(
            cs in prop::collection::vec(-1000i64..1000, 1..7),
            den_pow in 0u32..20,
            n in 0u64..1_000_000,
        ) {
            let den = 1i64 << den_pow;
            let coeffs: Vec<f64> = cs.iter().map(|&c| c as f64 / den as f64).collect();
            let p = PhasePolynomial::new(coeffs).unwrap();
            let r = RationalPoly::from_coeffs(
                cs.iter().map(|&c| BigRational::new(c.into(), den.into())).collect(),
            );
            let want = r.eval_mod1(n as i64);
            let got = p.eval_q128(n);
            let want_q = (want * BigRational::from_integer(BigInt::one() << 128usize)).to_integer();
            prop_assert_eq!(BigInt::from(got), want_q);
        }
    }

    #[test]
    fn from_rational_rounds() {
        let r = RationalPoly::from_coeffs(vec![parse_rational("1/3").unwrap()]);
        let p = PhasePolynomial::from_rational(&r);
        assert_eq!(p.coeffs(), &[1.0 / 3.0]);
    }
}
