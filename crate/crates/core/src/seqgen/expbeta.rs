//! Fractional parts of `α βⁿ g(β)` with certified leading bits.
//!
//! `βⁿ` loses about `n·log₂β` leading bits to the integer part, so the kernel
//! works in interval arithmetic at a precision sized for the largest `n`.
//! Each block of [`REDERIVE_EVERY`] terms starts from a fresh binary power and
//! then advances by one multiplication per term; blocks are independent and
//! run in parallel. A term is emitted only when its enclosure is narrower than
//! `2^-guard_bits`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::bigfloat::Interval;
use crate::error::{Error, Result};
use crate::real::Real;

/// Terms between fresh re-derivations of `βⁿ`.
pub const REDERIVE_EVERY: u64 = 1024;

/// Default ceiling on the precision budget, in bits.
pub const DEFAULT_PRECISION_CEILING: u64 = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub guard_bits: u64,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { guard_bits: 64 }
    }
}

impl PrecisionPolicy {
    /// `⌈n·log₂β⌉ + ⌈log₂(|α·g(β)| + 1)⌉ + guard_bits`.
    ///
    /// `log2_beta` and `scale` should be upper bounds; the result is then
    /// nondecreasing in `n`.
    pub fn bits_for(&self, n: u64, log2_beta: f64, scale: f64) -> u64 {
        let growth = (n as f64 * log2_beta).ceil().max(0.0) as u64;
        let offset = (scale.abs() + 1.0).log2().ceil().max(0.0) as u64;
        growth + offset + self.guard_bits
    }
}

/// Parameters of `cₙ = e(α βⁿ g(β))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpBetaSpec {
    pub alpha: Real,
    pub beta: Real,
    /// Coefficients of `g`, constant term first, all nonnegative.
    pub g: Vec<BigRational>,
    pub policy: PrecisionPolicy,
}

impl ExpBetaSpec {
    pub fn new(alpha: Real, beta: Real, g: Vec<BigRational>) -> Result<Self> {
        let spec = ExpBetaSpec {
            alpha,
            beta,
            g,
            policy: PrecisionPolicy::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `g ≡ 1`.
    pub fn pure(alpha: Real, beta: Real) -> Result<Self> {
        Self::new(alpha, beta, vec![BigRational::from_integer(BigInt::from(1))])
    }

    pub fn with_policy(mut self, policy: PrecisionPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.is_zero() {
            return Err(Error::invalid("alpha must be nonzero"));
        }
        if self.beta.sub(&Real::one()).signum() <= 0 {
            return Err(Error::invalid("beta must exceed 1"));
        }
        if self.g.iter().any(|c| c.is_negative()) {
            return Err(Error::invalid("g must have nonnegative coefficients"));
        }
        if self.g.iter().all(|c| c.is_zero()) {
            return Err(Error::invalid("g must be positive at beta"));
        }
        if self.policy.guard_bits == 0 {
            return Err(Error::invalid("guard_bits must be positive"));
        }
        Ok(())
    }

    fn log2_beta_upper(&self) -> f64 {
        self.beta.to_f64().log2() * (1.0 + 1e-12) + 1e-12
    }

    fn scale_upper(&self) -> f64 {
        let b = self.beta.to_f64();
        let g: f64 = self
            .g
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * b + crate::real::rational_to_f64(c));
        (self.alpha.to_f64() * g).abs() * (1.0 + 1e-12)
    }

    /// Precision budget for terms up to index `n`.
    pub fn bits_for(&self, n: u64) -> u64 {
        self.policy
            .bits_for(n, self.log2_beta_upper(), self.scale_upper())
    }

    /// Enclosure of `α·g(β)` at `prec` bits.
    fn scale_interval(&self, beta: &Interval, prec: u64) -> Interval {
        let mut g = Interval::from_int(0);
        for c in self.g.iter().rev() {
            g = g.mul(beta, prec).add(&Interval::from_rational(c, prec));
        }
        Interval::from_real(&self.alpha, prec).mul(&g, prec)
    }
}

/// `floor(frac(α βⁿ g(β)) · 2⁶⁴)` for n = 1..=n_max.
///
/// Fails with [`Error::PrecisionBudget`] if the budget for `n_max` exceeds
/// `ceiling_bits` or certification keeps failing.
pub fn exp_beta_fractions(spec: &ExpBetaSpec, n_max: u64, ceiling_bits: u64) -> Result<Vec<u64>> {
    spec.validate()?;
    let budget = spec.bits_for(n_max);
    if budget > ceiling_bits {
        return Err(Error::PrecisionBudget {
            needed: budget,
            ceiling: ceiling_bits,
        });
    }
    // headroom for the rounding steps between re-derivations and the
    // n-fold amplification of β's own enclosure error
    let slack = 64 - (n_max + 2 * REDERIVE_EVERY).leading_zeros() as u64 + 16;
    let mut prec = budget + slack;
    for _ in 0..3 {
        match exp_beta_fractions_with_precision(spec, n_max, prec) {
            Err(Error::PrecisionBudget { .. }) => prec += prec / 2,
            other => return other,
        }
    }
    Err(Error::PrecisionBudget {
        needed: prec,
        ceiling: ceiling_bits,
    })
}

/// Same as [`exp_beta_fractions`] at a fixed working precision `prec`
/// (significant bits). Fails if any term cannot be certified.
pub fn exp_beta_fractions_with_precision(
    spec: &ExpBetaSpec,
    n_max: u64,
    prec: u64,
) -> Result<Vec<u64>> {
    spec.validate()?;
    let beta = Interval::from_real(&spec.beta, prec);
    let scale = spec.scale_interval(&beta, prec);
    let guard = spec.policy.guard_bits;

    let blocks: Vec<(u64, u64)> = (0..n_max.div_ceil(REDERIVE_EVERY))
        .map(|b| {
            let start = b * REDERIVE_EVERY + 1;
            (start, (start + REDERIVE_EVERY - 1).min(n_max))
        })
        .collect();

    let chunks: Vec<Result<Vec<u64>>> = blocks
        .par_iter()
        .map(|&(start, end)| {
            let mut y = scale.mul(&beta.pow(start, prec), prec);
            let mut out = Vec::with_capacity((end - start + 1) as usize);
            for n in start..=end {
                let q = y.certified_frac_q64(guard).ok_or(Error::PrecisionBudget {
                    needed: prec,
                    ceiling: prec,
                })?;
                out.push(q);
                if n < end {
                    y = y.mul(&beta, prec);
                }
            }
            Ok(out)
        })
        .collect();

    let mut all = Vec::with_capacity(n_max as usize);
    for c in chunks {
        all.extend(c?);
    }
    Ok(all)
}
