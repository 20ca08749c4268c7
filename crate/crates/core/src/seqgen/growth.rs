use super::ComplexSequence;
use crate::error::{Error, Result};

/// Number of trailing averages inspected for divergence.
pub const DEFAULT_GROWTH_WINDOW: u64 = 1000;

/// Running bound on the Cesàro averages of `|cₙ|^λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthCertificate {
    pub lambda: f64,
    /// max over 1 ≤ N ≤ n_max of (1/N) Σ_{n≤N} |cₙ|^λ.
    pub c_bound: f64,
    pub n_max: u64,
    /// Averages strictly increased over the last `window` values of N.
    pub divergent: bool,
    pub window: u64,
}

/// Certificate over the first `n_max` terms with the default window.
pub fn check_growth_condition(
    seq: &ComplexSequence,
    lambda: f64,
    n_max: u64,
) -> Result<GrowthCertificate> {
    check_growth_condition_with_window(seq, lambda, n_max, DEFAULT_GROWTH_WINDOW)
}

pub fn check_growth_condition_with_window(
    seq: &ComplexSequence,
    lambda: f64,
    n_max: u64,
    window: u64,
) -> Result<GrowthCertificate> {
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must exceed 1, got {}", lambda)));
    }
    if n_max == 0 {
        return Err(Error::invalid("n_max must be positive"));
    }
    let first = seq.first_index();
    let last = first + n_max - 1;
    seq.require(first, last)?;
    let window = window.clamp(1, n_max);

    // |cₙ|^λ is exactly 1 for unimodular terms and exactly 0 or 1 for μ(n),
    // so those sums are integers and the averages are exact.
    let term = |n: u64| -> f64 {
        if seq.unimodular {
            1.0
        } else if let Some(m) = seq.mobius_value(n) {
            (m != 0) as u8 as f64
        } else {
            seq.at(n).norm().powf(lambda)
        }
    };

    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut c_bound = 0.0f64;
    let mut prev = f64::NAN;
    let mut rising = 0u64;
    for (k, n) in (first..=last).enumerate() {
        let x = term(n);
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
        let avg = (sum + comp) / (k as f64 + 1.0);
        c_bound = c_bound.max(avg);
        rising = if avg > prev { rising + 1 } else { 0 };
        prev = avg;
    }

    Ok(GrowthCertificate {
        lambda,
        c_bound,
        n_max,
        divergent: n_max > 1 && rising >= window.min(n_max - 1),
        window,
    })
}
