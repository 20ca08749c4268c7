//! Uniform distribution mod 1: star discrepancy, Weyl sums over small
//! frequencies, and the sampling experiment over random bases `β`.

mod koksma;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phasor::{e, q64_to_f64, KahanSum};
use crate::seqgen::{exp_beta_fractions, ExpBetaSpec};

pub use koksma::{
    koksma_experiment, sample_betas, write_koksma_csv, BetaOutcome, KoksmaConfig, KoksmaReport,
    KoksmaRow, KoksmaSummary,
};

/// Largest sample the quadratic oracle accepts.
pub const BRUTE_FORCE_MAX: usize = 5000;

/// Points of `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSample1D {
    values: Vec<f64>,
}

impl PointSample1D {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(Error::invalid(format!("sample value {v} is outside [0, 1)")));
        }
        Ok(PointSample1D { values })
    }

    pub fn from_q64(q: &[u64]) -> Self {
        PointSample1D {
            values: q.iter().map(|&x| q64_to_f64(x)).collect(),
        }
    }

    /// Centered grid `(i − 1/2)/n`, `i = 1..=n`.
    pub fn centered_grid(n: usize) -> Self {
        let nf = n as f64;
        PointSample1D {
            values: (0..n).map(|i| (2 * i + 1) as f64 / (2.0 * nf)).collect(),
        }
    }

    /// Grid `i/n`, `i = 0..n`.
    pub fn grid(n: usize) -> Self {
        PointSample1D {
            values: (0..n).map(|i| i as f64 / n as f64).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn require_points(s: &PointSample1D) -> Result<()> {
    if s.is_empty() {
        Err(Error::invalid("sample is empty"))
    } else {
        Ok(())
    }
}

/// `D*_N = max_i max(i/N − u₍ᵢ₎, u₍ᵢ₎ − (i−1)/N)` over the sorted points.
pub fn star_discrepancy(sample: &PointSample1D) -> Result<f64> {
    require_points(sample)?;
    let mut u = sample.values.clone();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    Ok(u.iter().enumerate().fold(0.0f64, |acc, (i, &x)| {
        let above = (i + 1) as f64 / n - x;
        let below = x - i as f64 / n;
        acc.max(above).max(below)
    }))
}

/// `sup_t |#{xₙ < t}/N − t|` and the right limits `#{xₙ ≤ t}/N`, over
/// `t` in the sample and `t = 1`, by direct counting.
pub fn star_discrepancy_bruteforce(sample: &PointSample1D) -> Result<f64> {
    require_points(sample)?;
    if sample.n() > BRUTE_FORCE_MAX {
        return Err(Error::Resource(format!(
            "brute-force discrepancy is limited to {} points, got {}",
            BRUTE_FORCE_MAX,
            sample.n()
        )));
    }
    let n = sample.n() as f64;
    let mut best = 0.0f64;
    for &t in sample.values.iter().chain(std::iter::once(&1.0)) {
        let open = sample.values.iter().filter(|&&x| x < t).count();
        let closed = sample.values.iter().filter(|&&x| x <= t).count();
        best = best.max((open as f64 / n - t).abs());
        best = best.max((closed as f64 / n - t).abs());
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylBattery {
    /// `|(1/N) Σ e(h xₙ)|` for `h = 1..=h_max`; `−h` has the same magnitude.
    pub magnitudes: Vec<f64>,
    pub max: f64,
}

pub fn weyl_criterion_battery(sample: &PointSample1D, h_max: u32) -> Result<WeylBattery> {
    require_points(sample)?;
    if h_max == 0 {
        return Err(Error::invalid("h_max must be at least 1"));
    }
    let n = sample.n() as f64;
    let magnitudes: Vec<f64> = (1..=h_max)
        .map(|h| {
            let mut s = KahanSum::new();
            for &x in &sample.values {
                s.add(e(h as f64 * x));
            }
            (s.value() / Complex64::new(n, 0.0)).norm()
        })
        .collect();
    Ok(WeylBattery {
        max: magnitudes.iter().copied().fold(0.0, f64::max),
        magnitudes,
    })
}

/// `frac(α βⁿ g(β))` for `n = 1..=N` from the certified kernel.
pub fn frac_parts(spec: &ExpBetaSpec, n: u64, ceiling_bits: u64) -> Result<PointSample1D> {
    Ok(PointSample1D::from_q64(&exp_beta_fractions(spec, n, ceiling_bits)?))
}
