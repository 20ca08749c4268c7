use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{star_discrepancy, weyl_criterion_battery, PointSample1D};
use crate::averaging::{chowla_test, ChowlaPattern, ChowlaResult};
use crate::error::{Error, Result};
use crate::real::{rational_to_f64, Real};
use crate::seqgen::{exp_beta_fractions, ComplexSequence, ExpBetaSpec};

/// Bits of the dyadic grid that sampled `β` live on.
const BETA_BITS: usize = 60;

#[derive(Clone, Debug, PartialEq)]
pub struct KoksmaConfig {
    pub alpha: Real,
    /// Coefficients of `g`, constant term first.
    pub g: Vec<BigRational>,
    pub beta_lo: BigRational,
    pub beta_hi: BigRational,
    pub samples: usize,
    /// Each pattern gives the sequence `Σ kᵢ α β^{n+lᵢ} g(β)`.
    pub patterns: Vec<ChowlaPattern>,
    pub n: u64,
    /// Pass requires `D*_N < discrepancy_factor/√N` ...
    pub discrepancy_factor: f64,
    /// ... and `max_h |Weyl sum| < weyl_factor/√N` for `1 ≤ h ≤ h_max`.
    pub weyl_factor: f64,
    pub h_max: u32,
    /// Correlations of `e(α βⁿ g(β))`, computed for every `β`.
    pub chowla_patterns: Vec<ChowlaPattern>,
    pub chowla_threshold: f64,
    pub ceiling_bits: u64,
}

impl KoksmaConfig {
    /// `α = 1`, `g ≡ 1`, the single pattern `βⁿ`, default thresholds.
    pub fn new(beta_lo: BigRational, beta_hi: BigRational, samples: usize, n: u64) -> Self {
        KoksmaConfig {
            alpha: Real::one(),
            g: vec![BigRational::one()],
            beta_lo,
            beta_hi,
            samples,
            patterns: vec![ChowlaPattern::new(vec![0], vec![1]).expect("valid pattern")],
            n,
            discrepancy_factor: 3.0,
            weyl_factor: 4.0,
            h_max: 8,
            chowla_patterns: Vec::new(),
            chowla_threshold: 0.05,
            ceiling_bits: crate::seqgen::DEFAULT_PRECISION_CEILING,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta_lo <= BigRational::one() || self.beta_hi <= self.beta_lo {
            return Err(Error::invalid("need 1 < beta_lo < beta_hi"));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        if self.n == 0 {
            return Err(Error::invalid("N must be positive"));
        }
        if self.patterns.is_empty() {
            return Err(Error::invalid("at least one pattern is required"));
        }
        if self.h_max == 0 {
            return Err(Error::invalid("h_max must be at least 1"));
        }
        // α and g are checked the same way the kernel checks them
        ExpBetaSpec::new(self.alpha.clone(), Real::from_rational(self.beta_hi.clone()), self.g.clone())?;
        Ok(())
    }

    fn max_shift(&self) -> u64 {
        self.patterns
            .iter()
            .chain(&self.chowla_patterns)
            .map(ChowlaPattern::max_shift)
            .max()
            .unwrap_or(0)
    }
}

/// `samples` dyadic rationals `m/2⁶⁰` in `[lo, hi)`, from a seeded ChaCha8.
pub fn sample_betas(lo: &BigRational, hi: &BigRational, samples: usize, seed: u64) -> Vec<BigRational> {
    let scale = BigInt::one() << BETA_BITS;
    let m_lo = (lo * BigRational::from_integer(scale.clone())).ceil().to_integer();
    let m_hi = (hi * BigRational::from_integer(scale.clone())).floor().to_integer();
    let width = (&m_hi - &m_lo).max(BigInt::one());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let u = BigInt::from(rng.random::<u64>());
            let m = &m_lo + (&width * u >> 64usize);
            BigRational::new(m, scale.clone())
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KoksmaRow {
    pub beta: f64,
    pub pattern: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub discrepancy: Option<f64>,
    pub weyl_max: Option<f64>,
    /// Empty when the kernel failed for this `β`.
    pub pass: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaOutcome {
    pub beta: BigRational,
    pub rows: Vec<KoksmaRow>,
    pub chowla: Vec<ChowlaResult>,
    pub error: Option<String>,
}

impl BetaOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.rows.iter().all(|r| r.pass == Some(true))
    }

    pub fn discrepancy_passed(&self, limit: f64) -> bool {
        self.error.is_none() && self.rows.iter().all(|r| r.discrepancy.is_some_and(|d| d < limit))
    }

    /// Every admissible correlation below `threshold`.
    pub fn chowla_passed(&self, threshold: f64) -> bool {
        self.chowla
            .iter()
            .all(|c| c.excluded || c.value.norm() < threshold)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KoksmaSummary {
    pub seed: u64,
    pub alpha: String,
    pub g: Vec<String>,
    pub beta_interval: [String; 2],
    pub samples: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub patterns: Vec<String>,
    pub discrepancy_threshold: f64,
    pub weyl_threshold: f64,
    pub h_max: u32,
    /// Fraction of `β` passing both thresholds for every pattern.
    pub pass_fraction: f64,
    pub discrepancy_pass_fraction: f64,
    /// Among `β` passing the discrepancy threshold, the fraction whose
    /// admissible correlations are all below the Chowla threshold.
    pub chowla_pass_fraction: Option<f64>,
    pub chowla_patterns: Vec<String>,
    pub chowla_threshold: f64,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KoksmaReport {
    pub outcomes: Vec<BetaOutcome>,
    pub summary: KoksmaSummary,
}

impl KoksmaReport {
    pub fn rows(&self) -> impl Iterator<Item = &KoksmaRow> {
        self.outcomes.iter().flat_map(|o| &o.rows)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn run_beta(cfg: &KoksmaConfig, beta: &BigRational, d_lim: f64, w_lim: f64) -> BetaOutcome {
    let beta_f = rational_to_f64(beta);
    let fail = |e: Error| BetaOutcome {
        beta: beta.clone(),
        rows: cfg
            .patterns
            .iter()
            .map(|p| KoksmaRow {
                beta: beta_f,
                pattern: p.to_string(),
                n: cfg.n,
                discrepancy: None,
                weyl_max: None,
                pass: None,
            })
            .collect(),
        chowla: Vec::new(),
        error: Some(e.to_string()),
    };
    let spec = match ExpBetaSpec::new(cfg.alpha.clone(), Real::from_rational(beta.clone()), cfg.g.clone()) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let total = cfg.n + cfg.max_shift();
    let fracs = match exp_beta_fractions(&spec, total, cfg.ceiling_bits) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let mut rows = Vec::with_capacity(cfg.patterns.len());
    for p in &cfg.patterns {
        // Σ kᵢ frac(y_{n+lᵢ}) ≡ Σ kᵢ y_{n+lᵢ} (mod 1)
        let combined: Vec<u64> = (0..cfg.n as usize)
            .map(|i| {
                p.shifts()
                    .iter()
                    .zip(p.exponents())
                    .fold(0u64, |acc, (&l, &k)| {
                        acc.wrapping_add(fracs[i + l as usize].wrapping_mul(k as u64))
                    })
            })
            .collect();
        let sample = PointSample1D::from_q64(&combined);
        let d = star_discrepancy(&sample).expect("non-empty");
        let w = weyl_criterion_battery(&sample, cfg.h_max).expect("non-empty").max;
        rows.push(KoksmaRow {
            beta: beta_f,
            pattern: p.to_string(),
            n: cfg.n,
            discrepancy: Some(d),
            weyl_max: Some(w),
            pass: Some(d < d_lim && w < w_lim),
        });
    }
    let mut out = BetaOutcome {
        beta: beta.clone(),
        rows,
        chowla: Vec::new(),
        error: None,
    };
    if !cfg.chowla_patterns.is_empty() {
        let seq = ComplexSequence::from_phases("expbeta", fracs);
        out.chowla = chowla_test(&seq, &cfg.chowla_patterns, cfg.n).expect("sequence covers every shift");
    }
    out
}

/// Runs the experiment for `cfg.samples` seeded `β`. Kernel failures for a
/// single `β` are recorded in its outcome; only invalid configs are errors.
pub fn koksma_experiment(cfg: &KoksmaConfig, seed: u64) -> Result<KoksmaReport> {
    cfg.validate()?;
    let sqrt_n = (cfg.n as f64).sqrt();
    let d_lim = cfg.discrepancy_factor / sqrt_n;
    let w_lim = cfg.weyl_factor / sqrt_n;
    let betas = sample_betas(&cfg.beta_lo, &cfg.beta_hi, cfg.samples, seed);
    let outcomes: Vec<BetaOutcome> = betas
        .par_iter()
        .map(|b| run_beta(cfg, b, d_lim, w_lim))
        .collect();

    let passed = outcomes.iter().filter(|o| o.passed()).count();
    let d_passed = outcomes.iter().filter(|o| o.discrepancy_passed(d_lim)).count();
    let chowla_ok = outcomes
        .iter()
        .filter(|o| o.discrepancy_passed(d_lim) && o.chowla_passed(cfg.chowla_threshold))
        .count();
    let show = |q: &BigRational| {
        if q.denom().is_one() {
            q.numer().to_string()
        } else {
            format!("{}/{}", q.numer(), q.denom())
        }
    };
    let summary = KoksmaSummary {
        seed,
        alpha: cfg.alpha.to_string(),
        g: cfg.g.iter().map(show).collect(),
        beta_interval: [show(&cfg.beta_lo), show(&cfg.beta_hi)],
        samples: cfg.samples,
        n: cfg.n,
        patterns: cfg.patterns.iter().map(ChowlaPattern::to_string).collect(),
        discrepancy_threshold: d_lim,
        weyl_threshold: w_lim,
        h_max: cfg.h_max,
        pass_fraction: ratio(passed, outcomes.len()),
        discrepancy_pass_fraction: ratio(d_passed, outcomes.len()),
        chowla_pass_fraction: (!cfg.chowla_patterns.is_empty()).then(|| ratio(chowla_ok, d_passed)),
        chowla_patterns: cfg.chowla_patterns.iter().map(ChowlaPattern::to_string).collect(),
        chowla_threshold: cfg.chowla_threshold,
        errors: outcomes.iter().filter(|o| o.error.is_some()).count(),
    };
    Ok(KoksmaReport { outcomes, summary })
}

/// CSV with columns `beta,pattern,N,discrepancy,weyl_max,pass`.
pub fn write_koksma_csv<W: Write>(report: &KoksmaReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in report.rows() {
        out.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    out.flush()?;
    Ok(())
}
