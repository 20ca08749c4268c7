use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::orbitpoly::PhasePolynomial;

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSample {
    pub label: String,
    pub poly: PhasePolynomial,
}

impl PhaseSample {
    pub fn new(label: impl Into<String>, poly: PhasePolynomial) -> Self {
        PhaseSample {
            label: label.into(),
            poly,
        }
    }
}

/// Phase polynomials to test against: `random` draws with coefficients
/// uniform in `[0, 1)`, optionally the structured corner cases, then `extra`.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub random: usize,
    pub structured: bool,
    pub extra: Vec<PhaseSample>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            random: 16,
            structured: true,
            extra: Vec::new(),
        }
    }
}

const GOLDEN_FRAC: f64 = 0.618_033_988_749_894_9;

pub fn sample_phase_polynomials(d: usize, cfg: &SamplerConfig) -> Result<Vec<PhaseSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.random + 4 + cfg.extra.len());
    for i in 0..cfg.random {
        let coeffs = (0..=d).map(|_| rng.random::<f64>()).collect();
        out.push(PhaseSample::new(format!("rand{i}"), PhasePolynomial::new(coeffs)?));
    }
    if cfg.structured {
        let mut lead = vec![0.0; d + 1];
        lead[d] = 0.5;
        let mut golden = vec![GOLDEN_FRAC; d + 1];
        golden[0] = 0.0;
        let small = (0..=d)
            .map(|j| if j == 0 { 0.0 } else { 1.0 / (j as f64 + 2.0) })
            .collect();
        out.push(PhaseSample::new("zero", PhasePolynomial::zero()));
        out.push(PhaseSample::new("half_lead", PhasePolynomial::new(lead)?));
        out.push(PhaseSample::new("golden", PhasePolynomial::new(golden)?));
        out.push(PhaseSample::new("small_rational", PhasePolynomial::new(small)?));
    }
    for s in &cfg.extra {
        if s.poly.degree() > d {
            return Err(Error::invalid(format!(
                "phase {} has degree {} > {}",
                s.label,
                s.poly.degree(),
                d
            )));
        }
        out.push(s.clone());
    }
    if out.is_empty() {
        return Err(Error::invalid("no phase polynomials to test"));
    }
    Ok(out)
}
