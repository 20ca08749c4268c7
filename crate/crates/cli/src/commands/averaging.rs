use osclab::averaging::{
    arithmetic_oscillation_test, chowla_rows, chowla_test, enumerate_patterns, oscillation_order_test,
    sample_phase_polynomials, SamplerConfig,
};

use super::{string_args, Env, Outcome, Plan};
use crate::config::{bool_or, checkpoints, int_or, number_or, req_int, CliResult};
use crate::seqspec::SeqSpec;

fn sequence(v: &Option<String>) -> CliResult<SeqSpec> {
    SeqSpec::parse(v.as_deref().unwrap_or("mobius"))
}

fn sampler(random: &Option<String>, structured: &Option<String>, env: &Env) -> CliResult<SamplerConfig> {
    Ok(SamplerConfig {
        seed: env.seed,
        random: int_or(random, "samples", 16)?,
        structured: bool_or(structured, "structured", true)?,
        extra: Vec::new(),
    })
}

string_args! {
    /// Weyl averages (1/N) Σ cₙ e(P(n)) over sampled phases of degree ≤ d.
    WeylArgs {
        /// Sequence (default mobius).
        seq,
        nmax,
        /// Largest phase degree (default 1).
        degree,
        checkpoints,
        /// Bound on |S_N| at the last checkpoint (default 0.02).
        threshold,
        /// Number of random phases (default 16).
        samples,
        /// Include the structured phases (default true).
        structured,
    }
}

pub fn weyl(a: WeylArgs, env: &Env) -> CliResult<Plan> {
    let spec = sequence(&a.seq)?;
    let nmax: u64 = req_int(&a.nmax, "nmax")?;
    let d: usize = int_or(&a.degree, "degree", 1)?;
    let cps = checkpoints(&a.checkpoints, nmax)?;
    let threshold = number_or(&a.threshold, "threshold", 0.02)?;
    let cfg = sampler(&a.samples, &a.structured, env)?;
    let cells = sample_phase_polynomials(d, &cfg)?.len();
    let ceiling = env.precision_ceiling;
    Ok(Plan::new(cells, move || {
        let seq = spec.build(nmax, ceiling)?;
        let r = oscillation_order_test(&seq, d, &cfg, &cps, threshold)?;
        Ok(Outcome::from_rows(&r.rows("weyl", &spec.to_string())))
    }))
}

string_args! {
    /// Weyl averages along progressions n ≡ l (mod k), normalized by N.
    ArithArgs {
        seq,
        nmax,
        degree,
        /// Largest modulus (default 4).
        kmax,
        checkpoints,
        threshold,
        samples,
        structured,
    }
}

pub fn arith(a: ArithArgs, env: &Env) -> CliResult<Plan> {
    let spec = sequence(&a.seq)?;
    let nmax: u64 = req_int(&a.nmax, "nmax")?;
    let d: usize = int_or(&a.degree, "degree", 1)?;
    let k_max: u64 = int_or(&a.kmax, "kmax", 4)?;
    if k_max == 0 {
        return Err(crate::config::config_err("'kmax' must be at least 1"));
    }
    let cps = checkpoints(&a.checkpoints, nmax)?;
    let threshold = number_or(&a.threshold, "threshold", 0.02)?;
    let cfg = sampler(&a.samples, &a.structured, env)?;
    let cells = sample_phase_polynomials(d, &cfg)?.len() * (k_max * (k_max + 1) / 2) as usize;
    let ceiling = env.precision_ceiling;
    Ok(Plan::new(cells, move || {
        let seq = spec.build(nmax, ceiling)?;
        let r = arithmetic_oscillation_test(&seq, d, k_max, &cfg, &cps, threshold)?;
        Ok(Outcome::from_rows(&r.rows("arith", &spec.to_string())))
    }))
}

string_args! {
    /// Correlations (1/N) Σ c_{n+l₁}^{k₁} ⋯ c_{n+l_r}^{k_r}.
    ChowlaArgs {
        seq,
        /// Number of terms averaged.
        n,
        /// Largest number of factors (default 2).
        r_max,
        /// Largest shift (default 3).
        shift_max,
        /// Largest exponent (default 2).
        exp_max,
        /// Bound on |avg| (default 0.05).
        threshold,
    }
}

pub fn chowla(a: ChowlaArgs, env: &Env) -> CliResult<Plan> {
    let spec = sequence(&a.seq)?;
    let n: u64 = req_int(&a.n, "n")?;
    let patterns = enumerate_patterns(
        int_or(&a.r_max, "r_max", 2)?,
        int_or(&a.shift_max, "shift_max", 3)?,
        int_or(&a.exp_max, "exp_max", 2)?,
    );
    if patterns.is_empty() {
        return Err(crate::config::config_err("no patterns: r_max and exp_max must be at least 1"));
    }
    let threshold = number_or(&a.threshold, "threshold", 0.05)?;
    let len = n + patterns.iter().map(|p| p.max_shift()).max().unwrap_or(0);
    let ceiling = env.precision_ceiling;
    Ok(Plan::new(patterns.len(), move || {
        let seq = spec.build(len, ceiling)?;
        let results = chowla_test(&seq, &patterns, n)?;
        Ok(Outcome::from_rows(&chowla_rows(&results, "chowla", &spec.to_string(), n, threshold)))
    }))
}
