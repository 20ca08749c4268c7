use std::fmt::Write as _;

use num_bigint::BigUint;
use osclab::averaging::{weyl_series, Verdict};
use osclab::equidist::{frac_parts, star_discrepancy};
use osclab::orbitpoly::PhasePolynomial;
use osclab::seqgen::{check_growth_condition, ComplexSequence, ExpBetaSpec, GrowthCertificate};

use super::{row, string_args, Env, Outcome, Plan};
use crate::config::{checkpoints, number_or, rational_list, real, req_int, required, CliResult};

/// Exact decimal of `q/2⁶⁴`.
pub fn q64_decimal(q: u64) -> String {
    if q == 0 {
        return "0".into();
    }
    let digits = (BigUint::from(q) * BigUint::from(5u32).pow(64)).to_string();
    let s = format!("0.{digits:0>64}");
    s.trim_end_matches('0').to_string()
}

fn growth_row(seq: &ComplexSequence, cert: &GrowthCertificate) -> osclab::averaging::ReportRow {
    osclab::averaging::ReportRow {
        sequence: seq.name.clone(),
        observable: "growth".into(),
        param: format!("lambda={},divergent={}", cert.lambda, cert.divergent),
        n: cert.n_max,
        re: cert.c_bound,
        abs: cert.c_bound,
        verdict: Verdict::from_bool(!cert.divergent),
        ..row("growth")
    }
}

string_args! {
    /// Möbius sieve: sequence file, Cesàro means of μ and the growth check.
    MobiusArgs {
        /// Last index of the sieve.
        nmax,
        /// Comma-separated N at which the mean of μ is reported.
        checkpoints,
        /// Exponent of the growth condition (default 2).
        lambda,
    }
}

pub fn mobius(a: MobiusArgs, _env: &Env) -> CliResult<Plan> {
    let nmax: u64 = req_int(&a.nmax, "nmax")?;
    let cps = checkpoints(&a.checkpoints, nmax)?;
    let lambda = number_or(&a.lambda, "lambda", 2.0)?;
    Ok(Plan::new(cps.len() + 1, move || {
        let seq = ComplexSequence::mobius(nmax)?;
        let series = weyl_series(&seq, &PhasePolynomial::zero(), &cps)?;
        let cert = check_growth_condition(&seq, lambda, nmax)?;
        let t = osclab::averaging::ReportRow {
            sequence: "mobius".into(),
            observable: "mean".into(),
            ..row("mobius")
        };
        let mut rows = osclab::averaging::ReportRow::from_series(&t, &series, None);
        rows.push(growth_row(&seq, &cert));
        let mut text = String::from("# n0=1\n");
        for n in 1..=nmax {
            writeln!(text, "{},0", seq.mobius_value(n).expect("sieved")).ok();
        }
        Ok(Outcome::from_rows(&rows).with_file("sequence.txt", text))
    }))
}

string_args! {
    /// Exponential sequence e(α βⁿ g(β)) from the certified kernel.
    ExpBetaArgs {
        /// Base β > 1 (decimal, p/q, or surd such as `phi` or `1+sqrt(2)`).
        beta,
        /// Factor α (default 1).
        alpha,
        /// Coefficients of g, constant term first (default 1).
        g,
        /// Number of terms.
        nmax,
    }
}

pub fn expbeta(a: ExpBetaArgs, env: &Env) -> CliResult<Plan> {
    let beta = real(required(&a.beta, "beta")?, "beta")?;
    let alpha = real(a.alpha.as_deref().unwrap_or("1"), "alpha")?;
    let g = rational_list(a.g.as_deref().unwrap_or("1"), "g")?;
    let nmax: u64 = req_int(&a.nmax, "nmax")?;
    let spec = ExpBetaSpec::new(alpha, beta, g)?;
    spec.validate()?;
    let ceiling = env.precision_ceiling;
    Ok(Plan::new(2, move || {
        let seq = ComplexSequence::exp_beta(&spec, nmax, ceiling)?;
        let cert = check_growth_condition(&seq, 2.0, nmax)?;
        let d = star_discrepancy(&frac_parts(&spec, nmax, ceiling)?)?;
        let rows = vec![
            growth_row(&seq, &cert),
            osclab::averaging::ReportRow {
                sequence: seq.name.clone(),
                observable: "star_discrepancy".into(),
                n: nmax,
                re: d,
                abs: d,
                ..row("expbeta")
            },
        ];
        let mut text = String::from("# n0=1\n");
        for n in 1..=nmax {
            writeln!(text, "phase:{}", q64_decimal(seq.phase_q64(n).expect("phase-backed"))).ok();
        }
        Ok(Outcome::from_rows(&rows).with_file("sequence.txt", text))
    }))
}
