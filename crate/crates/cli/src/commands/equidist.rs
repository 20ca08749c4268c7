use osclab::averaging::{chowla_rows, enumerate_patterns, ReportRow, Verdict};
use osclab::equidist::{
    frac_parts, koksma_experiment, star_discrepancy, weyl_criterion_battery, write_koksma_csv, KoksmaConfig,
    PointSample1D,
};
use osclab::seqgen::ExpBetaSpec;

use super::dynamics::pretty;
use super::{row, string_args, Env, Outcome, Plan};
use crate::config::{
    config_err, int_list, int_or, number, number_or, rational, rational_list, real, req_int, required, CliError,
    CliResult,
};

string_args! {
    /// Sampled β in [beta_lo, beta_hi): discrepancy and Weyl sums of frac(α βⁿ g(β)).
    KoksmaArgs {
        /// Lower end of the β interval (default 11/10).
        beta_lo,
        /// Upper end (default 3).
        beta_hi,
        /// Number of β (default 200).
        samples,
        /// Terms per β (default 4000).
        n,
        alpha,
        g,
        /// D* must stay below factor/√N (default 3).
        discrepancy_factor,
        /// Weyl sums must stay below factor/√N (default 4).
        weyl_factor,
        /// Frequencies 1..=h_max in the Weyl battery (default 8).
        h_max,
        /// Correlation patterns as `r_max,shift_max,exp_max`, or `none` (default).
        chowla,
        /// Bound on the correlations (default 0.05).
        chowla_threshold,
        /// Smallest fraction of β that must pass (default 0.9).
        min_pass_fraction,
    }
}

pub fn koksma(a: KoksmaArgs, env: &Env) -> CliResult<Plan> {
    let lo = rational(a.beta_lo.as_deref().unwrap_or("11/10"), "beta_lo")?;
    let hi = rational(a.beta_hi.as_deref().unwrap_or("3"), "beta_hi")?;
    let mut cfg = KoksmaConfig::new(lo, hi, int_or(&a.samples, "samples", 200)?, int_or(&a.n, "n", 4000)?);
    if let Some(s) = &a.alpha {
        cfg.alpha = real(s, "alpha")?;
    }
    if let Some(s) = &a.g {
        cfg.g = rational_list(s, "g")?;
    }
    cfg.discrepancy_factor = number_or(&a.discrepancy_factor, "discrepancy_factor", cfg.discrepancy_factor)?;
    cfg.weyl_factor = number_or(&a.weyl_factor, "weyl_factor", cfg.weyl_factor)?;
    cfg.h_max = int_or(&a.h_max, "h_max", cfg.h_max)?;
    cfg.chowla_threshold = number_or(&a.chowla_threshold, "chowla_threshold", cfg.chowla_threshold)?;
    cfg.ceiling_bits = env.precision_ceiling;
    match a.chowla.as_deref().map(str::trim) {
        None | Some("none") => {}
        Some(s) => {
            let v: Vec<u64> = int_list(s, "chowla")?;
            let [r, l, k] = v[..] else {
                return Err(config_err("'chowla' must be r_max,shift_max,exp_max"));
            };
            cfg.chowla_patterns = enumerate_patterns(r as usize, l, k as u32);
        }
    }
    let min_fraction = number_or(&a.min_pass_fraction, "min_pass_fraction", 0.9)?;
    cfg.validate()?;
    let (seed, allow_skip) = (env.seed, env.allow_skip);
    Ok(Plan::new(cfg.samples, move || {
        let r = koksma_experiment(&cfg, seed)?;
        let s = &r.summary;
        if s.errors > 0 && !allow_skip {
            return Err(CliError::Config(format!(
                "precision budget exceeded for {} of {} β; raise --precision-ceiling or pass --allow-skip",
                s.errors, s.samples
            )));
        }
        let mut csv = Vec::new();
        write_koksma_csv(&r, &mut csv)?;
        let mut o = Outcome {
            csv: String::from_utf8(csv).expect("csv is utf-8"),
            ..Outcome::default()
        };
        let with_chowla = !cfg.chowla_patterns.is_empty();
        let mut chowla = Vec::new();
        for b in &r.outcomes {
            if b.error.is_some() {
                o.skipped += 1;
            } else if b.passed() && (!with_chowla || b.chowla_passed(cfg.chowla_threshold)) {
                o.passed += 1;
            } else {
                o.failed += 1;
            }
            if with_chowla {
                let name = format!("beta={}", b.beta);
                chowla.extend(chowla_rows(&b.chowla, "koksma_chowla", &name, cfg.n, cfg.chowla_threshold));
            }
        }
        let chowla_ok = s.chowla_pass_fraction.is_none_or(|f| f == 1.0);
        o.ok = s.pass_fraction >= min_fraction && chowla_ok;
        o.lines.push(format!(
            "koksma {} β N={}: pass fraction {:.4} (need ≥ {min_fraction}), D* fraction {:.4}{} {}",
            s.samples,
            s.n,
            s.pass_fraction,
            s.discrepancy_pass_fraction,
            s.chowla_pass_fraction
                .map_or(String::new(), |f| format!(", Chowla fraction {f:.4}")),
            if o.ok { "PASS" } else { "FAIL" }
        ));
        let summary = serde_json::to_value(s).expect("summary serializes");
        o = o.with_file("koksma.json", pretty(&summary));
        if with_chowla {
            o = o.with_file("chowla.csv", Outcome::from_rows(&chowla).csv);
        }
        Ok(o)
    }))
}

string_args! {
    /// Star discrepancy and Weyl battery of a point set.
    DiscrepancyArgs {
        /// Centered grid (i − 1/2)/n.
        grid,
        /// File with one value in [0, 1) per line.
        values,
        /// frac(α βⁿ) for n = 1..=n (needs `n`).
        beta,
        alpha,
        n,
        /// Frequencies 1..=h_max (default 8).
        h_max,
        /// D* must stay below factor/√N (none: report only).
        factor,
    }
}

enum Source {
    Grid(usize),
    Values(PointSample1D, String),
    Beta(ExpBetaSpec, u64),
}

pub fn discrepancy(a: DiscrepancyArgs, env: &Env) -> CliResult<Plan> {
    let given = [a.grid.is_some(), a.values.is_some(), a.beta.is_some()];
    if given.iter().filter(|&&g| g).count() != 1 {
        return Err(config_err("give exactly one of 'grid', 'values' or 'beta'"));
    }
    let source = if let Some(g) = &a.grid {
        Source::Grid(crate::config::parse_int(g, "grid")?)
    } else if let Some(path) = &a.values {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::File {
            path: path.clone(),
            source,
        })?;
        let v = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| number(l, "values"))
            .collect::<CliResult<Vec<f64>>>()?;
        Source::Values(PointSample1D::new(v)?, path.clone())
    } else {
        let beta = real(required(&a.beta, "beta")?, "beta")?;
        let alpha = real(a.alpha.as_deref().unwrap_or("1"), "alpha")?;
        Source::Beta(ExpBetaSpec::pure(alpha, beta)?, req_int(&a.n, "n")?)
    };
    let h_max: u32 = int_or(&a.h_max, "h_max", 8)?;
    let factor = a.factor.as_deref().map(|f| number(f, "factor")).transpose()?;
    let ceiling = env.precision_ceiling;
    Ok(Plan::new(2, move || {
        let (sample, name) = match source {
            Source::Grid(n) => (PointSample1D::centered_grid(n), format!("grid:{n}")),
            Source::Values(s, p) => (s, format!("file:{p}")),
            Source::Beta(spec, n) => (
                frac_parts(&spec, n, ceiling)?,
                format!("expbeta:{}:{}", spec.beta, spec.alpha),
            ),
        };
        let n = sample.n() as u64;
        let d = star_discrepancy(&sample)?;
        let w = weyl_criterion_battery(&sample, h_max)?;
        let limit = factor.map(|f| f / (n as f64).sqrt());
        let rows = vec![
            ReportRow {
                sequence: name.clone(),
                observable: "star_discrepancy".into(),
                n,
                re: d,
                abs: d,
                threshold: limit,
                verdict: limit.map_or(Verdict::Info, |l| Verdict::from_bool(d < l)),
                ..row("discrepancy")
            },
            ReportRow {
                sequence: name,
                observable: "weyl_max".into(),
                param: format!("h_max={h_max}"),
                n,
                re: w.max,
                abs: w.max,
                ..row("discrepancy")
            },
        ];
        let mut o = Outcome::from_rows(&rows);
        o.lines.insert(0, format!("discrepancy N={n}: D* = {d:.6e}, max Weyl sum {:.6e}", w.max));
        Ok(o)
    }))
}
