//! `osc-lab`: config-driven runner for the osclab experiments.
//!
//! Every subcommand reads its options from flags and/or a section of the
//! `--config` file, writes `report.csv` and `summary.json` into `--out`, and
//! exits with 0 when every verdict passed, 1 when one failed and 2 on a
//! configuration or runtime error.

pub mod commands;
pub mod config;
pub mod seqspec;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use osclab::averaging::Verdict;
use serde_json::json;
use toml::Table;

use commands::{
    AcceptArgs, ArithArgs, ChowlaArgs, DisjointArgs, DiscrepancyArgs, Env, ExpBetaArgs, ExpandArgs, KoksmaArgs,
    MmaArgs, MobiusArgs, Outcome, Plan, QdsArgs, TriangularizeArgs, WeylArgs,
};
use config::{check_section, config_err, load_config, merge, CliError, CliResult, ConfigFile};

pub const DEFAULT_SEED: u64 = osclab::acceptance::DEFAULT_SEED;
pub const DEFAULT_OUT: &str = "osc-lab-out";

/// Subcommand names, which double as config section names.
pub const COMMAND_NAMES: [&str; 13] = [
    "mobius",
    "expbeta",
    "expand",
    "weyl",
    "arith",
    "disjoint",
    "chowla",
    "koksma",
    "mma",
    "qds",
    "triangularize",
    "discrepancy",
    "accept",
];

#[derive(Debug, Parser)]
#[command(name = "osc-lab", version, about = "Oscillating sequences and polynomial skew products on the torus")]
pub struct Cli {
    /// TOML config; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default osc-lab-out).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest working precision of the βⁿ kernel, in bits.
    #[arg(long, global = true)]
    pub precision_ceiling: Option<u64>,
    /// Mark cells that exceed the precision ceiling as skipped instead of failing.
    #[arg(long, global = true)]
    pub allow_skip: bool,
    /// Validate the configuration and print the planned cell count.
    #[arg(long, global = true)]
    pub dry_run: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Möbius sieve, means of μ and the growth check.
    Mobius(MobiusArgs),
    /// Exponential sequence e(α βⁿ g(β)).
    #[command(name = "expbeta")]
    ExpBeta(ExpBetaArgs),
    /// Orbit polynomials of a rational flow and their degree bounds.
    Expand(ExpandArgs),
    /// Oscillation of order d: Weyl averages over sampled phases.
    Weyl(WeylArgs),
    /// Oscillation in the arithmetic sense: Weyl averages on progressions.
    Arith(ArithArgs),
    /// Cesàro averages of cₙ φ(fⁿx) along a flow.
    Disjoint(DisjointArgs),
    /// Chowla correlations.
    Chowla(ChowlaArgs),
    /// u.d. mod 1 of frac(α βⁿ g(β)) for sampled β.
    Koksma(KoksmaArgs),
    /// Mean distance between two orbits.
    Mma(MmaArgs),
    /// Binomial phase model on a Jordan chain.
    Qds(QdsArgs),
    /// Unipotent integer matrix to lower unitriangular form.
    Triangularize(TriangularizeArgs),
    /// Star discrepancy of a point set.
    Discrepancy(DiscrepancyArgs),
    /// Acceptance suite.
    Accept(AcceptArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mobius(_) => "mobius",
            Command::ExpBeta(_) => "expbeta",
            Command::Expand(_) => "expand",
            Command::Weyl(_) => "weyl",
            Command::Arith(_) => "arith",
            Command::Disjoint(_) => "disjoint",
            Command::Chowla(_) => "chowla",
            Command::Koksma(_) => "koksma",
            Command::Mma(_) => "mma",
            Command::Qds(_) => "qds",
            Command::Triangularize(_) => "triangularize",
            Command::Discrepancy(_) => "discrepancy",
            Command::Accept(_) => "accept",
        }
    }
}

fn validate_sections(cfg: &ConfigFile) -> CliResult<()> {
    for (name, v) in &cfg.sections {
        match name.as_str() {
            "mobius" => check_section::<MobiusArgs>(name, v),
            "expbeta" => check_section::<ExpBetaArgs>(name, v),
            "expand" => check_section::<ExpandArgs>(name, v),
            "weyl" => check_section::<WeylArgs>(name, v),
            "arith" => check_section::<ArithArgs>(name, v),
            "disjoint" => check_section::<DisjointArgs>(name, v),
            "chowla" => check_section::<ChowlaArgs>(name, v),
            "koksma" => check_section::<KoksmaArgs>(name, v),
            "mma" => check_section::<MmaArgs>(name, v),
            "qds" => check_section::<QdsArgs>(name, v),
            "triangularize" => check_section::<TriangularizeArgs>(name, v),
            "discrepancy" => check_section::<DiscrepancyArgs>(name, v),
            "accept" => check_section::<AcceptArgs>(name, v),
            _ => Err(config_err(format!("unknown section [{name}]"))),
        }?;
    }
    Ok(())
}

fn resolve_env(cli: &Cli, cfg: &ConfigFile) -> CliResult<Env> {
    let r = &cfg.run;
    let seed = match (cli.seed, &r.seed) {
        (Some(s), _) => s,
        (None, Some(s)) => config::parse_int(s, "seed")?,
        (None, None) => DEFAULT_SEED,
    };
    let threads = match (cli.threads, &r.threads) {
        (Some(t), _) => Some(t),
        (None, Some(t)) => Some(config::parse_int(t, "threads")?),
        (None, None) => None,
    };
    if threads == Some(0) {
        return Err(config_err("'threads' must be at least 1"));
    }
    let precision_ceiling = match (cli.precision_ceiling, &r.precision_ceiling) {
        (Some(p), _) => p,
        (None, Some(p)) => config::parse_int(p, "precision_ceiling")?,
        (None, None) => osclab::seqgen::DEFAULT_PRECISION_CEILING,
    };
    let allow_skip = cli.allow_skip || config::bool_or(&r.allow_skip, "allow_skip", false)?;
    Ok(Env {
        seed,
        threads,
        precision_ceiling,
        allow_skip,
    })
}

fn prepare(cli: &Cli, cfg: &ConfigFile, env: &Env) -> CliResult<(Plan, Table)> {
    let section = cfg.sections.get(cli.command.name());
    macro_rules! go {
        ($args:expr, $f:path) => {{
            let (a, echo) = merge($args, section)?;
            Ok(($f(a, env)?, echo))
        }};
    }
    match &cli.command {
        Command::Mobius(a) => go!(a, commands::sequences::mobius),
        Command::ExpBeta(a) => go!(a, commands::sequences::expbeta),
        Command::Expand(a) => go!(a, commands::dynamics::expand),
        Command::Weyl(a) => go!(a, commands::averaging::weyl),
        Command::Arith(a) => go!(a, commands::averaging::arith),
        Command::Disjoint(a) => go!(a, commands::dynamics::disjoint),
        Command::Chowla(a) => go!(a, commands::averaging::chowla),
        Command::Koksma(a) => go!(a, commands::equidist::koksma),
        Command::Mma(a) => go!(a, commands::dynamics::mma),
        Command::Qds(a) => go!(a, commands::dynamics::qds),
        Command::Triangularize(a) => go!(a, commands::dynamics::triangularize),
        Command::Discrepancy(a) => go!(a, commands::equidist::discrepancy),
        Command::Accept(a) => go!(a, commands::accept::accept),
    }
}

fn write_file(dir: &Path, name: &str, content: &str) -> CliResult<()> {
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })
}

fn skipped_outcome(command: &str, cells: usize, err: &CliError) -> Outcome {
    let row = osclab::averaging::ReportRow {
        param: err.to_string(),
        verdict: Verdict::Skipped,
        ..commands::row(command)
    };
    let mut o = Outcome::from_rows(&[row]);
    o.skipped = cells;
    o.ok = true;
    o
}

/// Parses `argv` and runs the command; returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "osc-lab: error: {e}");
            2
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<i32> {
    let start = Instant::now();
    let cfg = match &cli.config {
        Some(p) => load_config(p)?,
        None => ConfigFile::default(),
    };
    validate_sections(&cfg)?;
    let env = resolve_env(cli, &cfg)?;
    let name = cli.command.name();
    let (plan, echo) = prepare(cli, &cfg, &env)?;
    if cli.dry_run {
        let _ = writeln!(out, "{name}: configuration valid, {} cells planned", plan.cells);
        return Ok(0);
    }
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.run.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));

    let cells = plan.cells;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = env.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| config_err(e.to_string()))?;
    let outcome = match pool.install(plan.run) {
        Ok(o) => o,
        Err(e @ CliError::Lib(osclab::Error::PrecisionBudget { .. })) if env.allow_skip => {
            skipped_outcome(name, cells, &e)
        }
        Err(e) => return Err(e),
    };

    std::fs::create_dir_all(&dir).map_err(|source| CliError::File {
        path: dir.display().to_string(),
        source,
    })?;
    write_file(&dir, "report.csv", &outcome.csv)?;
    for (file, content) in &outcome.files {
        write_file(&dir, file, content)?;
    }
    let summary = json!({
        "command": name,
        "config_echo": {
            "seed": env.seed,
            "threads": env.threads,
            "precision_ceiling": env.precision_ceiling,
            "allow_skip": env.allow_skip,
            name: echo,
        },
        "cells": cells,
        "passed": outcome.passed,
        "failed": outcome.failed,
        "skipped": outcome.skipped,
        "wall_time_s": start.elapsed().as_secs_f64(),
    });
    write_file(&dir, "summary.json", &commands::dynamics::pretty(&summary))?;

    for line in &outcome.lines {
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(
        out,
        "{name}: {cells} cells, {} passed, {} failed, {} skipped; reports in {}",
        outcome.passed,
        outcome.failed,
        outcome.skipped,
        dir.display()
    );
    Ok(if outcome.ok { 0 } else { 1 })
}
