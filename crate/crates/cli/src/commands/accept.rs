use osclab::acceptance::{determinism_check, CriterionResult, RUNNERS};
use osclab::averaging::{ReportRow, Verdict};

use super::{row, string_args, Env, Outcome, Plan};
use crate::config::{config_err, int_list, CliResult};

string_args! {
    /// Runs the acceptance criteria and writes one row per criterion.
    AcceptArgs {
        /// Comma-separated criterion numbers (default 1..=12).
        only,
    }
}

fn criterion_row(r: &CriterionResult) -> ReportRow {
    ReportRow {
        observable: format!("criterion {}", r.id),
        param: format!("{}: {}", r.title, r.detail),
        verdict: Verdict::from_bool(r.passed),
        ..row("accept")
    }
}

pub fn accept(a: AcceptArgs, env: &Env) -> CliResult<Plan> {
    let which: Vec<usize> = match &a.only {
        Some(s) => int_list(s, "only")?,
        None => (1..=12).collect(),
    };
    if which.is_empty() || which.iter().any(|i| !(1..=12).contains(i)) {
        return Err(config_err("'only' must list criteria between 1 and 12"));
    }
    let seed = env.seed;
    Ok(Plan::new(which.len(), move || {
        let mut results = Vec::new();
        for &i in which.iter().filter(|&&i| i <= 11) {
            results.push(RUNNERS[i - 1](seed)?);
        }
        if which.contains(&12) {
            let first = if results.is_empty() {
                let all: Vec<usize> = (1..=11).collect();
                all.iter().map(|&i| RUNNERS[i - 1](seed)).collect::<osclab::Result<Vec<_>>>()?
            } else {
                results.clone()
            };
            results.push(determinism_check(&first, seed, 1)?);
        }
        let rows: Vec<ReportRow> = results.iter().map(criterion_row).collect();
        let mut o = Outcome::from_rows(&rows);
        o.lines = results.iter().map(CriterionResult::line).collect();
        for r in &results {
            o.files.push((format!("criterion_{:02}.txt", r.id), r.report.clone()));
        }
        Ok(o)
    }))
}
