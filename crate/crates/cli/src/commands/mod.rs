pub mod accept;
pub mod averaging;
pub mod dynamics;
pub mod equidist;
pub mod sequences;

use osclab::averaging::{write_report, ReportRow, Verdict};

use crate::config::CliResult;

pub use accept::AcceptArgs;
pub use averaging::{ArithArgs, ChowlaArgs, WeylArgs};
pub use dynamics::{DisjointArgs, ExpandArgs, MmaArgs, QdsArgs, TriangularizeArgs};
pub use equidist::{DiscrepancyArgs, KoksmaArgs};
pub use sequences::{ExpBetaArgs, MobiusArgs};

/// Run-wide settings after merging flags, config file and defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct Env {
    pub seed: u64,
    pub threads: Option<usize>,
    pub precision_ceiling: u64,
    pub allow_skip: bool,
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Contents of `report.csv`.
    pub csv: String,
    /// Further files written next to the report.
    pub files: Vec<(String, String)>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    /// Overall verdict; commands whose verdict is an aggregate set it
    /// themselves, the others derive it from `failed`.
    pub ok: bool,
    /// One line per verdict, printed to stdout.
    pub lines: Vec<String>,
}

impl Outcome {
    pub fn from_rows(rows: &[ReportRow]) -> Self {
        let mut csv = Vec::new();
        write_report(rows, &mut csv).expect("writing to memory");
        let mut o = Outcome {
            csv: String::from_utf8(csv).expect("csv is utf-8"),
            ..Outcome::default()
        };
        for r in rows {
            match r.verdict {
                Verdict::Pass => o.passed += 1,
                Verdict::Fail => o.failed += 1,
                Verdict::Skipped => o.skipped += 1,
                Verdict::Info | Verdict::Excluded => continue,
            }
            o.lines.push(row_line(r));
        }
        o.ok = o.failed == 0;
        o
    }

    pub fn with_file(mut self, name: &str, content: String) -> Self {
        self.files.push((name.into(), content));
        self
    }
}

fn row_line(r: &ReportRow) -> String {
    let mut s = r.test.clone();
    for part in [&r.sequence, &r.flow, &r.observable, &r.param] {
        if !part.is_empty() {
            s.push(' ');
            s.push_str(part);
        }
    }
    if let (Some(k), Some(l)) = (r.k, r.l) {
        s.push_str(&format!(" k={k} l={l}"));
    }
    let verdict = format!("{:?}", r.verdict).to_uppercase();
    match r.threshold {
        Some(t) => format!("{s} N={}: {:.6e} (threshold {t}) {verdict}", r.n, r.abs),
        None => format!("{s} N={}: {:.6e} {verdict}", r.n, r.abs),
    }
}

/// Blank row with the given test name.
pub fn row(test: &str) -> ReportRow {
    ReportRow {
        test: test.into(),
        sequence: String::new(),
        flow: String::new(),
        observable: String::new(),
        param: String::new(),
        k: None,
        l: None,
        n: 0,
        re: 0.0,
        im: 0.0,
        abs: 0.0,
        threshold: None,
        verdict: Verdict::Info,
    }
}

/// A validated command, ready to run.
pub struct Plan {
    pub cells: usize,
    pub run: Box<dyn FnOnce() -> CliResult<Outcome> + Send>,
}

impl Plan {
    pub fn new(cells: usize, run: impl FnOnce() -> CliResult<Outcome> + Send + 'static) -> Self {
        Plan {
            cells,
            run: Box::new(run),
        }
    }
}

/// `Option<String>` fields shared by clap and serde.
macro_rules! string_args {
    ($(#[$meta:meta])* $name:ident { $($(#[$fmeta:meta])* $field:ident),* $(,)? }) => {
        $(#[$meta])*
        #[derive(clap::Args, Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fmeta])*
                #[arg(long)]
                #[serde(default, skip_serializing_if = "Option::is_none")]
                pub $field: Option<String>,
            )*
        }
    };
}
pub(crate) use string_args;
