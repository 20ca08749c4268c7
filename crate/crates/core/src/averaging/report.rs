use std::io::Write;

use serde::Serialize;

use super::{ArithmeticReport, CesaroSeries, ChowlaResult, OscillationReport};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Intermediate checkpoint or a value reported without a threshold.
    Info,
    /// Pattern outside the Chowla condition.
    Excluded,
    Skipped,
}

impl Verdict {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One CSV row: `test,sequence,flow,observable,param,k,l,N,re,im,abs,threshold,verdict`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub test: String,
    pub sequence: String,
    pub flow: String,
    pub observable: String,
    pub param: String,
    pub k: Option<u64>,
    pub l: Option<u64>,
    #[serde(rename = "N")]
    pub n: u64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub threshold: Option<f64>,
    pub verdict: Verdict,
}

impl ReportRow {
    /// One row per checkpoint; the last one carries the verdict when a
    /// threshold is given.
    pub fn from_series(
        template: &ReportRow,
        series: &CesaroSeries,
        threshold: Option<f64>,
    ) -> Vec<ReportRow> {
        let last = series.checkpoints.len().saturating_sub(1);
        (0..series.checkpoints.len())
            .map(|i| {
                let v = series.values[i];
                let verdict = match threshold {
                    Some(t) if i == last => Verdict::from_bool(series.magnitude[i] < t),
                    _ => Verdict::Info,
                };
                ReportRow {
                    n: series.checkpoints[i],
                    re: v.re,
                    im: v.im,
                    abs: series.magnitude[i],
                    threshold,
                    verdict,
                    ..template.clone()
                }
            })
            .collect()
    }

    fn template(test: &str, sequence: &str) -> ReportRow {
        ReportRow {
            test: test.into(),
            sequence: sequence.into(),
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
}

impl OscillationReport {
    pub fn rows(&self, test: &str, sequence: &str) -> Vec<ReportRow> {
        self.phase_samples
            .iter()
            .zip(&self.series)
            .flat_map(|(s, series)| {
                let t = ReportRow {
                    observable: s.label.clone(),
                    param: s.poly.to_string(),
                    k: Some(1),
                    l: Some(0),
                    ..ReportRow::template(test, sequence)
                };
                ReportRow::from_series(&t, series, Some(self.threshold))
            })
            .collect()
    }
}

impl ArithmeticReport {
    pub fn rows(&self, test: &str, sequence: &str) -> Vec<ReportRow> {
        self.cells
            .iter()
            .flat_map(|c| {
                let s = &self.phase_samples[c.sample];
                let t = ReportRow {
                    observable: s.label.clone(),
                    param: s.poly.to_string(),
                    k: Some(c.k),
                    l: Some(c.l),
                    ..ReportRow::template(test, sequence)
                };
                ReportRow::from_series(&t, &c.series, Some(self.threshold))
            })
            .collect()
    }
}

/// Rows for a Chowla table; excluded patterns carry no verdict.
pub fn chowla_rows(results: &[ChowlaResult], test: &str, sequence: &str, n: u64, threshold: f64) -> Vec<ReportRow> {
    results
        .iter()
        .map(|r| {
            let abs = r.value.norm();
            ReportRow {
                param: r.pattern.to_string(),
                n,
                re: r.value.re,
                im: r.value.im,
                abs,
                threshold: Some(threshold),
                verdict: if r.excluded {
                    Verdict::Excluded
                } else {
                    Verdict::from_bool(abs < threshold)
                },
                ..ReportRow::template(test, sequence)
            }
        })
        .collect()
}

pub fn write_report<W: Write>(rows: &[ReportRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averaging::{chowla_test, enumerate_patterns, oscillation_order_test, SamplerConfig};
    use crate::seqgen::ComplexSequence;

    #[test]
    fn csv_layout() {
        let seq = ComplexSequence::alternating(100);
        let cfg = SamplerConfig {
            random: 1,
            ..SamplerConfig::default()
        };
        let r = oscillation_order_test(&seq, 1, &cfg, &[10, 100], 0.5).unwrap();
        let rows = r.rows("weyl", "alt");
        assert_eq!(rows.len(), 2 * r.phase_samples.len());
        assert_eq!(rows[0].verdict, Verdict::Info);
        let mut buf = Vec::new();
        write_report(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "test,sequence,flow,observable,param,k,l,N,re,im,abs,threshold,verdict"
        );
        assert!(lines.next().unwrap().starts_with("weyl,alt,,rand0,"));

        let c = chowla_test(&seq, &enumerate_patterns(1, 0, 2), 90).unwrap();
        let rows = chowla_rows(&c, "chowla", "alt", 90, 0.05);
        assert_eq!(rows[0].verdict, Verdict::Pass);
        assert_eq!(rows[1].verdict, Verdict::Excluded);
    }
}
