//! Text sequence files.
//!
//! One term per line, either `re,im` or `phase:<decimal>` for `e(phase)`.
//! An optional `# n0=<first index>` header sets the first index (default 1);
//! other lines starting with `#` and blank lines are ignored.

use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{ComplexSequence, SequenceKind};
use crate::error::{Error, Result};
use crate::phasor;
use crate::real::parse_rational;

/// Which line forms a file may contain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SequenceFormat {
    /// Either form, per line.
    #[default]
    Auto,
    /// Only `re,im`.
    Pairs,
    /// Only `phase:<decimal>`.
    Phases,
}

enum Term {
    Value(Complex64),
    Phase(u64),
}

pub fn load_sequence(path: impl AsRef<Path>, format: SequenceFormat) -> Result<ComplexSequence> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut seq = parse_sequence_as(&text, format)?;
    seq.name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "file".into());
    Ok(seq)
}

/// Parse a sequence accepting both line forms.
pub fn parse_sequence(text: &str) -> Result<ComplexSequence> {
    parse_sequence_as(text, SequenceFormat::Auto)
}

pub fn parse_sequence_as(text: &str, format: SequenceFormat) -> Result<ComplexSequence> {
    let mut first = 1u64;
    let mut seen_term = false;
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("n0=") {
                if seen_term {
                    return Err(Error::parse(lineno, "n0 header after the first term"));
                }
                first = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad first index {:?}", v.trim())))?;
                if first == 0 {
                    return Err(Error::parse(lineno, "first index must be positive"));
                }
            }
            continue;
        }
        seen_term = true;
        terms.push(parse_term(line, format).map_err(|msg| Error::parse(lineno, msg))?);
    }
    if terms.is_empty() {
        return Err(Error::parse(0, "sequence file has no terms"));
    }
    if first.checked_add(terms.len() as u64).is_none() {
        return Err(Error::parse(0, "index range overflows"));
    }

    if terms.iter().all(|t| matches!(t, Term::Phase(_))) {
        let phases = terms
            .into_iter()
            .map(|t| match t {
                Term::Phase(q) => q,
                Term::Value(_) => unreachable!(),
            })
            .collect();
        let mut seq = ComplexSequence::from_phases("file", phases);
        seq.kind = SequenceKind::FromFile;
        seq.first = first;
        return Ok(seq);
    }
    let values = terms
        .into_iter()
        .map(|t| match t {
            Term::Value(z) => z,
            Term::Phase(q) => phasor::e_q64(q),
        })
        .collect();
    Ok(ComplexSequence::from_values(
        SequenceKind::FromFile,
        "file",
        first,
        values,
    ))
}

fn parse_term(line: &str, format: SequenceFormat) -> std::result::Result<Term, String> {
    if let Some(p) = line.strip_prefix("phase:") {
        if format == SequenceFormat::Pairs {
            return Err("phase line in a pairs-only file".into());
        }
        let q = parse_rational(p.trim()).map_err(|e| format!("bad phase: {}", e))?;
        // floor(frac(q) · 2⁶⁴), exact
        let num = (q.numer() << 64usize).div_floor(q.denom());
        let r = num.mod_floor(&(BigInt::from(1) << 64usize));
        return Ok(Term::Phase(r.to_u64().expect("reduced mod 2^64")));
    }
    if format == SequenceFormat::Phases {
        return Err("expected phase:<decimal>".into());
    }
    let (re, im) = line
        .split_once(',')
        .ok_or_else(|| "expected re,im or phase:<decimal>".to_string())?;
    let parse = |s: &str| -> std::result::Result<f64, String> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| format!("bad number {:?}", s.trim()))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite value {:?}", s.trim()))
        }
    };
    Ok(Term::Value(Complex64::new(parse(re)?, parse(im)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_pairs_are_unimodular() {
        let s = parse_sequence("1,0\n-1,0\n1,0\n-1,0\n").unwrap();
        assert!(s.unimodular);
        assert_eq!(s.kind, SequenceKind::FromFile);
        assert_eq!(s.len(), 4);
        assert_eq!(s.at(1), Complex64::new(1.0, 0.0));
        assert_eq!(s.at(2), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn header_and_phases() {
        let s = parse_sequence("# made by hand\n# n0=5\nphase:0.25\nphase:1/2\n").unwrap();
        assert_eq!(s.first_index(), 5);
        assert_eq!(s.phase_q64(5), Some(1 << 62));
        assert_eq!(s.phase_q64(6), Some(1 << 63));
        assert!(s.get(4).is_none());
        let s = parse_sequence("phase:-0.25\n0,1\n").unwrap();
        assert!((s.at(1) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!(s.unimodular);
    }

    #[test]
    fn non_unimodular_detected() {
        let s = parse_sequence("0.5,0\n1,0\n").unwrap();
        assert!(!s.unimodular);
    }

    #[test]
    fn rejects_empty_nan_and_garbage() {
        assert!(parse_sequence("").is_err());
        assert!(parse_sequence("# only a comment\n\n").is_err());
        match parse_sequence("1,0\nNaN,0\n") {
            Err(Error::Parse { line: 2, msg }) => assert!(msg.contains("non-finite")),
            other => panic!("{:?}", other),
        }
        assert!(matches!(
            parse_sequence("1,0\ninf,0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_sequence("hello\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_sequence("phase:nan\n").is_err());
        assert!(parse_sequence("1,0\n# n0=3\n").is_err());
    }

    #[test]
    fn format_restrictions() {
        assert!(parse_sequence_as("phase:0.1\n", SequenceFormat::Pairs).is_err());
        assert!(parse_sequence_as("1,0\n", SequenceFormat::Phases).is_err());
    }

    #[test]
    fn load_from_disk() {
        let dir = std::env::temp_dir().join(format!("osclab-seq-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("alt.txt");
        std::fs::write(&p, "1,0\n-1,0\n").unwrap();
        let s = load_sequence(&p, SequenceFormat::Auto).unwrap();
        assert_eq!(s.name, "alt.txt");
        assert!(s.unimodular);
        std::fs::remove_dir_all(&dir).unwrap();
        assert!(matches!(
            load_sequence(dir.join("missing"), SequenceFormat::Auto),
            Err(Error::Io(_))
        ));
    }
}
