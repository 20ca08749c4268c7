//! `seq` values: `mobius`, `one`, `alternating`, `linear:<α>`,
//! `expbeta:<β>[:<α>]` or `file:<path>`.

use std::fmt;
use std::path::PathBuf;

use osclab::real::Real;
use osclab::seqgen::{load_sequence, ComplexSequence, ExpBetaSpec, SequenceFormat};

use crate::config::{config_err, real, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum SeqSpec {
    Mobius,
    One,
    Alternating,
    Linear(Real),
    ExpBeta { beta: Real, alpha: Real },
    File(PathBuf),
}

impl SeqSpec {
    pub fn parse(s: &str) -> CliResult<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        match (head, rest) {
            ("mobius", "") => Ok(SeqSpec::Mobius),
            ("one", "") => Ok(SeqSpec::One),
            ("alternating", "") => Ok(SeqSpec::Alternating),
            ("linear", a) if !a.is_empty() => Ok(SeqSpec::Linear(real(a, "seq")?)),
            ("expbeta", b) if !b.is_empty() => {
                let (b, a) = b.split_once(':').unwrap_or((b, "1"));
                let spec = SeqSpec::ExpBeta {
                    beta: real(b, "seq")?,
                    alpha: real(a, "seq")?,
                };
                spec.exp_beta()?.validate()?;
                Ok(spec)
            }
            ("file", p) if !p.is_empty() => Ok(SeqSpec::File(PathBuf::from(p))),
            _ => Err(config_err(format!(
                "'seq': expected mobius, one, alternating, linear:<alpha>, expbeta:<beta>[:<alpha>] or file:<path>, got '{s}'"
            ))),
        }
    }

    fn exp_beta(&self) -> CliResult<ExpBetaSpec> {
        match self {
            SeqSpec::ExpBeta { beta, alpha } => Ok(ExpBetaSpec::pure(alpha.clone(), beta.clone())?),
            _ => unreachable!("only called on expbeta"),
        }
    }

    /// Terms `1..=len` (a file supplies what it has).
    pub fn build(&self, len: u64, ceiling_bits: u64) -> CliResult<ComplexSequence> {
        Ok(match self {
            SeqSpec::Mobius => ComplexSequence::mobius(len)?,
            SeqSpec::One => ComplexSequence::constant_one(len),
            SeqSpec::Alternating => ComplexSequence::alternating(len),
            SeqSpec::Linear(a) => ComplexSequence::linear_phase(a, len)?,
            SeqSpec::ExpBeta { .. } => ComplexSequence::exp_beta(&self.exp_beta()?, len, ceiling_bits)?,
            SeqSpec::File(p) => load_sequence(p, SequenceFormat::Auto)?,
        })
    }
}

impl fmt::Display for SeqSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqSpec::Mobius => write!(f, "mobius"),
            SeqSpec::One => write!(f, "one"),
            SeqSpec::Alternating => write!(f, "alternating"),
            SeqSpec::Linear(a) => write!(f, "linear:{a}"),
            SeqSpec::ExpBeta { beta, alpha } => write!(f, "expbeta:{beta}:{alpha}"),
            SeqSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}
