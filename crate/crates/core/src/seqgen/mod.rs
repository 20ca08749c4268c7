//! Sequences `(cₙ)` under study: Möbius, `e(α βⁿ g(β))`, sequences read from
//! files, and synthetic closures used for controls.
//!
//! A [`ComplexSequence`] is immutable once built and cheap to clone (the
//! backing storage is shared), so many averaging cells can read it at once.

mod expbeta;
mod file;
mod growth;
mod mobius;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phasor;
use crate::real::Real;
use crate::scalar::{Fixed, Scalar};

pub use expbeta::{
    exp_beta_fractions, exp_beta_fractions_with_precision, ExpBetaSpec, PrecisionPolicy,
    DEFAULT_PRECISION_CEILING, REDERIVE_EVERY,
};
pub use file::{load_sequence, parse_sequence, parse_sequence_as, SequenceFormat};
pub use growth::{
    check_growth_condition, check_growth_condition_with_window, GrowthCertificate,
    DEFAULT_GROWTH_WINDOW,
};
pub use mobius::mobius_sieve;

/// Tolerance for treating a term as unit modulus.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// `cₙ = e(α βⁿ g(β))` for n = 1..=n_max.
pub fn exp_beta_sequence(spec: &ExpBetaSpec, n_max: u64, ceiling_bits: u64) -> Result<ComplexSequence> {
    ComplexSequence::exp_beta(spec, n_max, ceiling_bits)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceKind {
    Mobius,
    ExpBeta,
    FromFile,
    Synthetic,
}

#[derive(Clone)]
enum Values {
    /// μ(n) at index n − first.
    Mobius(Arc<[i8]>),
    /// Q0.64 phases; cₙ = e(q/2⁶⁴).
    Phases(Arc<[u64]>),
    Complex(Arc<[Complex64]>),
    Func(Arc<dyn Fn(u64) -> Complex64 + Send + Sync>),
}

#[derive(Clone)]
pub struct ComplexSequence {
    pub kind: SequenceKind,
    pub name: String,
    pub unimodular: bool,
    pub claimed_order: Option<u32>,
    first: u64,
    len: u64,
    values: Values,
}

impl fmt::Debug for ComplexSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexSequence")
            .field("kind", &self.kind)
            .field("name", &self.name)
            .field("unimodular", &self.unimodular)
            .field("first", &self.first)
            .field("len", &self.len)
            .finish()
    }
}

impl ComplexSequence {
    /// Möbius sequence μ(1), …, μ(n_max).
    pub fn mobius(n_max: u64) -> Result<Self> {
        let table = mobius_sieve(n_max)?;
        Ok(ComplexSequence {
            kind: SequenceKind::Mobius,
            name: "mobius".into(),
            unimodular: false,
            claimed_order: None,
            first: 1,
            len: n_max,
            values: Values::Mobius(table[1..].into()),
        })
    }

    /// `cₙ = e(α βⁿ g(β))` for n = 1..=n_max.
    pub fn exp_beta(spec: &ExpBetaSpec, n_max: u64, ceiling_bits: u64) -> Result<Self> {
        let fracs = exp_beta_fractions(spec, n_max, ceiling_bits)?;
        Ok(ComplexSequence {
            kind: SequenceKind::ExpBeta,
            name: format!("expbeta(alpha={},beta={})", spec.alpha, spec.beta),
            unimodular: true,
            claimed_order: None,
            first: 1,
            len: n_max,
            values: Values::Phases(fracs.into()),
        })
    }

    /// Sequence backed by precomputed Q0.64 phases, first index 1.
    pub fn from_phases(name: impl Into<String>, phases: Vec<u64>) -> Self {
        ComplexSequence {
            kind: SequenceKind::Synthetic,
            name: name.into(),
            unimodular: true,
            claimed_order: None,
            first: 1,
            len: phases.len() as u64,
            values: Values::Phases(phases.into()),
        }
    }

    /// Materialized values with first index `first`; unimodularity detected.
    pub fn from_values(
        kind: SequenceKind,
        name: impl Into<String>,
        first: u64,
        values: Vec<Complex64>,
    ) -> Self {
        let unimodular = values
            .iter()
            .all(|z| (z.norm() - 1.0).abs() <= UNIMODULAR_TOL);
        ComplexSequence {
            kind,
            name: name.into(),
            unimodular,
            claimed_order: None,
            first,
            len: values.len() as u64,
            values: Values::Complex(values.into()),
        }
    }

    /// Lazily evaluated sequence over indices 1..=len.
    pub fn from_fn<F>(name: impl Into<String>, len: u64, unimodular: bool, f: F) -> Self
    where
        F: Fn(u64) -> Complex64 + Send + Sync + 'static,
    {
        ComplexSequence {
            kind: SequenceKind::Synthetic,
            name: name.into(),
            unimodular,
            claimed_order: None,
            first: 1,
            len,
            values: Values::Func(Arc::new(f)),
        }
    }

    /// cₙ ≡ 1.
    pub fn constant_one(len: u64) -> Self {
        Self::from_fn("one", len, true, |_| Complex64::new(1.0, 0.0))
    }

    /// cₙ = (−1)ⁿ.
    pub fn alternating(len: u64) -> Self {
        Self::from_fn("alternating", len, true, |n| {
            Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        })
    }

    /// cₙ = e(nα), phases computed in 256-bit fixed point.
    pub fn linear_phase(alpha: &Real, len: u64) -> Result<Self> {
        let step = Fixed::<256>::from_real(alpha)?.frac();
        let mut acc = Fixed::<256>::zero_val();
        let mut phases = Vec::with_capacity(len as usize);
        for _ in 0..len {
            acc = acc.plus(&step).frac();
            phases.push(fixed_q64(&acc));
        }
        Ok(Self::from_phases(format!("linear_phase({})", alpha), phases))
    }

    pub fn with_claimed_order(mut self, d: u32) -> Self {
        self.claimed_order = Some(d);
        self
    }

    pub fn first_index(&self) -> u64 {
        self.first
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn length_hint(&self) -> u64 {
        self.len
    }

    /// Last valid index.
    pub fn last_index(&self) -> u64 {
        self.first + self.len - 1
    }

    /// Term cₙ, if `n` is in range.
    pub fn get(&self, n: u64) -> Option<Complex64> {
        if n < self.first || n - self.first >= self.len {
            return None;
        }
        let i = (n - self.first) as usize;
        Some(match &self.values {
            Values::Mobius(t) => Complex64::new(t[i] as f64, 0.0),
            Values::Phases(p) => phasor::e_q64(p[i]),
            Values::Complex(v) => v[i],
            Values::Func(f) => f(n),
        })
    }

    /// Term cₙ; caller has checked the range with [`Self::require`].
    #[inline]
    pub fn at(&self, n: u64) -> Complex64 {
        self.get(n).expect("index checked by require()")
    }

    /// The raw Q0.64 phase of cₙ for phase-backed sequences.
    pub fn phase_q64(&self, n: u64) -> Option<u64> {
        match &self.values {
            Values::Phases(p) if n >= self.first && n - self.first < self.len => {
                Some(p[(n - self.first) as usize])
            }
            _ => None,
        }
    }

    /// Integer value for Möbius-backed sequences.
    pub fn mobius_value(&self, n: u64) -> Option<i8> {
        match &self.values {
            Values::Mobius(t) if n >= self.first && n - self.first < self.len => {
                Some(t[(n - self.first) as usize])
            }
            _ => None,
        }
    }

    /// Check that indices `from..=to` are all available.
    pub fn require(&self, from: u64, to: u64) -> Result<()> {
        if to < from {
            return Ok(());
        }
        if self.len == 0 || from < self.first || to > self.last_index() {
            return Err(Error::SequenceExhausted {
                needed: to,
                available: if self.len == 0 { 0 } else { self.last_index() },
            });
        }
        Ok(())
    }
}

pub(crate) fn fixed_q64<const B: u32>(x: &Fixed<B>) -> u64 {
    use num_traits::ToPrimitive;
    let f = x.frac();
    let m = f.mantissa();
    let top = if B >= 64 {
        m >> (B - 64) as usize
    } else {
        m << (64 - B) as usize
    };
    top.to_u64().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_sequence_values() {
        let s = ComplexSequence::mobius(30).unwrap();
        assert_eq!(s.mobius_value(1), Some(1));
        assert_eq!(s.mobius_value(4), Some(0));
        assert_eq!(s.mobius_value(6), Some(1));
        assert_eq!(s.mobius_value(30), Some(-1));
        assert_eq!(s.get(31), None);
        assert!(s.require(1, 30).is_ok());
        assert!(matches!(
            s.require(1, 31),
            Err(Error::SequenceExhausted { needed: 31, .. })
        ));
    }

    #[test]
    fn linear_phase_is_unimodular() {
        let alpha: Real = "sqrt(2)".parse().unwrap();
        let s = ComplexSequence::linear_phase(&alpha, 1000).unwrap();
        assert!(s.unimodular);
        let expected = (1000.0 * std::f64::consts::SQRT_2).fract();
        let got = phasor::q64_to_f64(s.phase_q64(1000).unwrap());
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn detects_unimodularity() {
        let s = ComplexSequence::from_values(
            SequenceKind::Synthetic,
            "x",
            1,
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        );
        assert!(s.unimodular);
        let s = ComplexSequence::from_values(
            SequenceKind::Synthetic,
            "x",
            1,
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)],
        );
        assert!(!s.unimodular);
    }
}
