//! Cesàro averages against oscillating sequences.
//!
//! Every average here is normalized by the total count `N`, including sums
//! restricted to an arithmetic progression. Cells (one sequence, one phase,
//! one progression) are independent; batteries fan them out with rayon and
//! collect in declaration order, so results do not depend on the thread count.

mod chowla;
mod dynamics;
mod report;
mod sampler;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::orbitpoly::PhasePolynomial;
use crate::phasor::{e_q128, KahanSum};
use crate::seqgen::ComplexSequence;

pub use chowla::{chowla_test, enumerate_patterns, ChowlaPattern, ChowlaResult};
pub use dynamics::{
    cesaro_disjointness, chain_flow, chain_thetas, mean_attraction_estimate,
    quasi_eigen_crosscheck, MeanAttraction,
};
pub use report::{chowla_rows, write_report, ReportRow, Verdict};
pub use sampler::{sample_phase_polynomials, PhaseSample, SamplerConfig};

/// Steps between exact resynchronizations of the phasor chain.
pub const RESYNC_EVERY: u32 = 4096;

/// Running averages `S_N` at increasing checkpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct CesaroSeries {
    pub checkpoints: Vec<u64>,
    pub values: Vec<Complex64>,
    pub magnitude: Vec<f64>,
}

impl CesaroSeries {
    fn with_capacity(n: usize) -> Self {
        CesaroSeries {
            checkpoints: Vec::with_capacity(n),
            values: Vec::with_capacity(n),
            magnitude: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, n: u64, v: Complex64) {
        self.checkpoints.push(n);
        self.values.push(v);
        self.magnitude.push(v.norm());
    }

    /// `|S_N|` at the last checkpoint.
    pub fn last_magnitude(&self) -> f64 {
        self.magnitude.last().copied().unwrap_or(0.0)
    }

    pub fn last_value(&self) -> Complex64 {
        self.values.last().copied().unwrap_or_default()
    }

    /// True when `|S_N|` never decreases from one checkpoint to the next.
    pub fn non_decreasing(&self) -> bool {
        self.magnitude.len() >= 2 && self.magnitude.windows(2).all(|w| w[1] >= w[0])
    }
}

pub(crate) fn check_checkpoints(checkpoints: &[u64]) -> Result<u64> {
    let Some(&last) = checkpoints.last() else {
        return Err(Error::invalid("checkpoint list is empty"));
    };
    if checkpoints[0] == 0 {
        return Err(Error::invalid("checkpoints must be positive"));
    }
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("checkpoints must be strictly increasing"));
    }
    Ok(last)
}

/// `e(P(n)), e(P(n + s)), …` from the forward differences `Δ_s^i P(n)`.
///
/// The difference registers are exact Q0.128 integers advanced by wrapping
/// addition, so only the final phasor `e(P(n))` is rounded. A chain of complex
/// phasors would accumulate error like `t^deg`. The registers are rebuilt from
/// direct evaluation every [`RESYNC_EVERY`] steps, which also resets the
/// truncation of coefficients below `2⁻¹²⁸`.
pub struct PhaseChain<'a> {
    p: &'a PhasePolynomial,
    step: u64,
    n: u64,
    diffs: Vec<u128>,
    since_sync: u32,
}

impl<'a> PhaseChain<'a> {
    pub fn new(p: &'a PhasePolynomial, start: u64, step: u64) -> Self {
        let mut c = PhaseChain {
            p,
            step,
            n: start,
            diffs: Vec::with_capacity(p.degree() + 1),
            since_sync: 0,
        };
        c.sync();
        c
    }

    fn sync(&mut self) {
        let d = self.p.degree();
        self.diffs.clear();
        self.diffs.extend(
            (0..=d as u64).map(|r| self.p.eval_q128(self.n.wrapping_add(r.wrapping_mul(self.step)))),
        );
        for i in 1..=d {
            for r in (i..=d).rev() {
                self.diffs[r] = self.diffs[r].wrapping_sub(self.diffs[r - 1]);
            }
        }
        self.since_sync = 0;
    }

    pub fn index(&self) -> u64 {
        self.n
    }

    /// `frac(P(n))` in Q0.128.
    #[inline]
    pub fn phase_q128(&self) -> u128 {
        self.diffs[0]
    }

    /// `e(P(n))` at the current index.
    #[inline]
    pub fn current(&self) -> Complex64 {
        e_q128(self.diffs[0])
    }

    #[inline]
    pub fn advance(&mut self) {
        self.n += self.step;
        self.since_sync += 1;
        if self.since_sync == RESYNC_EVERY {
            self.sync();
            return;
        }
        for i in 0..self.diffs.len() - 1 {
            self.diffs[i] = self.diffs[i].wrapping_add(self.diffs[i + 1]);
        }
    }
}

/// `(1/N) Σ_{1≤n≤N, n≡l (mod k)} cₙ e(P(n))` at each checkpoint `N`.
pub fn progression_series(
    seq: &ComplexSequence,
    p: &PhasePolynomial,
    k: u64,
    l: u64,
    checkpoints: &[u64],
) -> Result<CesaroSeries> {
    if k == 0 || l >= k {
        return Err(Error::invalid(format!("need 0 ≤ l < k, got k={k}, l={l}")));
    }
    let n_max = check_checkpoints(checkpoints)?;
    seq.require(1, n_max)?;

    let mut out = CesaroSeries::with_capacity(checkpoints.len());
    let start = if l == 0 { k } else { l };
    let mut chain = PhaseChain::new(p, start, k);
    let mut sum = KahanSum::new();
    let mut cps = checkpoints.iter().copied().peekable();
    let mut n = start;
    while let Some(&cp) = cps.peek() {
        if n > cp {
            out.push(cp, sum.value() / cp as f64);
            cps.next();
            continue;
        }
        let c = seq.at(n);
        if c.re != 0.0 || c.im != 0.0 {
            sum.add(c * chain.current());
        }
        chain.advance();
        n += k;
    }
    Ok(out)
}

/// `(1/N) Σ_{n=1}^N cₙ e(P(n))`.
pub fn weyl_average(seq: &ComplexSequence, p: &PhasePolynomial, n: u64) -> Result<Complex64> {
    Ok(progression_series(seq, p, 1, 0, &[n])?.last_value())
}

/// Weyl averages at several checkpoints in one pass.
pub fn weyl_series(seq: &ComplexSequence, p: &PhasePolynomial, checkpoints: &[u64]) -> Result<CesaroSeries> {
    progression_series(seq, p, 1, 0, checkpoints)
}

/// Same sum with every phase evaluated directly; reference for the chain.
pub fn weyl_average_direct(seq: &ComplexSequence, p: &PhasePolynomial, n: u64) -> Result<Complex64> {
    seq.require(1, n)?;
    let mut sum = KahanSum::new();
    for i in 1..=n {
        sum.add(seq.at(i) * e_q128(p.eval_q128(i)));
    }
    Ok(sum.value() / n as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OscillationReport {
    pub order_tested: usize,
    pub phase_samples: Vec<PhaseSample>,
    pub series: Vec<CesaroSeries>,
    pub verdicts: Vec<bool>,
    /// `|S_N|` did not decrease over the schedule; informational only.
    pub inconclusive: Vec<bool>,
    pub threshold: f64,
    pub passed: bool,
}

impl OscillationReport {
    /// Max of `|S_N|` over samples at each checkpoint.
    pub fn max_by_checkpoint(&self) -> Vec<f64> {
        let len = self.series.first().map_or(0, |s| s.magnitude.len());
        (0..len)
            .map(|i| self.series.iter().map(|s| s.magnitude[i]).fold(0.0, f64::max))
            .collect()
    }
}

/// Weyl averages for every sampled phase of degree `≤ d` at each checkpoint;
/// passes when every final `|S_N|` is below `threshold`.
pub fn oscillation_order_test(
    seq: &ComplexSequence,
    d: usize,
    sampler: &SamplerConfig,
    checkpoints: &[u64],
    threshold: f64,
) -> Result<OscillationReport> {
    if d == 0 {
        return Err(Error::invalid("oscillation order must be at least 1"));
    }
    let n_max = check_checkpoints(checkpoints)?;
    seq.require(1, n_max)?;
    let samples = sample_phase_polynomials(d, sampler)?;
    let series = samples
        .par_iter()
        .map(|s| weyl_series(seq, &s.poly, checkpoints))
        .collect::<Result<Vec<_>>>()?;
    let verdicts: Vec<bool> = series.iter().map(|s| s.last_magnitude() < threshold).collect();
    Ok(OscillationReport {
        order_tested: d,
        inconclusive: series.iter().map(CesaroSeries::non_decreasing).collect(),
        passed: verdicts.iter().all(|&v| v),
        phase_samples: samples,
        series,
        verdicts,
        threshold,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArithmeticCell {
    pub k: u64,
    pub l: u64,
    /// Index into the report's samples.
    pub sample: usize,
    pub series: CesaroSeries,
    pub verdict: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArithmeticReport {
    pub order_tested: usize,
    pub k_max: u64,
    pub phase_samples: Vec<PhaseSample>,
    pub cells: Vec<ArithmeticCell>,
    pub threshold: f64,
    pub passed: bool,
}

/// Progression sums for every `1 ≤ k ≤ k_max`, `0 ≤ l < k` and sampled phase.
pub fn arithmetic_oscillation_test(
    seq: &ComplexSequence,
    d: usize,
    k_max: u64,
    sampler: &SamplerConfig,
    checkpoints: &[u64],
    threshold: f64,
) -> Result<ArithmeticReport> {
    if d == 0 {
        return Err(Error::invalid("oscillation order must be at least 1"));
    }
    if k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let n_max = check_checkpoints(checkpoints)?;
    seq.require(1, n_max)?;
    let samples = sample_phase_polynomials(d, sampler)?;
    let count = samples.len();
    let plan: Vec<(u64, u64, usize)> = (1..=k_max)
        .flat_map(|k| (0..k).flat_map(move |l| (0..count).map(move |s| (k, l, s))))
        .collect();
    let cells = plan
        .par_iter()
        .map(|&(k, l, s)| {
            let series = progression_series(seq, &samples[s].poly, k, l, checkpoints)?;
            Ok(ArithmeticCell {
                k,
                l,
                sample: s,
                verdict: series.last_magnitude() < threshold,
                series,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ArithmeticReport {
        order_tested: d,
        k_max,
        passed: cells.iter().all(|c| c.verdict),
        phase_samples: samples,
        cells,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Real;
    use crate::seqgen::SequenceKind;
    use proptest::prelude::*;

    fn poly(c: &[f64]) -> PhasePolynomial {
        PhasePolynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn trivial_examples() {
        let one = ComplexSequence::constant_one(100);
        assert_eq!(weyl_average(&one, &PhasePolynomial::zero(), 100).unwrap(), Complex64::new(1.0, 0.0));
        let alt = ComplexSequence::alternating(1000);
        let w = weyl_average(&alt, &poly(&[0.0, 0.5]), 1000).unwrap();
        assert!((w - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(weyl_average(&one, &PhasePolynomial::zero(), 101).is_err());
    }

    #[test]
    fn chain_matches_direct_evaluation() {
        let seq = ComplexSequence::mobius(200_000).unwrap();
        let cases = [
            poly(&[0.3, 0.7071067811865476]),
            poly(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7]),
            poly(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1e-30 + 0.123]),
            poly(&[0.25, 0.0, 1.0 / 3.0]),
        ];
        for p in &cases {
            let a = weyl_average(&seq, p, 200_000).unwrap();
            let b = weyl_average_direct(&seq, p, 200_000).unwrap();
            assert!((a - b).norm() < 1e-10, "{p:?}: {a} vs {b}");
        }
    }

    #[test]
    fn chain_tracks_exact_phases_across_resyncs() {
        let p = poly(&[0.1, 0.61803398874989, 0.2, 0.9, 0.37, 0.5, 0.77]);
        let mut chain = PhaseChain::new(&p, 3, 5);
        for _ in 0..3 * RESYNC_EVERY as usize {
            assert_eq!(chain.phase_q128(), p.eval_q128(chain.index()));
            chain.advance();
        }
    }

    #[test]
    fn checkpoints_validated() {
        let one = ComplexSequence::constant_one(10);
        let z = PhasePolynomial::zero();
        assert!(weyl_series(&one, &z, &[]).is_err());
        assert!(weyl_series(&one, &z, &[5, 5]).is_err());
        assert!(weyl_series(&one, &z, &[0, 3]).is_err());
        let s = weyl_series(&one, &z, &[2, 5, 10]).unwrap();
        assert_eq!(s.values, vec![Complex64::new(1.0, 0.0); 3]);
        assert_eq!(s.magnitude, vec![1.0; 3]);
    }

    #[test]
    fn progression_examples() {
        let one = ComplexSequence::constant_one(1000);
        let z = PhasePolynomial::zero();
        let s = progression_series(&one, &z, 2, 0, &[1000]).unwrap();
        assert_eq!(s.last_value(), Complex64::new(0.5, 0.0));
        let s = progression_series(&one, &z, 3, 1, &[10]).unwrap();
        // n = 1, 4, 7, 10
        assert_eq!(s.last_value(), Complex64::new(0.4, 0.0));
        assert!(progression_series(&one, &z, 2, 2, &[10]).is_err());
        assert!(progression_series(&one, &z, 0, 0, &[10]).is_err());
    }

    #[test]
    fn progressions_partition_the_full_sum() {
        let seq = ComplexSequence::mobius(50_000).unwrap();
        let p = poly(&[0.2, 0.3183098861837907, 0.1]);
        let cps = [1000, 25_000, 50_000];
        let full = weyl_series(&seq, &p, &cps).unwrap();
        for k in 1..=5u64 {
            for i in 0..cps.len() {
                let sum: Complex64 = (0..k)
                    .map(|l| progression_series(&seq, &p, k, l, &cps).unwrap().values[i])
                    .sum();
                assert!((sum - full.values[i]).norm() < 1e-12, "k={k}");
            }
        }
    }

    #[test]
    fn constant_one_fails_at_order_one() {
        let one = ComplexSequence::constant_one(10_000);
        let r = oscillation_order_test(&one, 1, &SamplerConfig::default(), &[100, 10_000], 0.02).unwrap();
        assert!(!r.passed);
        let zero = r.phase_samples.iter().position(|s| s.label == "zero").unwrap();
        assert!(!r.verdicts[zero]);
        assert_eq!(r.series[zero].last_magnitude(), 1.0);
        assert!(r.inconclusive[zero]);
        assert!(r.phase_samples.iter().all(|s| s.poly.degree() <= 1));
        assert_eq!(r.max_by_checkpoint().len(), 2);
    }

    #[test]
    fn quadratic_phase_cancelled_by_its_negative() {
        let theta: Real = "sqrt(2)".parse().unwrap();
        let t = theta.to_f64();
        let p = poly(&[0.0, 0.0, t]);
        let n = 20_000u64;
        let seq = ComplexSequence::from_fn("quad", n, true, move |k| {
            crate::phasor::e_q128(p.eval_q128(k))
        });
        let cfg = SamplerConfig {
            extra: vec![PhaseSample::new("neg", poly(&[0.0, 0.0, -t]))],
            ..SamplerConfig::default()
        };
        let r = oscillation_order_test(&seq, 2, &cfg, &[n], 0.02).unwrap();
        let i = r.phase_samples.iter().position(|s| s.label == "neg").unwrap();
        assert!((r.series[i].last_magnitude() - 1.0).abs() < 1e-9);
        assert!(!r.passed);
    }

    #[test]
    fn arithmetic_report_covers_every_cell() {
        let seq = ComplexSequence::mobius(20_000).unwrap();
        let cfg = SamplerConfig {
            random: 2,
            ..SamplerConfig::default()
        };
        let r = arithmetic_oscillation_test(&seq, 2, 3, &cfg, &[20_000], 0.05).unwrap();
        assert_eq!(r.cells.len(), 6 * r.phase_samples.len());
        let k1: Vec<_> = r.cells.iter().filter(|c| c.k == 1).collect();
        let osc = oscillation_order_test(&seq, 2, &cfg, &[20_000], 0.05).unwrap();
        for c in k1 {
            assert_eq!(c.series, osc.series[c.sample]);
        }
        assert!(arithmetic_oscillation_test(&seq, 2, 0, &cfg, &[10], 0.05).is_err());
    }

    #[test]
    fn results_independent_of_thread_count() {
        let seq = ComplexSequence::mobius(30_000).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| oscillation_order_test(&seq, 3, &SamplerConfig::default(), &[1000, 30_000], 0.02).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn chain_agrees_with_direct(
            coeffs in prop::collection::vec(0.0f64..1.0, 1..7),
            n in 1u64..20_000,
            k in 1u64..5,
        ) {
            let p = PhasePolynomial::new(coeffs).unwrap();
            let seq = ComplexSequence::from_values(
                SequenceKind::Synthetic,
                "walk",
                1,
                (1..=n).map(|i| crate::phasor::e((i as f64).sqrt())).collect(),
            );
            let a = progression_series(&seq, &p, k, 0, &[n]).unwrap().last_value();
            let mut sum = KahanSum::new();
            for i in (k..=n).step_by(k as usize) {
                sum.add(seq.at(i) * e_q128(p.eval_q128(i)));
            }
            prop_assert!((a - sum.value() / n as f64).norm() < 1e-10);
        }
    }
}
