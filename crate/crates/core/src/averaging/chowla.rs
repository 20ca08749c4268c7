use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phasor::{e_q64, KahanSum};
use crate::seqgen::{ComplexSequence, UNIMODULAR_TOL};

/// Shifts `l_1 < … < l_r` with exponents `k_i ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChowlaPattern {
    shifts: Vec<u64>,
    exponents: Vec<u32>,
}

impl ChowlaPattern {
    pub fn new(shifts: Vec<u64>, exponents: Vec<u32>) -> Result<Self> {
        if shifts.is_empty() {
            return Err(Error::invalid("pattern needs at least one shift"));
        }
        if shifts.len() != exponents.len() {
            return Err(Error::invalid(format!(
                "{} shifts but {} exponents",
                shifts.len(),
                exponents.len()
            )));
        }
        if shifts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("shifts must be strictly increasing"));
        }
        if exponents.contains(&0) {
            return Err(Error::invalid("exponents must be positive"));
        }
        Ok(ChowlaPattern { shifts, exponents })
    }

    pub fn r(&self) -> usize {
        self.shifts.len()
    }

    pub fn shifts(&self) -> &[u64] {
        &self.shifts
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn max_shift(&self) -> u64 {
        *self.shifts.last().expect("non-empty")
    }
}

impl fmt::Display for ChowlaPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        write!(
            f,
            "l={};k={}",
            join(self.shifts.iter().map(u64::to_string).collect()),
            join(self.exponents.iter().map(u32::to_string).collect())
        )
    }
}

/// Every pattern with `r ≤ r_max`, shifts in `0..=shift_max` and exponents
/// in `1..=exp_max`, ordered by `r`, then shifts, then exponents.
pub fn enumerate_patterns(r_max: usize, shift_max: u64, exp_max: u32) -> Vec<ChowlaPattern> {
    fn subsets(from: u64, max: u64, r: usize) -> Vec<Vec<u64>> {
        if r == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for s in from..=max {
            for mut rest in subsets(s + 1, max, r - 1) {
                rest.insert(0, s);
                out.push(rest);
            }
        }
        out
    }
    fn exps(r: usize, max: u32) -> Vec<Vec<u32>> {
        (0..r).fold(vec![Vec::new()], |acc, _| {
            acc.into_iter()
                .flat_map(|v| {
                    (1..=max).map(move |k| {
                        let mut v = v.clone();
                        v.push(k);
                        v
                    })
                })
                .collect()
        })
    }
    let mut out = Vec::new();
    for r in 1..=r_max {
        for s in subsets(0, shift_max, r) {
            for k in exps(r, exp_max) {
                out.push(ChowlaPattern {
                    shifts: s.clone(),
                    exponents: k,
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChowlaResult {
    pub pattern: ChowlaPattern,
    /// `(1/N) Σ_{n=1}^N Π c_{n+l_i}^{k_i}`.
    pub value: Complex64,
    /// `c_{n+l_i}^{k_i} = |c_{n+l_i}|` for every `i` and `n ≤ N`; such
    /// patterns are outside the Chowla condition and carry no verdict.
    pub excluded: bool,
}

fn power(c: Complex64, k: u32) -> Complex64 {
    if k == 1 {
        c
    } else {
        c.powu(k)
    }
}

fn chowla_one(seq: &ComplexSequence, p: &ChowlaPattern, n: u64) -> ChowlaResult {
    let phased = seq.phase_q64(1).is_some();
    let mut sum = KahanSum::new();
    let mut excluded = true;
    for m in 1..=n {
        let mut prod = Complex64::new(1.0, 0.0);
        let mut q = 0u64;
        for (&l, &k) in p.shifts.iter().zip(&p.exponents) {
            let idx = m + l;
            let c = seq.at(idx);
            let ck = if phased {
                let qk = seq.phase_q64(idx).expect("phase-backed").wrapping_mul(k as u64);
                q = q.wrapping_add(qk);
                e_q64(qk)
            } else {
                let ck = power(c, k);
                prod = if p.r() == 1 { ck } else { prod * ck };
                ck
            };
            if excluded && (ck - c.norm()).norm() > UNIMODULAR_TOL {
                excluded = false;
            }
        }
        if phased {
            prod = e_q64(q);
        }
        if prod.re != 0.0 || prod.im != 0.0 {
            sum.add(prod);
        }
    }
    ChowlaResult {
        pattern: p.clone(),
        value: sum.value() / n as f64,
        excluded,
    }
}

/// One correlation average per pattern, in pattern order.
pub fn chowla_test(seq: &ComplexSequence, patterns: &[ChowlaPattern], n: u64) -> Result<Vec<ChowlaResult>> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let max_shift = patterns.iter().map(ChowlaPattern::max_shift).max().unwrap_or(0);
    seq.require(1, n + max_shift)?;
    Ok(patterns.par_iter().map(|p| chowla_one(seq, p, n)).collect())
}
