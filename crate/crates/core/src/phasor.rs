//! Unit phasors `e(x) = exp(2πi x)` and compensated complex summation.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// `e(x)` for a real `x`; only `x mod 1` matters.
pub fn e(x: f64) -> Complex64 {
    let t = x - x.floor();
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// `e(q / 2^64)` for a fraction in Q0.64 fixed point.
pub fn e_q64(q: u64) -> Complex64 {
    e(q64_to_f64(q))
}

/// `e(q / 2^128)`.
pub fn e_q128(q: u128) -> Complex64 {
    e(q128_to_f64(q))
}

/// Q0.64 fraction to `f64`, always `< 1`.
pub fn q64_to_f64(q: u64) -> f64 {
    (q >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn q128_to_f64(q: u128) -> f64 {
    ((q >> 75) as u64) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `f64` in `[0,1)` to Q0.64 (truncating).
pub fn f64_to_q64(x: f64) -> u64 {
    let t = x - x.floor();
    let v = t * 18446744073709551616.0;
    if v >= 18446744073709551616.0 {
        0
    } else {
        v as u64
    }
}

/// Kahan–Babuška (Neumaier) summation of complex numbers.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: Complex64) {
        self.sum.re = neumaier(self.sum.re, x.re, &mut self.comp.re);
        self.sum.im = neumaier(self.sum.im, x.im, &mut self.comp.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

#[inline]
fn neumaier(sum: f64, x: f64, comp: &mut f64) -> f64 {
    let t = sum + x;
    if sum.abs() >= x.abs() {
        *comp += (sum - t) + x;
    } else {
        *comp += (x - t) + sum;
    }
    t
}
