//! Exact orbit polynomials.
//!
//! For a skew product with rational parameters, each lifted coordinate
//! `x_i^n` of `fⁿx` is a polynomial `P_i(n)` with rational coefficients. The
//! expansion follows the nested sums directly: `P_1` is linear, and each later
//! coordinate is its start value plus a Faulhaber sum of the increment
//! evaluated on earlier coordinates. Composing a character with the `P_i`
//! gives the phase polynomials that the averaging module sums.

mod expand;
mod phase;
mod poly;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::torus::TrigPolynomial;

pub use expand::{
    affine_as_skew, expand_orbit, expand_orbit_general, expand_orbit_simple, first_mismatch,
    OrbitExpansion,
};
pub use phase::PhasePolynomial;
pub use poly::{faulhaber, RationalPoly};

/// `p(fⁿx) = constant + Σ a_k e(P_k(n))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComposedPhase {
    pub constant: Complex64,
    pub terms: Vec<(Complex64, RationalPoly)>,
}

/// For each non-constant character `k` of `p`, the phase `k·(P_1, …, P_d)`.
pub fn compose_phase(p: &TrigPolynomial, polys: &[RationalPoly]) -> Result<ComposedPhase> {
    if p.dim() != polys.len() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: polys.len(),
        });
    }
    let mut constant = Complex64::new(0.0, 0.0);
    let mut terms = Vec::new();
    for (k, a) in p.terms() {
        if k.is_zero() {
            constant += a;
            continue;
        }
        let phase = k
            .0
            .iter()
            .zip(polys)
            .filter(|(kj, _)| **kj != 0)
            .fold(RationalPoly::zero(), |acc, (&kj, pj)| {
                acc.add(&pj.scale(&BigRational::from_integer(kj.into())))
            });
        terms.push((*a, phase));
    }
    Ok(ComposedPhase { constant, terms })
}

/// Phases `θ_0, …, θ_d` on the binomial basis: `P(n) = Σ_j θ_j C(n, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinomialPhase<S> {
    pub thetas: Vec<S>,
}

impl<S: Scalar> BinomialPhase<S> {
    pub fn new(thetas: Vec<S>) -> Self {
        BinomialPhase { thetas }
    }

    pub fn degree(&self) -> usize {
        self.thetas.len().saturating_sub(1)
    }

    /// `Σ_j θ_j C(n, j) mod 1`, evaluated in the backend of `θ`.
    pub fn eval_mod1(&self, n: u64) -> f64 {
        let mut acc = S::zero_val();
        let mut binom = BigInt::one(); // C(n, j)
        for (j, t) in self.thetas.iter().enumerate() {
            if j > 0 {
                binom = binom * BigInt::from(n + 1 - j as u64) / BigInt::from(j);
            }
            if binom.is_zero() {
                break;
            }
            acc = acc.plus(&t.scale_int(&binom)).frac();
        }
        acc.frac_f64()
    }
}

/// Monomial form of `Σ_j θ_j C(n, j)`; exact for rational `θ`.
pub fn binomial_to_monomial(b: &BinomialPhase<BigRational>) -> RationalPoly {
    b.thetas
        .iter()
        .enumerate()
        .fold(RationalPoly::zero(), |acc, (j, t)| {
            acc.add(&expand::binomial_basis(j).scale(t))
        })
}

/// Monomial form for `f64` phases, with coefficients rounded once.
pub fn binomial_to_monomial_f64(thetas: &[f64]) -> Result<PhasePolynomial> {
    let mut coeffs = vec![0.0f64; thetas.len()];
    for (j, &t) in thetas.iter().enumerate() {
        for (i, c) in expand::binomial_basis(j).coeffs().iter().enumerate() {
            coeffs[i] += t * crate::real::rational_to_f64(c);
        }
    }
    PhasePolynomial::new(coeffs)
}

/// `P(n) mod 1`, exactly, for a rational polynomial.
pub fn eval_phase_mod1(p: &RationalPoly, n: i64) -> BigRational {
    p.eval_mod1(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::parse_rational;
    use crate::scalar::HpReal;
    use crate::torus::{CharacterIndex, SimplePolySkew};
    use proptest::prelude::*;

    fn r(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn binomial_examples() {
        let b = |v: &[&str]| BinomialPhase::new(v.iter().map(|s| r(s)).collect());
        assert_eq!(binomial_to_monomial(&b(&["3/4"])), RationalPoly::constant(r("3/4")));
        assert_eq!(binomial_to_monomial(&b(&["0", "1"])), RationalPoly::n());
        assert_eq!(
            binomial_to_monomial(&b(&["0", "0", "1"])),
            RationalPoly::from_coeffs(vec![r("0"), r("-1/2"), r("1/2")])
        );
        let p = binomial_to_monomial_f64(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(p.coeffs(), &[0.0, -0.5, 0.5]);
    }

    proptest! {
        #[test]
        fn binomial_round_trip(
            thetas in prop::collection::vec((-50i64..50, 1i64..12), 1..7),
        ) {
            let thetas: Vec<BigRational> = thetas.into_iter().map(|(p, q)| BigRational::new(p.into(), q.into())).collect();
            let b = BinomialPhase::new(thetas.clone());
            let p = binomial_to_monomial(&b);
            prop_assert!(p.degree().is_none_or(|d| d <= b.degree()));
            for n in 0..=(thetas.len() as i64 + 3) {
                let mut want = BigRational::zero();
                let mut binom = BigInt::one();
                for (j, t) in thetas.iter().enumerate() {
                    if j > 0 {
                        binom = binom * BigInt::from(n + 1 - j as i64) / BigInt::from(j);
                    }
                    want += t * BigRational::from_integer(binom.clone());
                }
                prop_assert_eq!(p.eval_int(n), want.clone());
                let got = b.eval_mod1(n as u64);
                let want_mod = crate::real::rational_to_f64(&eval_phase_mod1(&RationalPoly::constant(want), 0));
                prop_assert!((got - want_mod).abs() < 1e-15 || (got - want_mod).abs() > 1.0 - 1e-15);
            }
        }
    }

    #[test]
    fn binomial_eval_in_high_precision() {
        let phi = HpReal::from_real(&"phi".parse().unwrap()).unwrap();
        let b = BinomialPhase::new(vec![HpReal::zero_val(), HpReal::zero_val(), HpReal::zero_val(), phi]);
        // C(10⁴, 3)·φ mod 1, against an f64-free reference
        let n = 10_000u64;
        let c = BigInt::from(n * (n - 1) * (n - 2) / 6);
        let want = HpReal::from_real(&"phi".parse().unwrap()).unwrap().scale_int(&c).frac_f64();
        assert!((b.eval_mod1(n) - want).abs() < 1e-15);
    }

    #[test]
    fn compose_examples() {
        let zero = BigRational::zero();
        let f = SimplePolySkew::new(
            2,
            2,
            r("1/4"),
            vec![vec![zero.clone(); 2]; 2],
            vec![vec![], vec![zero.clone(), zero.clone(), r("1")]],
        )
        .unwrap();
        let e = expand_orbit_simple(&f, &[zero.clone(), zero.clone()]).unwrap();

        let c = compose_phase(&TrigPolynomial::character(CharacterIndex(vec![0, 1])), &e.polys).unwrap();
        assert_eq!(c.terms.len(), 1);
        assert_eq!(c.terms[0].1, e.polys[1]);
        assert_eq!(c.terms[0].1.degree(), Some(3));

        let c = compose_phase(&TrigPolynomial::character(CharacterIndex(vec![1, 0])), &e.polys).unwrap();
        assert_eq!(c.terms[0].1, RationalPoly::from_coeffs(vec![zero.clone(), r("1/4")]));

        let k = Complex64::new(2.0, 1.0);
        let c = compose_phase(&TrigPolynomial::constant(2, k), &e.polys).unwrap();
        assert!(c.terms.is_empty());
        assert_eq!(c.constant, k);

        assert!(compose_phase(&TrigPolynomial::constant(3, k), &e.polys).is_err());
    }

    #[test]
    fn mod1_examples() {
        assert_eq!(eval_phase_mod1(&RationalPoly::from_coeffs(vec![r("0"), r("1/4")]), 6), r("1/2"));
        assert_eq!(eval_phase_mod1(&RationalPoly::zero(), 3), r("0"));
        assert_eq!(
            eval_phase_mod1(&RationalPoly::from_coeffs(vec![r("0"), r("0"), r("1/3")]), 4),
            r("1/3")
        );
    }
}
