//! The torus `T^d = ℝ^d/ℤ^d`, affine maps and polynomial skew products on it,
//! characters and trigonometric polynomials, and the integer-matrix tools
//! needed to put a unipotent affine part into lower triangular form.
//!
//! A skew product whose polynomials have non-integer coefficients does not
//! descend to a map of `T^d` (`(x+1)² ≠ x² mod 1`), so skew dynamics is
//! defined on the lift in `ℝ^d`: a [`TorusPoint`] keeps its unreduced lift and
//! `coords` are always `lift mod 1`. Affine maps with integer matrices are
//! well defined on `T^d` and may be iterated on reduced coordinates alone.

mod flowfile;
mod matrix;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phasor::{self, KahanSum};
use crate::real::Real;
use crate::scalar::{Coefficient, Scalar};

pub use flowfile::{parse_flow, FlowDocument};
pub use matrix::{
    column_hnf, is_unipotent, least_unipotent_power, unipotent_triangularize, ColumnHnf,
    IntMatrix,
};

#[derive(Clone, Debug, PartialEq)]
pub struct TorusPoint<S> {
    pub coords: Vec<S>,
    pub lift: Option<Vec<S>>,
}

impl<S: Scalar> TorusPoint<S> {
    /// Point from coordinates, reduced mod 1, without a lift.
    pub fn new(coords: Vec<S>) -> Self {
        TorusPoint {
            coords: coords.iter().map(S::frac).collect(),
            lift: None,
        }
    }

    /// Point carrying `lift`; `coords = lift mod 1`.
    pub fn lifted(lift: Vec<S>) -> Self {
        TorusPoint {
            coords: lift.iter().map(S::frac).collect(),
            lift: Some(lift),
        }
    }

    pub fn from_reals(x: &[Real]) -> Result<Self> {
        Ok(Self::lifted(
            x.iter().map(S::from_real).collect::<Result<_>>()?,
        ))
    }

    pub fn origin(d: usize) -> Self {
        Self::lifted(vec![S::zero_val(); d])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The lift when present, else the reduced coordinates.
    pub fn lift_or_coords(&self) -> &[S] {
        self.lift.as_deref().unwrap_or(&self.coords)
    }

    pub fn coords_f64(&self) -> Vec<f64> {
        self.coords.iter().map(S::frac_f64).collect()
    }
}

/// `x ↦ A x + a`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap<S> {
    pub matrix: IntMatrix,
    pub translation: Vec<S>,
}

impl<S: Coefficient> AffineMap<S> {
    pub fn new(matrix: IntMatrix, translation: Vec<S>) -> Result<Self> {
        if translation.len() != matrix.dim() {
            return Err(Error::DimensionMismatch {
                expected: matrix.dim(),
                got: translation.len(),
            });
        }
        if !matrix.is_unimodular() {
            return Err(Error::invalid("affine matrix must have determinant ±1"));
        }
        Ok(AffineMap {
            matrix,
            translation,
        })
    }

    /// Rotation `x ↦ x + a`.
    pub fn rotation(a: Vec<S>) -> Self {
        AffineMap {
            matrix: IntMatrix::identity(a.len()),
            translation: a,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

impl<S: Scalar> AffineMap<S> {
    fn apply(&self, x: &[S]) -> Vec<S> {
        self.matrix
            .apply(x)
            .iter()
            .zip(&self.translation)
            .map(|(y, a)| y.plus(a))
            .collect()
    }
}

/// `f^q` as `(A^q, Σ_{j<q} A^j a)`.
///
/// The translation is left unreduced so the map agrees with `q` steps on
/// lifts exactly; reduce it mod 1 for the torus map.
pub fn power_affine<S: Scalar>(f: &AffineMap<S>, q: u64) -> Result<AffineMap<S>> {
    if q == 0 {
        return Err(Error::invalid("power must be at least 1"));
    }
    // (A₂, a₂) ∘ (A₁, a₁) = (A₂A₁, A₂a₁ + a₂)
    let compose = |g: &AffineMap<S>, h: &AffineMap<S>| AffineMap {
        matrix: g.matrix.mul(&h.matrix),
        translation: g.apply(&h.translation),
    };
    let mut result = AffineMap::rotation(vec![S::zero_val(); f.dim()]);
    let mut base = f.clone();
    let mut q = q;
    while q > 0 {
        if q & 1 == 1 {
            result = compose(&base, &result);
        }
        q >>= 1;
        if q > 0 {
            base = compose(&base, &base);
        }
    }
    Ok(result)
}

/// Monomial `c · x₁^e₁ ⋯ x_m^e_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial<S> {
    pub coeff: S,
    pub exps: Vec<u32>,
}

/// Polynomial in the first few torus coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly<S> {
    pub nvars: usize,
    pub terms: Vec<Monomial<S>>,
}

impl<S: Coefficient> MultiPoly<S> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms
            .iter()
            .filter(|t| !t.coeff.is_zero_coeff())
            .map(|t| t.exps.iter().sum())
            .max()
    }
}

impl<S: Scalar> MultiPoly<S> {
    pub fn eval(&self, x: &[S]) -> S {
        let mut acc = S::zero_val();
        for t in &self.terms {
            let mut v = t.coeff.clone();
            for (xi, &e) in x.iter().zip(&t.exps) {
                for _ in 0..e {
                    v = v.times(xi);
                }
            }
            acc = acc.plus(&v);
        }
        acc
    }
}

/// Degree of a coefficient list, ignoring trailing zeros.
pub fn univariate_degree<S: Coefficient>(coeffs: &[S]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero_coeff())
}

fn horner<S: Scalar>(coeffs: &[S], x: &S) -> S {
    coeffs
        .iter()
        .rev()
        .fold(S::zero_val(), |acc, c| acc.times(x).plus(c))
}

/// `x₁ ↦ x₁ + a`, `x₂ ↦ x₂ + h₂(x₁)`,
/// `xᵢ ↦ xᵢ + Σ_{2≤j<i} b_ij x_j + hᵢ(x₁)` for `i ≥ 3`.
///
/// Indices are 0-based: `b[i][j]` for `2 ≤ i < d`, `1 ≤ j < i`; `h[i]` for
/// `1 ≤ i < d` is a coefficient list, constant term first. `h[0]` is empty.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplePolySkew<S> {
    pub d: usize,
    pub k: usize,
    pub a: S,
    pub b: Vec<Vec<S>>,
    pub h: Vec<Vec<S>>,
}

impl<S: Coefficient> SimplePolySkew<S> {
    pub fn new(d: usize, k: usize, a: S, b: Vec<Vec<S>>, h: Vec<Vec<S>>) -> Result<Self> {
        if d < 2 || k < 1 {
            return Err(Error::invalid("simple skew needs d ≥ 2 and k ≥ 1"));
        }
        if b.len() != d || b.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("b must be d × d"));
        }
        for (i, row) in b.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let allowed = i >= 2 && j >= 1 && j < i;
                if !allowed && !v.is_zero_coeff() {
                    return Err(Error::invalid(format!(
                        "b[{}][{}] must be zero",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if h.len() != d || !h[0].is_empty() {
            return Err(Error::invalid("h must list h_2..h_d"));
        }
        for (i, hi) in h.iter().enumerate().skip(1) {
            if univariate_degree(hi).unwrap_or(0) > k {
                return Err(Error::invalid(format!("deg h_{} exceeds k = {}", i + 1, k)));
            }
        }
        Ok(SimplePolySkew { d, k, a, b, h })
    }
}

impl<S: Scalar> SimplePolySkew<S> {
    fn apply(&self, x: &[S]) -> Vec<S> {
        let mut y = Vec::with_capacity(self.d);
        y.push(x[0].plus(&self.a));
        for i in 1..self.d {
            let mut v = x[i].plus(&horner(&self.h[i], &x[0]));
            for j in 1..i {
                if !self.b[i][j].is_zero_val() {
                    v = v.plus(&self.b[i][j].times(&x[j]));
                }
            }
            y.push(v);
        }
        y
    }

    /// The same map written as a general skew product.
    pub fn to_general(&self) -> GeneralPolySkew<S> {
        let mut h = vec![MultiPoly::zero(0)];
        for i in 1..self.d {
            let mut p = MultiPoly::zero(i);
            for (e, c) in self.h[i].iter().enumerate() {
                if !c.is_zero_val() {
                    let mut exps = vec![0; i];
                    exps[0] = e as u32;
                    p.terms.push(Monomial {
                        coeff: c.clone(),
                        exps,
                    });
                }
            }
            for j in 1..i {
                if !self.b[i][j].is_zero_val() {
                    let mut exps = vec![0; i];
                    exps[j] = 1;
                    p.terms.push(Monomial {
                        coeff: self.b[i][j].clone(),
                        exps,
                    });
                }
            }
            h.push(p);
        }
        GeneralPolySkew {
            d: self.d,
            k: self.k.max(1),
            a: self.a.clone(),
            h,
        }
    }
}

/// `x₁ ↦ x₁ + a`, `xᵢ ↦ xᵢ + hᵢ(x₁, …, x_{i−1})`; `h[0]` is unused.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralPolySkew<S> {
    pub d: usize,
    pub k: usize,
    pub a: S,
    pub h: Vec<MultiPoly<S>>,
}

impl<S: Coefficient> GeneralPolySkew<S> {
    pub fn new(d: usize, k: usize, a: S, h: Vec<MultiPoly<S>>) -> Result<Self> {
        if d < 2 || k < 1 {
            return Err(Error::invalid("general skew needs d ≥ 2 and k ≥ 1"));
        }
        if h.len() != d {
            return Err(Error::invalid("h must list h_2..h_d"));
        }
        for (i, p) in h.iter().enumerate().skip(1) {
            if p.nvars != i || p.terms.iter().any(|t| t.exps.len() != i) {
                return Err(Error::invalid(format!(
                    "h_{} must depend on exactly x_1..x_{}",
                    i + 1,
                    i
                )));
            }
            if p.total_degree().unwrap_or(0) as usize > k {
                return Err(Error::invalid(format!("deg h_{} exceeds k = {}", i + 1, k)));
            }
        }
        Ok(GeneralPolySkew { d, k, a, h })
    }
}

impl<S: Scalar> GeneralPolySkew<S> {
    fn apply(&self, x: &[S]) -> Vec<S> {
        let mut y = Vec::with_capacity(self.d);
        y.push(x[0].plus(&self.a));
        for i in 1..self.d {
            y.push(x[i].plus(&self.h[i].eval(&x[..i])));
        }
        y
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TorusFlow<S> {
    Affine(AffineMap<S>),
    Simple(SimplePolySkew<S>),
    General(GeneralPolySkew<S>),
}

impl<S: Coefficient> TorusFlow<S> {
    pub fn dim(&self) -> usize {
        match self {
            TorusFlow::Affine(f) => f.dim(),
            TorusFlow::Simple(f) => f.d,
            TorusFlow::General(f) => f.d,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TorusFlow::Affine(_) => "affine",
            TorusFlow::Simple(_) => "simple_skew",
            TorusFlow::General(_) => "general_skew",
        }
    }

    /// Convert the parameters to another backend.
    pub fn try_map<T: Coefficient>(&self, f: impl Fn(&S) -> Result<T>) -> Result<TorusFlow<T>> {
        let vec = |v: &[S]| v.iter().map(&f).collect::<Result<Vec<T>>>();
        Ok(match self {
            TorusFlow::Affine(m) => TorusFlow::Affine(AffineMap {
                matrix: m.matrix.clone(),
                translation: vec(&m.translation)?,
            }),
            TorusFlow::Simple(s) => TorusFlow::Simple(SimplePolySkew {
                d: s.d,
                k: s.k,
                a: f(&s.a)?,
                b: s.b.iter().map(|r| vec(r)).collect::<Result<_>>()?,
                h: s.h.iter().map(|r| vec(r)).collect::<Result<_>>()?,
            }),
            TorusFlow::General(g) => TorusFlow::General(GeneralPolySkew {
                d: g.d,
                k: g.k,
                a: f(&g.a)?,
                h: g
                    .h
                    .iter()
                    .map(|p| {
                        Ok(MultiPoly {
                            nvars: p.nvars,
                            terms: p
                                .terms
                                .iter()
                                .map(|t| {
                                    Ok(Monomial {
                                        coeff: f(&t.coeff)?,
                                        exps: t.exps.clone(),
                                    })
                                })
                                .collect::<Result<_>>()?,
                        })
                    })
                    .collect::<Result<_>>()?,
            }),
        })
    }
}

impl<S: Scalar> TorusFlow<S> {
    /// The map on lifted coordinates in `ℝ^d`.
    pub fn apply_lift(&self, x: &[S]) -> Vec<S> {
        match self {
            TorusFlow::Affine(f) => f.apply(x),
            TorusFlow::Simple(f) => f.apply(x),
            TorusFlow::General(f) => f.apply(x),
        }
    }

    fn check_dim(&self, x: &TorusPoint<S>) -> Result<()> {
        if x.dim() != self.dim() || x.lift.as_ref().is_some_and(|l| l.len() != self.dim()) {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.dim(),
            });
        }
        Ok(())
    }

    /// `f(x)`. A lift, when present, is advanced; an affine map without a
    /// lift acts on reduced coordinates; a skew product without a lift takes
    /// the coordinates as the lift.
    pub fn step(&self, x: &TorusPoint<S>) -> Result<TorusPoint<S>> {
        self.check_dim(x)?;
        Ok(self.step_unchecked(x))
    }

    fn step_unchecked(&self, x: &TorusPoint<S>) -> TorusPoint<S> {
        match (&x.lift, self) {
            (None, TorusFlow::Affine(f)) => TorusPoint::new(f.apply(&x.coords)),
            _ => TorusPoint::lifted(self.apply_lift(x.lift_or_coords())),
        }
    }

    /// Streaming orbit `x, f x, …, fⁿ x`.
    pub fn orbit(&self, x: TorusPoint<S>, n: u64) -> Result<Orbit<'_, S>> {
        self.check_dim(&x)?;
        Ok(Orbit {
            flow: self,
            next: Some(x),
            remaining: n,
        })
    }
}

pub struct Orbit<'a, S> {
    flow: &'a TorusFlow<S>,
    next: Option<TorusPoint<S>>,
    remaining: u64,
}

impl<S: Scalar> Iterator for Orbit<'_, S> {
    type Item = TorusPoint<S>;

    fn next(&mut self) -> Option<TorusPoint<S>> {
        let cur = self.next.take()?;
        if self.remaining > 0 {
            self.remaining -= 1;
            self.next = Some(self.flow.step_unchecked(&cur));
        }
        Some(cur)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharacterIndex(pub Vec<i64>);

impl CharacterIndex {
    pub fn zero(d: usize) -> Self {
        CharacterIndex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }
}

/// `k·x mod 1` computed in the point's backend.
pub fn character_phase<S: Scalar>(k: &CharacterIndex, x: &TorusPoint<S>) -> f64 {
    let mut acc = S::zero_val();
    for (&kj, xj) in k.0.iter().zip(&x.coords) {
        if kj != 0 {
            acc = acc.plus(&xj.scale_int(&BigInt::from(kj)));
        }
    }
    acc.frac_f64()
}

/// `e(k·x)`.
pub fn character_eval<S: Scalar>(k: &CharacterIndex, x: &TorusPoint<S>) -> Result<Complex64> {
    if k.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: k.dim(),
        });
    }
    Ok(phasor::e(character_phase(k, x)))
}

/// `Σ a_k e(k·x)` over finitely many characters.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPolynomial {
    dim: usize,
    terms: BTreeMap<CharacterIndex, Complex64>,
}

impl TrigPolynomial {
    pub fn zero(dim: usize) -> Self {
        TrigPolynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(CharacterIndex::zero(dim), c)
            .expect("dimension matches");
        p
    }

    pub fn character(k: CharacterIndex) -> Self {
        let mut p = Self::zero(k.dim());
        p.add_term(k, Complex64::new(1.0, 0.0))
            .expect("dimension matches");
        p
    }

    /// Add `c·e(k·x)`; coefficients of repeated characters accumulate.
    pub fn add_term(&mut self, k: CharacterIndex, c: Complex64) -> Result<()> {
        if k.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: k.dim(),
            });
        }
        *self.terms.entry(k).or_default() += c;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CharacterIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest box `m_j ≤ k_j ≤ s_j` containing every character.
    pub fn bounds(&self) -> Vec<(i64, i64)> {
        (0..self.dim)
            .map(|j| {
                let it = self.terms.keys().map(|k| k.0[j]);
                (it.clone().min().unwrap_or(0), it.max().unwrap_or(0))
            })
            .collect()
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &TrigPolynomial, b: Complex64) -> Result<Self> {
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), a * c)?;
        }
        for (k, c) in &other.terms {
            out.add_term(k.clone(), b * c)?;
        }
        Ok(out)
    }
}

pub fn trigpoly_eval<S: Scalar>(p: &TrigPolynomial, x: &TorusPoint<S>) -> Result<Complex64> {
    if p.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: p.dim(),
        });
    }
    let mut sum = KahanSum::new();
    for (k, c) in p.terms() {
        sum.add(c * phasor::e(character_phase(k, x)));
    }
    Ok(sum.value())
}

/// `max_i min(|Δᵢ|, 1 − |Δᵢ|)`.
pub fn torus_distance<S: Scalar>(x: &TorusPoint<S>, y: &TorusPoint<S>) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    Ok(x.coords
        .iter()
        .zip(&y.coords)
        .map(|(a, b)| a.minus(b).frac_f64().min(b.minus(a).frac_f64()))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::HpReal;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> BigRational {
        crate::real::parse_rational(s).unwrap()
    }

    fn pt(v: &[&str]) -> TorusPoint<BigRational> {
        TorusPoint::lifted(v.iter().map(|s| q(s)).collect())
    }

    fn quarter_square() -> TorusFlow<BigRational> {
        let z = BigRational::zero();
        TorusFlow::Simple(
            SimplePolySkew::new(
                2,
                2,
                q("1/4"),
                vec![vec![z.clone(); 2]; 2],
                vec![vec![], vec![z.clone(), z.clone(), BigRational::one()]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn identity_affine() {
        let f = TorusFlow::Affine(AffineMap::new(IntMatrix::identity(2), vec![BigRational::zero(); 2]).unwrap());
        let x = pt(&["1/3", "5/7"]);
        assert_eq!(f.step(&x).unwrap(), x);
    }

    #[test]
    fn skew_hand_iteration() {
        let f = quarter_square();
        let x1 = f.step(&pt(&["0", "0"])).unwrap();
        assert_eq!(x1.coords, vec![q("1/4"), q("0")]);
        let x2 = f.step(&x1).unwrap();
        assert_eq!(x2.coords, vec![q("1/2"), q("1/16")]);
        let orbit: Vec<_> = f.orbit(pt(&["0", "0"]), 2).unwrap().collect();
        assert_eq!(orbit, vec![pt(&["0", "0"]), x1, x2]);
    }

    #[test]
    fn rotation_orbit() {
        let f = TorusFlow::Affine(AffineMap::rotation(vec![q("1/3")]));
        let xs: Vec<_> = f
            .orbit(TorusPoint::new(vec![q("0")]), 3)
            .unwrap()
            .map(|p| p.coords[0].clone())
            .collect();
        assert_eq!(xs, vec![q("0"), q("1/3"), q("2/3"), q("0")]);
        assert_eq!(f.orbit(TorusPoint::new(vec![q("0")]), 0).unwrap().count(), 1);
    }

    #[test]
    fn lift_reduces_to_coords_for_many_steps() {
        let f = quarter_square();
        let mut x = pt(&["1/3", "2/5"]);
        for _ in 0..10_000 {
            x = f.step(&x).unwrap();
            let lift = x.lift.as_ref().unwrap();
            for (l, c) in lift.iter().zip(&x.coords) {
                assert_eq!(&l.frac(), c);
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let f = quarter_square();
        assert!(matches!(
            f.step(&pt(&["0"])),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(torus_distance(&pt(&["0"]), &pt(&["0", "0"])).is_err());
    }

    #[test]
    fn affine_power_examples() {
        let a = AffineMap::new(
            IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap(),
            vec![q("2/7"), q("0")],
        )
        .unwrap();
        assert_eq!(power_affine(&a, 1).unwrap(), a);
        let a3 = power_affine(&a, 3).unwrap();
        assert_eq!(a3.matrix, IntMatrix::from_rows(&[vec![1, 0], vec![3, 1]]).unwrap());
        assert_eq!(a3.translation, vec![q("6/7"), q("6/7")]);

        let r = AffineMap::rotation(vec![q("3/5"), q("1/7")]);
        let r7 = power_affine(&r, 7).unwrap();
        let reduced: Vec<_> = r7.translation.iter().map(|t| t.frac()).collect();
        assert_eq!(reduced, vec![q("1/5"), q("0")]);
        assert!(power_affine(&r, 0).is_err());
    }

    #[test]
    fn affine_power_matches_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = AffineMap::new(
            IntMatrix::from_rows(&[vec![1, 0, 0], vec![2, 1, 0], vec![-1, 3, 1]]).unwrap(),
            vec![q("1/3"), q("-2/5"), q("7/8")],
        )
        .unwrap();
        let flow = TorusFlow::Affine(f.clone());
        for _ in 0..100 {
            let qpow = rng.random_range(1..=20);
            let x: Vec<BigRational> = (0..3)
                .map(|_| BigRational::new(rng.random_range(-20..=20).into(), rng.random_range(1..=9).into()))
                .collect();
            let fq = TorusFlow::Affine(power_affine(&f, qpow).unwrap());
            let once = fq.step(&TorusPoint::lifted(x.clone())).unwrap();
            let mut it = TorusPoint::lifted(x);
            for _ in 0..qpow {
                it = flow.step(&it).unwrap();
            }
            assert_eq!(once.lift, it.lift);
        }
    }

    #[test]
    fn characters() {
        let x = pt(&["1/2"]);
        let z = character_eval(&CharacterIndex(vec![1]), &x).unwrap();
        assert!((z + 1.0).norm() < 1e-15);
        // (1,1)·(1/4,1/4) = 1/2
        let y = pt(&["1/4", "1/4"]);
        let z = character_eval(&CharacterIndex(vec![1, 1]), &y).unwrap();
        assert!((z + 1.0).norm() < 1e-15);
        let w = pt(&["1/8", "1/8"]);
        let z = character_eval(&CharacterIndex(vec![1, 1]), &w).unwrap();
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let z = character_eval(&CharacterIndex::zero(2), &y).unwrap();
        assert_eq!(z, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn rotation_eigenfunction() {
        let a: Vec<HpReal> = vec![
            HpReal::from_real(&"sqrt(2)".parse().unwrap()).unwrap(),
            HpReal::from_real(&"1/3".parse().unwrap()).unwrap(),
        ];
        let f = TorusFlow::Affine(AffineMap::rotation(a.clone()));
        let k = CharacterIndex(vec![3, -2]);
        let ka = character_eval(&k, &TorusPoint::new(a)).unwrap();
        let mut x = TorusPoint::new(vec![HpReal::from_int(0), HpReal::zero_val()]);
        for _ in 0..200 {
            let fx = f.step(&x).unwrap();
            let lhs = character_eval(&k, &fx).unwrap();
            let rhs = ka * character_eval(&k, &x).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
            x = fx;
        }
    }

    #[test]
    fn trig_polynomials() {
        let x = pt(&["0.3", "0.1"]);
        let c = Complex64::new(0.5, -2.0);
        let p = TrigPolynomial::constant(2, c);
        assert_eq!(trigpoly_eval(&p, &x).unwrap(), c);
        let k = CharacterIndex(vec![2, -1]);
        let single = TrigPolynomial::character(k.clone());
        assert_eq!(
            trigpoly_eval(&single, &x).unwrap(),
            character_eval(&k, &x).unwrap()
        );
        let mut sym = TrigPolynomial::zero(1);
        let a = Complex64::new(0.7, 0.2);
        sym.add_term(CharacterIndex(vec![1]), a).unwrap();
        sym.add_term(CharacterIndex(vec![-1]), a.conj()).unwrap();
        assert_eq!(sym.bounds(), vec![(-1, 1)]);
        let v = trigpoly_eval(&sym, &pt(&["0.37"])).unwrap();
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn distances() {
        let x = pt(&["0.2", "0.7"]);
        assert_eq!(torus_distance(&x, &x).unwrap(), 0.0);
        assert_eq!(torus_distance(&pt(&["0"]), &pt(&["0.5"])).unwrap(), 0.5);
        assert!((torus_distance(&pt(&["0"]), &pt(&["0.9"])).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn simple_and_general_forms_agree() {
        let z = BigRational::zero();
        let s = SimplePolySkew::new(
            3,
            2,
            q("1/3"),
            vec![vec![z.clone(); 3], vec![z.clone(); 3], vec![z.clone(), q("2"), z.clone()]],
            vec![vec![], vec![q("1"), q("1/2")], vec![z.clone(), z.clone(), q("-3")]],
        )
        .unwrap();
        let g = TorusFlow::General(s.to_general());
        let s = TorusFlow::Simple(s);
        let mut x = pt(&["1/5", "0", "2/3"]);
        let mut y = x.clone();
        for _ in 0..30 {
            x = s.step(&x).unwrap();
            y = g.step(&y).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let z = BigRational::zero();
        assert!(AffineMap::new(
            IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap(),
            vec![z.clone(), z.clone()]
        )
        .is_err());
        // degree of h₂ above k
        assert!(SimplePolySkew::new(
            2,
            1,
            z.clone(),
            vec![vec![z.clone(); 2]; 2],
            vec![vec![], vec![z.clone(), z.clone(), q("1")]]
        )
        .is_err());
    }
}
