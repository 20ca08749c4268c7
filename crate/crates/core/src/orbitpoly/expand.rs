use num_rational::BigRational;
use num_traits::{One, Zero};

use super::RationalPoly;
use crate::error::{Error, Result};
use crate::torus::{
    AffineMap, GeneralPolySkew, Monomial, MultiPoly, SimplePolySkew, TorusFlow, TorusPoint,
};

/// Lifted orbit coordinates `x_i^n = P_i(n)` and their degrees.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitExpansion {
    pub polys: Vec<RationalPoly>,
    /// Attained degrees (`None` for an identically zero coordinate).
    pub degrees: Vec<Option<usize>>,
    /// `deg P_1 ≤ 1` and `deg P_i ≤ i + k − 1` for simple skew products,
    /// `deg P_i ≤ k^{i−1} + 1` for general ones.
    pub bounds: Vec<usize>,
    /// Bounds that follow from the recursion itself: `D_1 = 1` and
    /// `D_i = k·D_{i−1} + 1` for general skew products; equal to `bounds`
    /// for simple ones.
    pub recursive_bounds: Vec<usize>,
    /// `max(1, deg P_2, …, deg P_d)`.
    pub order: usize,
}

impl OrbitExpansion {
    fn new(polys: Vec<RationalPoly>, bounds: Vec<usize>, recursive_bounds: Vec<usize>) -> Self {
        let degrees: Vec<Option<usize>> = polys.iter().map(RationalPoly::degree).collect();
        let order = degrees
            .iter()
            .skip(1)
            .flatten()
            .copied()
            .fold(1, usize::max);
        OrbitExpansion {
            polys,
            degrees,
            bounds,
            recursive_bounds,
            order,
        }
    }

    /// Coordinates whose attained degree exceeds `bounds`, 1-based.
    pub fn bound_violations(&self) -> Vec<usize> {
        violations(&self.degrees, &self.bounds)
    }

    pub fn within_bounds(&self) -> bool {
        self.bound_violations().is_empty()
    }

    pub fn within_recursive_bounds(&self) -> bool {
        violations(&self.degrees, &self.recursive_bounds).is_empty()
    }

    /// The lifted point `(P_1(n), …, P_d(n))`.
    pub fn eval(&self, n: i64) -> Vec<BigRational> {
        self.polys.iter().map(|p| p.eval_int(n)).collect()
    }
}

fn violations(degrees: &[Option<usize>], bounds: &[usize]) -> Vec<usize> {
    degrees
        .iter()
        .zip(bounds)
        .enumerate()
        .filter(|(_, (d, b))| d.is_some_and(|d| d > **b))
        .map(|(i, _)| i + 1)
        .collect()
}

fn check_start(d: usize, x: &[BigRational]) -> Result<()> {
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    Ok(())
}

/// `P_1 = x_1 + a n` and, for `i ≥ 2`,
/// `P_i(n) = x_i + Σ_{l<n} (h_i(P_1(l)) + Σ_j b_ij P_j(l))`.
pub fn expand_orbit_simple(
    flow: &SimplePolySkew<BigRational>,
    x: &[BigRational],
) -> Result<OrbitExpansion> {
    check_start(flow.d, x)?;
    let p1 = RationalPoly::from_coeffs(vec![x[0].clone(), flow.a.clone()]);
    let mut polys = vec![p1.clone()];
    for i in 1..flow.d {
        let mut step = RationalPoly::from_coeffs(flow.h[i].clone()).compose(&p1);
        for j in 1..i {
            step = step.add(&polys[j].scale(&flow.b[i][j]));
        }
        polys.push(RationalPoly::constant(x[i].clone()).add(&step.sum_below()));
    }
    let bounds: Vec<usize> = (1..=flow.d)
        .map(|i| if i == 1 { 1 } else { i + flow.k - 1 })
        .collect();
    Ok(OrbitExpansion::new(polys, bounds.clone(), bounds))
}

/// `P_1 = x_1 + a n`, `P_i(n) = x_i + Σ_{l<n} h_i(P_1(l), …, P_{i−1}(l))`.
pub fn expand_orbit_general(
    flow: &GeneralPolySkew<BigRational>,
    x: &[BigRational],
) -> Result<OrbitExpansion> {
    check_start(flow.d, x)?;
    let mut polys = vec![RationalPoly::from_coeffs(vec![x[0].clone(), flow.a.clone()])];
    for i in 1..flow.d {
        let step = eval_multi(&flow.h[i], &polys);
        polys.push(RationalPoly::constant(x[i].clone()).add(&step.sum_below()));
    }
    let k = flow.k;
    let bounds: Vec<usize> = (1..=flow.d)
        .map(|i| if i == 1 { 1 } else { k.pow(i as u32 - 1) + 1 })
        .collect();
    let mut recursive = vec![1usize];
    for _ in 1..flow.d {
        let prev = *recursive.last().expect("nonempty");
        recursive.push(k * prev + 1);
    }
    Ok(OrbitExpansion::new(polys, bounds, recursive))
}

/// Expansion for any flow whose orbit is polynomial: skew products, and
/// affine maps with a lower unitriangular matrix (written as a degree-1
/// general skew product).
pub fn expand_orbit(flow: &TorusFlow<BigRational>, x: &[BigRational]) -> Result<OrbitExpansion> {
    match flow {
        TorusFlow::Simple(s) => expand_orbit_simple(s, x),
        TorusFlow::General(g) => expand_orbit_general(g, x),
        TorusFlow::Affine(a) => expand_orbit_general(&affine_as_skew(a)?, x),
    }
}

/// `x ↦ A x + a` with `A` lower unitriangular as
/// `x_i ↦ x_i + (a_i + Σ_{j<i} A_ij x_j)`.
pub fn affine_as_skew(f: &AffineMap<BigRational>) -> Result<GeneralPolySkew<BigRational>> {
    if !f.matrix.is_lower_unitriangular() {
        return Err(Error::invalid(
            "affine matrix must be lower unitriangular; triangularize it first",
        ));
    }
    let d = f.dim();
    if d < 2 {
        return Err(Error::invalid("affine skew form needs d ≥ 2"));
    }
    let mut h = vec![MultiPoly::zero(0)];
    for i in 1..d {
        let mut p = MultiPoly::zero(i);
        if !f.translation[i].is_zero() {
            p.terms.push(Monomial {
                coeff: f.translation[i].clone(),
                exps: vec![0; i],
            });
        }
        for j in 0..i {
            let c = &f.matrix[(i, j)];
            if !c.is_zero() {
                let mut exps = vec![0; i];
                exps[j] = 1;
                p.terms.push(Monomial {
                    coeff: BigRational::from_integer(c.clone()),
                    exps,
                });
            }
        }
        h.push(p);
    }
    GeneralPolySkew::new(d, 1, f.translation[0].clone(), h)
}

fn eval_multi(p: &MultiPoly<BigRational>, vars: &[RationalPoly]) -> RationalPoly {
    let mut acc = RationalPoly::zero();
    for t in &p.terms {
        let mut v = RationalPoly::constant(t.coeff.clone());
        for (x, &e) in vars.iter().zip(&t.exps) {
            if e > 0 {
                v = v.mul(&x.pow(e));
            }
        }
        acc = acc.add(&v);
    }
    acc
}

/// First `(n, i)` (coordinate 1-based) with `P_i(n)` different from the
/// exactly iterated lift, for `n = 0..=n_max`.
pub fn first_mismatch(
    flow: &TorusFlow<BigRational>,
    x: &[BigRational],
    expansion: &OrbitExpansion,
    n_max: u64,
) -> Result<Option<(u64, usize)>> {
    let start = TorusPoint::lifted(x.to_vec());
    for (n, p) in flow.orbit(start, n_max)?.enumerate() {
        let lift = p.lift.expect("lifted orbit");
        let want = expansion.eval(n as i64);
        if let Some(i) = (0..lift.len()).find(|&i| lift[i] != want[i]) {
            return Ok(Some((n as u64, i + 1)));
        }
    }
    Ok(None)
}

/// `Σ_{j} θ_j C(n, j)` written in monomials, via signed Stirling numbers of
/// the first kind: `n(n−1)⋯(n−j+1) = Σ_i s(j, i) nⁱ`.
pub(crate) fn binomial_basis(j: usize) -> RationalPoly {
    let mut s = vec![BigRational::one()]; // s(0, ·)
    for m in 0..j {
        // s(m+1, i) = s(m, i−1) − m·s(m, i)
        let mut next = vec![BigRational::zero(); s.len() + 1];
        for (i, c) in s.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * BigRational::from_integer(m.into());
        }
        s = next;
    }
    let fact: num_bigint::BigInt = (1..=j).map(num_bigint::BigInt::from).product();
    RationalPoly::from_coeffs(s).scale(&BigRational::new(1.into(), fact))
}
