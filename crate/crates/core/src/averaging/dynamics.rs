use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;

use super::{check_checkpoints, CesaroSeries};
use crate::error::{Error, Result};
use crate::orbitpoly::BinomialPhase;
use crate::phasor::{e, KahanSum};
use crate::scalar::Scalar;
use crate::seqgen::ComplexSequence;
use crate::torus::{torus_distance, trigpoly_eval, AffineMap, IntMatrix, TorusFlow, TorusPoint, TrigPolynomial};

/// `S_N = (1/N) Σ_{n=1}^N cₙ φ(fⁿx)` at each checkpoint, in one pass over
/// the orbit.
pub fn cesaro_disjointness<S: Scalar>(
    seq: &ComplexSequence,
    flow: &TorusFlow<S>,
    observable: &TrigPolynomial,
    x: &TorusPoint<S>,
    checkpoints: &[u64],
) -> Result<CesaroSeries> {
    if observable.dim() != flow.dim() {
        return Err(Error::DimensionMismatch {
            expected: flow.dim(),
            got: observable.dim(),
        });
    }
    let n_max = check_checkpoints(checkpoints)?;
    seq.require(1, n_max)?;
    let mut orbit = flow.orbit(x.clone(), n_max)?.skip(1);
    let mut out = CesaroSeries::with_capacity(checkpoints.len());
    let mut sum = KahanSum::new();
    let mut cps = checkpoints.iter().copied();
    let mut next_cp = cps.next();
    for n in 1..=n_max {
        let pt = orbit.next().expect("orbit has n_max steps");
        let c = seq.at(n);
        if c.re != 0.0 || c.im != 0.0 {
            sum.add(c * trigpoly_eval(observable, &pt)?);
        }
        if next_cp == Some(n) {
            out.push(n, sum.value() / n as f64);
            next_cp = cps.next();
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanAttraction {
    pub checkpoints: Vec<u64>,
    pub averages: Vec<f64>,
}

/// `(1/N) Σ_{n=1}^N d(fⁿx, fⁿz)` at each checkpoint.
pub fn mean_attraction_estimate<S: Scalar>(
    flow: &TorusFlow<S>,
    x: &TorusPoint<S>,
    z: &TorusPoint<S>,
    checkpoints: &[u64],
) -> Result<MeanAttraction> {
    let n_max = check_checkpoints(checkpoints)?;
    let xs = flow.orbit(x.clone(), n_max)?.skip(1);
    let zs = flow.orbit(z.clone(), n_max)?.skip(1);
    let mut out = MeanAttraction {
        checkpoints: Vec::with_capacity(checkpoints.len()),
        averages: Vec::with_capacity(checkpoints.len()),
    };
    let mut sum = KahanSum::new();
    let mut cps = checkpoints.iter().copied();
    let mut next_cp = cps.next();
    for (n, (a, b)) in (1..=n_max).zip(xs.zip(zs)) {
        sum.add(Complex64::new(torus_distance(&a, &b)?, 0.0));
        if next_cp == Some(n) {
            out.checkpoints.push(n);
            out.averages.push(sum.value().re / n as f64);
            next_cp = cps.next();
        }
    }
    Ok(out)
}

/// `x₁ ↦ x₁ + α`, `xᵢ ↦ xᵢ + x_{i−1}`.
pub fn chain_flow<S: Scalar>(d: usize, alpha: S) -> Result<TorusFlow<S>> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let mut m = IntMatrix::identity(d);
    for i in 1..d {
        m[(i, i - 1)] = BigInt::one();
    }
    let mut a = vec![S::zero_val(); d];
    a[0] = alpha;
    Ok(TorusFlow::Affine(AffineMap::new(m, a)?))
}

/// The rotation number `α` when `flow` is a chain as built by [`chain_flow`].
fn chain_alpha<S: Scalar>(flow: &TorusFlow<S>) -> Option<&S> {
    let TorusFlow::Affine(f) = flow else {
        return None;
    };
    let d = f.dim();
    for i in 0..d {
        for j in 0..d {
            let want = i64::from(i == j || i == j + 1);
            if f.matrix[(i, j)] != BigInt::from(want) {
                return None;
            }
        }
    }
    if f.translation[1..].iter().any(|t| !t.is_zero_val()) {
        return None;
    }
    Some(&f.translation[0])
}

/// Binomial phases of `x_d` along the chain orbit of `z`:
/// `x_dⁿ = Σ_{j<d} z_{d−j} C(n, j) + α C(n, d)`.
pub fn chain_thetas<S: Scalar>(alpha: &S, z: &[S]) -> BinomialPhase<S> {
    let mut thetas: Vec<S> = z.iter().rev().cloned().collect();
    thetas.push(alpha.clone());
    BinomialPhase::new(thetas)
}

/// `max_{0≤n≤N} |g(fⁿz) − e(Σ_j θ_j C(n, j))|` for `g = e(x_d)` on a chain.
pub fn quasi_eigen_crosscheck<S: Scalar>(
    theta: &BinomialPhase<S>,
    flow: &TorusFlow<S>,
    z: &TorusPoint<S>,
    n_max: u64,
) -> Result<f64> {
    if chain_alpha(flow).is_none() {
        return Err(Error::invalid(format!(
            "{} flow is not in Jordan-chain form",
            flow.kind()
        )));
    }
    let d = flow.dim();
    let mut worst = 0.0f64;
    for (n, pt) in flow.orbit(z.clone(), n_max)?.enumerate() {
        let g = e(pt.coords[d - 1].frac_f64());
        let model = e(theta.eval_mod1(n as u64));
        worst = worst.max((g - model).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbitpoly::{binomial_to_monomial, expand_orbit};
    use crate::real::{parse_rational, Real};
    use crate::scalar::HpReal;
    use crate::torus::{CharacterIndex, SimplePolySkew};
    use num_rational::BigRational;

    fn hp(s: &str) -> HpReal {
        HpReal::from_real(&s.parse::<Real>().unwrap()).unwrap()
    }

    #[test]
    fn rotation_negative_control() {
        let alpha: Real = "sqrt(2)-1".parse().unwrap();
        let n = 100_000;
        let seq = ComplexSequence::linear_phase(&alpha, n).unwrap();
        let flow = TorusFlow::Affine(AffineMap::rotation(vec![HpReal::from_real(&alpha).unwrap()]));
        let obs = TrigPolynomial::character(CharacterIndex(vec![-1]));
        let s = cesaro_disjointness(&seq, &flow, &obs, &TorusPoint::origin(1), &[10, 1000, n]).unwrap();
        for v in &s.values {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_observable_and_errors() {
        let seq = ComplexSequence::mobius(1000).unwrap();
        let flow = chain_flow(2, hp("1/3")).unwrap();
        let x = TorusPoint::origin(2);
        let s = cesaro_disjointness(&seq, &flow, &TrigPolynomial::zero(2), &x, &[1000]).unwrap();
        assert_eq!(s.values[0], Complex64::new(0.0, 0.0));
        assert!(cesaro_disjointness(&seq, &flow, &TrigPolynomial::zero(3), &x, &[10]).is_err());
        assert!(cesaro_disjointness(&seq, &flow, &TrigPolynomial::zero(2), &TorusPoint::origin(1), &[10]).is_err());
        assert!(matches!(
            cesaro_disjointness(&seq, &flow, &TrigPolynomial::zero(2), &x, &[1001]),
            Err(Error::SequenceExhausted { .. })
        ));
    }

    #[test]
    fn disjointness_is_linear_in_the_observable() {
        let seq = ComplexSequence::mobius(20_000).unwrap();
        let f = SimplePolySkew::new(
            2,
            2,
            hp("1/4+sqrt(2)/1048576"),
            vec![vec![HpReal::zero_val(); 2]; 2],
            vec![vec![], vec![HpReal::zero_val(), HpReal::zero_val(), HpReal::from_int(1)]],
        )
        .unwrap();
        let flow = TorusFlow::Simple(f);
        let x = TorusPoint::origin(2);
        let phi = TrigPolynomial::character(CharacterIndex(vec![1, 1]));
        let mut psi = TrigPolynomial::character(CharacterIndex(vec![0, -2]));
        psi.add_term(CharacterIndex(vec![3, 0]), Complex64::new(0.5, -1.0)).unwrap();
        let (a, b) = (Complex64::new(2.0, 1.0), Complex64::new(-0.5, 3.0));
        let cps = [100, 5000, 20_000];
        let sp = cesaro_disjointness(&seq, &flow, &phi, &x, &cps).unwrap();
        let sq = cesaro_disjointness(&seq, &flow, &psi, &x, &cps).unwrap();
        let sc = cesaro_disjointness(&seq, &flow, &phi.combine(a, &psi, b).unwrap(), &x, &cps).unwrap();
        for i in 0..cps.len() {
            assert!((sc.values[i] - (a * sp.values[i] + b * sq.values[i])).norm() < 1e-12);
        }
    }

    #[test]
    fn mean_attraction_examples() {
        let rot = TorusFlow::Affine(AffineMap::rotation(vec![hp("sqrt(3)"), hp("1/7")]));
        let x = TorusPoint::new(vec![hp("1/10"), hp("1/2")]);
        let z = TorusPoint::new(vec![hp("3/10"), hp("1/4")]);
        let same = mean_attraction_estimate(&rot, &x, &x, &[10, 100]).unwrap();
        assert_eq!(same.averages, vec![0.0, 0.0]);
        let d0 = torus_distance(&x, &z).unwrap();
        let m = mean_attraction_estimate(&rot, &x, &z, &[1, 50, 500]).unwrap();
        for a in &m.averages {
            assert!((a - d0).abs() < 1e-12);
        }
        let back = mean_attraction_estimate(&rot, &z, &x, &[1, 50, 500]).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn mean_attraction_on_anzai_skew() {
        let a = AffineMap::new(
            IntMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap(),
            vec![hp("sqrt(2)-1"), HpReal::zero_val()],
        )
        .unwrap();
        let flow = TorusFlow::Affine(a);
        let delta = hp("1/8");
        let x = TorusPoint::new(vec![HpReal::zero_val(), delta.clone()]);
        let z = TorusPoint::origin(2);
        let m = mean_attraction_estimate(&flow, &x, &z, &[1, 100, 1000]).unwrap();
        for a in &m.averages {
            assert!((a - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_attraction_symmetric_on_skews() {
        let flow = chain_flow(3, hp("sqrt(5)")).unwrap();
        let x = TorusPoint::new(vec![hp("1/3"), hp("sqrt(2)"), hp("0")]);
        let z = TorusPoint::new(vec![hp("1/3"), hp("0"), hp("2/7")]);
        let cps = [10, 200];
        assert_eq!(
            mean_attraction_estimate(&flow, &x, &z, &cps).unwrap(),
            mean_attraction_estimate(&flow, &z, &x, &cps).unwrap()
        );
        assert!(mean_attraction_estimate(&flow, &x, &z, &cps).unwrap().averages[1] > 0.0);
    }

    #[test]
    fn chain_thetas_agree_with_symbolic_expansion() {
        let r = |s: &str| parse_rational(s).unwrap();
        for d in 2..=4usize {
            let alpha = r("3/7");
            let z: Vec<BigRational> = (0..d).map(|i| r(&format!("{}/{}", i + 1, i + 5))).collect();
            let flow = chain_flow(d, alpha.clone()).unwrap();
            let TorusFlow::Affine(f) = &flow else { unreachable!() };
            let exp = expand_orbit(&TorusFlow::Affine(f.clone()), &z).unwrap();
            let thetas = chain_thetas(&alpha, &z);
            assert_eq!(binomial_to_monomial(&thetas), exp.polys[d - 1], "d={d}");
        }
    }

    #[test]
    fn quasi_eigen_examples() {
        let alpha = hp("sqrt(2)");
        let z = vec![hp("sqrt(3)/5"), hp("1/9")];
        let flow = chain_flow(2, alpha.clone()).unwrap();
        let dev = quasi_eigen_crosscheck(&chain_thetas(&alpha, &z), &flow, &TorusPoint::new(z.clone()), 10_000).unwrap();
        assert!(dev < 1e-9, "{dev}");

        let rot = chain_flow(1, alpha.clone()).unwrap();
        let th = BinomialPhase::new(vec![z[0].clone(), alpha.clone()]);
        assert!(quasi_eigen_crosscheck(&th, &rot, &TorusPoint::new(vec![z[0].clone()]), 1000).unwrap() < 1e-12);

        let zero = chain_flow(3, HpReal::zero_val()).unwrap();
        let th = BinomialPhase::new(vec![HpReal::zero_val(); 4]);
        assert_eq!(quasi_eigen_crosscheck(&th, &zero, &TorusPoint::origin(3), 100).unwrap(), 0.0);

        // a wrong model is detected
        let bad = BinomialPhase::new(vec![z[1].clone(), z[0].clone(), hp("1/3")]);
        assert!(quasi_eigen_crosscheck(&bad, &flow, &TorusPoint::new(z), 100).unwrap() > 1e-3);
    }

    #[test]
    fn non_chain_flows_rejected() {
        let a = AffineMap::new(
            IntMatrix::from_rows(&[vec![1, 0], vec![2, 1]]).unwrap(),
            vec![hp("1/3"), HpReal::zero_val()],
        )
        .unwrap();
        let th = BinomialPhase::new(vec![HpReal::zero_val(); 3]);
        assert!(quasi_eigen_crosscheck(&th, &TorusFlow::Affine(a), &TorusPoint::origin(2), 10).is_err());
        let shifted = AffineMap::new(IntMatrix::identity(2), vec![hp("1/3"), hp("1/5")]).unwrap();
        assert!(quasi_eigen_crosscheck(&th, &TorusFlow::Affine(shifted), &TorusPoint::origin(2), 10).is_err());
    }
}
