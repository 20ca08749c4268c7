use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use osclab::averaging::{
    cesaro_disjointness, chain_flow, chain_thetas, mean_attraction_estimate, quasi_eigen_crosscheck, ReportRow,
    Verdict,
};
use osclab::orbitpoly::{binomial_to_monomial, expand_orbit, first_mismatch};
use osclab::real::Real;
use osclab::scalar::{HpReal, Scalar};
use osclab::torus::{
    parse_flow, unipotent_triangularize, CharacterIndex, FlowDocument, IntMatrix, TorusPoint,
    TrigPolynomial,
};
use serde_json::json;

use super::{row, string_args, Env, Outcome, Plan};
use crate::config::{
    checkpoints, config_err, int_or, number, number_or, parse_int, real_list, req_int, required, CliError,
    CliResult,
};
use crate::seqspec::SeqSpec;

fn load_flow(v: &Option<String>) -> CliResult<FlowDocument> {
    let path = Path::new(required(v, "flow")?);
    let text = std::fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_flow(&text)?)
}

fn hp_point(x: &[Real]) -> CliResult<TorusPoint<HpReal>> {
    Ok(TorusPoint::new(x.iter().map(HpReal::from_real).collect::<osclab::Result<_>>()?))
}

fn point_arg(v: &Option<String>, key: &str, d: usize, default: Vec<Real>) -> CliResult<Vec<Real>> {
    let x = match v {
        Some(s) => real_list(s, key)?,
        None => default,
    };
    if x.len() != d {
        return Err(config_err(format!("'{key}' has {} coordinates, the flow has {d}", x.len())));
    }
    Ok(x)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

/// `k₁,…,k_d[:c]` terms separated by `;`, real coefficients.
pub fn parse_observable(s: &str, d: usize) -> CliResult<TrigPolynomial> {
    let mut p = TrigPolynomial::zero(d);
    for term in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, c) = term.split_once(':').unwrap_or((term, "1"));
        let k: Vec<i64> = crate::config::int_list(k, "observable")?;
        p.add_term(CharacterIndex(k), Complex64::new(number(c, "observable")?, 0.0))?;
    }
    Ok(p)
}

string_args! {
    /// Exact orbit polynomials of a rational flow and their degree bounds.
    ExpandArgs {
        /// Flow file (TOML).
        flow,
        /// Compare against exact iteration for n = 0..=n_check (default 50).
        n_check,
    }
}

pub fn expand(a: ExpandArgs, _env: &Env) -> CliResult<Plan> {
    let doc = load_flow(&a.flow)?;
    let flow = doc.flow.try_map(BigRational::from_real)?;
    let x: Vec<BigRational> = doc.start().iter().map(BigRational::from_real).collect::<osclab::Result<_>>()?;
    let n_check: u64 = int_or(&a.n_check, "n_check", 50)?;
    let d = flow.dim();
    Ok(Plan::new(d + 1, move || {
        let e = expand_orbit(&flow, &x)?;
        let mm = first_mismatch(&flow, &x, &e, n_check)?;
        let mut rows: Vec<ReportRow> = (0..d)
            .map(|i| {
                let deg = e.degrees[i].unwrap_or(0);
                ReportRow {
                    flow: flow.kind().into(),
                    observable: "degree".into(),
                    param: format!("P_{}", i + 1),
                    re: deg as f64,
                    abs: deg as f64,
                    threshold: Some(e.bounds[i] as f64),
                    verdict: Verdict::from_bool(deg <= e.bounds[i]),
                    ..row("expand")
                }
            })
            .collect();
        rows.push(ReportRow {
            flow: flow.kind().into(),
            observable: "orbit_match".into(),
            param: mm.map_or("none".into(), |(n, i)| format!("n={n},i={i}")),
            n: n_check,
            verdict: Verdict::from_bool(mm.is_none()),
            ..row("expand")
        });
        let polys: Vec<serde_json::Value> = e
            .polys
            .iter()
            .map(|p| serde_json::from_str(&p.to_json()).expect("valid json"))
            .collect();
        let doc = json!({
            "flow": flow.kind(),
            "polys": polys,
            "degrees": e.degrees,
            "bounds": e.bounds,
            "recursive_bounds": e.recursive_bounds,
            "order": e.order,
            "first_mismatch": mm.map(|(n, i)| json!({"n": n, "i": i})),
        });
        Ok(Outcome::from_rows(&rows).with_file("expansion.json", pretty(&doc)))
    }))
}

pub fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes") + "\n"
}

string_args! {
    /// Cesàro averages (1/N) Σ cₙ φ(fⁿx) along a flow.
    DisjointArgs {
        seq,
        flow,
        /// Trigonometric polynomial, e.g. `1,1` or `1,0:0.5;0,1:0.5`.
        observable,
        /// Starting point (default: the flow file's x0, else the origin).
        x,
        nmax,
        checkpoints,
        /// Bound on |S_N| at the last checkpoint (none: report only).
        threshold,
    }
}

pub fn disjoint(a: DisjointArgs, env: &Env) -> CliResult<Plan> {
    let spec = SeqSpec::parse(a.seq.as_deref().unwrap_or("mobius"))?;
    let doc = load_flow(&a.flow)?;
    let d = doc.flow.dim();
    let flow = doc.flow.try_map(HpReal::from_real)?;
    let obs = parse_observable(required(&a.observable, "observable")?, d)?;
    let x = point_arg(&a.x, "x", d, doc.start())?;
    let nmax: u64 = req_int(&a.nmax, "nmax")?;
    let cps = checkpoints(&a.checkpoints, nmax)?;
    let threshold = a.threshold.as_deref().map(|t| number(t, "threshold")).transpose()?;
    let ceiling = env.precision_ceiling;
    let observable = a.observable.clone().unwrap_or_default();
    Ok(Plan::new(1, move || {
        let seq = spec.build(nmax, ceiling)?;
        let s = cesaro_disjointness(&seq, &flow, &obs, &hp_point(&x)?, &cps)?;
        let t = ReportRow {
            sequence: spec.to_string(),
            flow: flow.kind().into(),
            observable,
            param: format!("x={}", join(&x)),
            ..row("disjoint")
        };
        Ok(Outcome::from_rows(&ReportRow::from_series(&t, &s, threshold)))
    }))
}

string_args! {
    /// Running means (1/N) Σ d(fⁿx, fⁿz) of the torus distance.
    MmaArgs {
        flow,
        /// First point (default: the flow file's x0, else the origin).
        x,
        /// Second point.
        z,
        nmax,
        checkpoints,
        /// ε: the last mean must stay below it (none: report only).
        epsilon,
    }
}

pub fn mma(a: MmaArgs, _env: &Env) -> CliResult<Plan> {
    let doc = load_flow(&a.flow)?;
    let d = doc.flow.dim();
    let flow = doc.flow.try_map(HpReal::from_real)?;
    let x = point_arg(&a.x, "x", d, doc.start())?;
    required(&a.z, "z")?;
    let z = point_arg(&a.z, "z", d, Vec::new())?;
    let nmax: u64 = req_int(&a.nmax, "nmax")?;
    let cps = checkpoints(&a.checkpoints, nmax)?;
    let eps = a.epsilon.as_deref().map(|t| number(t, "epsilon")).transpose()?;
    Ok(Plan::new(1, move || {
        let m = mean_attraction_estimate(&flow, &hp_point(&x)?, &hp_point(&z)?, &cps)?;
        let last = m.averages.len().saturating_sub(1);
        let rows: Vec<ReportRow> = m
            .checkpoints
            .iter()
            .zip(&m.averages)
            .enumerate()
            .map(|(i, (&n, &v))| ReportRow {
                flow: flow.kind().into(),
                observable: "mean_distance".into(),
                param: format!("x={};z={}", join(&x), join(&z)),
                n,
                re: v,
                abs: v,
                threshold: eps,
                verdict: match eps {
                    Some(e) if i == last => Verdict::from_bool(v < e),
                    _ => Verdict::Info,
                },
                ..row("mma")
            })
            .collect();
        Ok(Outcome::from_rows(&rows))
    }))
}

string_args! {
    /// Binomial phases of e(x_d) on the chain x₁ + α, xᵢ + x_{i−1}.
    QdsArgs {
        /// Dimension of the chain.
        d,
        alpha,
        /// Starting point z, d coordinates.
        z,
        /// Largest n checked (default 10000).
        nmax,
        /// Largest accepted deviation (default 1e-9).
        tolerance,
    }
}

pub fn qds(a: QdsArgs, _env: &Env) -> CliResult<Plan> {
    let d: usize = req_int(&a.d, "d")?;
    let alpha = crate::config::real(required(&a.alpha, "alpha")?, "alpha")?;
    let z = real_list(required(&a.z, "z")?, "z")?;
    if d == 0 || z.len() != d {
        return Err(config_err(format!("'z' must have d = {d} coordinates")));
    }
    let nmax: u64 = int_or(&a.nmax, "nmax", 10_000)?;
    let tol = number_or(&a.tolerance, "tolerance", 1e-9)?;
    let exact: Option<(BigRational, Vec<BigRational>)> = alpha
        .as_rational()
        .and_then(|a| Some((a, z.iter().map(Real::as_rational).collect::<Option<Vec<_>>>()?)));
    let symbolic = exact.is_some() && d >= 2;
    Ok(Plan::new(1 + usize::from(symbolic), move || {
        let param = format!("alpha={alpha};z={}", join(&z));
        let mut rows = Vec::new();
        if let (true, Some((qa, qz))) = (symbolic, &exact) {
            let e = expand_orbit(&chain_flow(d, qa.clone())?, qz)?;
            let same = binomial_to_monomial(&chain_thetas(qa, qz)) == e.polys[d - 1];
            rows.push(ReportRow {
                observable: "symbolic".into(),
                param: param.clone(),
                verdict: Verdict::from_bool(same),
                ..row("qds")
            });
        }
        let ha = HpReal::from_real(&alpha)?;
        let hz: Vec<HpReal> = z.iter().map(HpReal::from_real).collect::<osclab::Result<_>>()?;
        let flow = chain_flow(d, ha.clone())?;
        let dev = quasi_eigen_crosscheck(&chain_thetas(&ha, &hz), &flow, &TorusPoint::new(hz), nmax)?;
        rows.push(ReportRow {
            observable: "deviation".into(),
            param,
            n: nmax,
            re: dev,
            abs: dev,
            threshold: Some(tol),
            verdict: Verdict::from_bool(dev < tol),
            ..row("qds")
        });
        Ok(Outcome::from_rows(&rows))
    }))
}

/// Rows separated by `;`, entries by `,`.
pub fn parse_matrix(s: &str) -> CliResult<IntMatrix> {
    let rows: Vec<Vec<BigInt>> = s
        .split(';')
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| crate::config::split_list(r).into_iter().map(|t| parse_int(t, "matrix")).collect())
        .collect::<CliResult<_>>()?;
    Ok(IntMatrix::from_big_rows(rows)?)
}

fn matrix_json(m: &IntMatrix) -> serde_json::Value {
    json!(m
        .rows()
        .iter()
        .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

string_args! {
    /// Unimodular P with P⁻¹AP lower unitriangular, for unipotent A.
    TriangularizeArgs {
        /// Integer matrix, rows separated by `;`, e.g. `1,0;1,1`.
        matrix,
    }
}

pub fn triangularize(a: TriangularizeArgs, _env: &Env) -> CliResult<Plan> {
    let text = required(&a.matrix, "matrix")?.to_string();
    let m = parse_matrix(&text)?;
    Ok(Plan::new(1, move || {
        let p = unipotent_triangularize(&m)?;
        let t = p.inverse()?.mul(&m).mul(&p);
        let ok = p.det() == BigInt::from(1) && t.is_lower_unitriangular();
        let rows = vec![ReportRow {
            param: text.clone(),
            verdict: Verdict::from_bool(ok),
            ..row("triangularize")
        }];
        let doc = json!({"A": matrix_json(&m), "P": matrix_json(&p), "P_inv_A_P": matrix_json(&t)});
        Ok(Outcome::from_rows(&rows).with_file("triangularize.json", pretty(&doc)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observables_and_matrices() {
        let p = parse_observable("1,1", 2).unwrap();
        assert_eq!(p.len(), 1);
        let p = parse_observable("1,0:1/2;0,1:-1", 2).unwrap();
        assert_eq!(p.len(), 2);
        assert!(parse_observable("1,1,1", 2).is_err());
        let m = parse_matrix("1,0;1,1").unwrap();
        assert_eq!(m.dim(), 2);
        assert!(parse_matrix("1,0;1").is_err());
        assert!(parse_matrix("1,x;0,1").is_err());
    }
}
