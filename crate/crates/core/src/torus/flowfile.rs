//! Flow description files (TOML, one flow per document).
//!
//! ```toml
//! type = "simple_skew"      # affine | simple_skew | general_skew
//! d = 3
//! k = 2
//! a = "1/4 + 2^-20*sqrt(2)"
//! h_2 = ["0", "0", "1"]     # coefficients of h₂(x₁), constant term first
//! h_3 = ["1/2"]
//! x0 = ["0", "0", "0"]      # optional starting point
//!
//! [b.3]                     # b_ij, simple_skew only
//! 2 = "1/3"
//! ```
//!
//! Affine flows give `A` as rows of integers and `a` as a list. General skew
//! products give each `h_i` as a list of terms `{ c = "…", e = [e₁, …, e_{i−1}] }`.
//! Numbers are strings (decimal, `p/q`, or the surd grammar of [`Real`]) or
//! TOML integers; TOML floats are rejected so values never pass through
//! binary rounding.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use toml::{Table, Value};

use super::{AffineMap, GeneralPolySkew, IntMatrix, Monomial, MultiPoly, SimplePolySkew, TorusFlow};
use crate::error::{Error, Result};
use crate::real::Real;

/// Largest dimension accepted from a file.
const MAX_DIM: usize = 64;
/// Largest degree accepted from a file.
const MAX_DEGREE: usize = 64;

/// A parsed flow and its optional starting point.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowDocument {
    pub flow: TorusFlow<Real>,
    pub x0: Option<Vec<Real>>,
}

impl FlowDocument {
    /// Starting point, defaulting to the origin.
    pub fn start(&self) -> Vec<Real> {
        self.x0
            .clone()
            .unwrap_or_else(|| vec![Real::zero(); self.flow.dim()])
    }
}

pub fn parse_flow(text: &str) -> Result<FlowDocument> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        Error::parse(line, e.message().to_string())
    })?;
    let kind = get_str(&table, "type")?;
    let d = get_usize(&table, "d")?;
    if d == 0 || d > MAX_DIM {
        return Err(bad(format!("d must be in 1..={}", MAX_DIM)));
    }

    let mut allowed: BTreeSet<String> = ["type", "d", "x0"].iter().map(|s| s.to_string()).collect();
    let flow = match kind {
        "affine" => {
            allowed.extend(["A".into(), "a".into()]);
            let rows = table
                .get("A")
                .ok_or_else(|| bad("missing key 'A'"))?
                .as_array()
                .ok_or_else(|| bad("'A' must be an array of rows"))?;
            if rows.len() != d {
                return Err(bad(format!("'A' must have {} rows", d)));
            }
            let mut big_rows = Vec::with_capacity(d);
            for row in rows {
                let row = row.as_array().ok_or_else(|| bad("'A' rows must be arrays"))?;
                if row.len() != d {
                    return Err(bad(format!("'A' rows must have {} entries", d)));
                }
                big_rows.push(row.iter().map(integer).collect::<Result<Vec<_>>>()?);
            }
            let matrix = IntMatrix::from_big_rows(big_rows)?;
            let a = real_list(table.get("a").ok_or_else(|| bad("missing key 'a'"))?, "a")?;
            TorusFlow::Affine(AffineMap::new(matrix, a)?)
        }
        "simple_skew" => {
            allowed.extend(["k".into(), "a".into(), "b".into()]);
            let k = get_degree(&table)?;
            let a = real(table.get("a").ok_or_else(|| bad("missing key 'a'"))?)?;
            let mut b = vec![vec![Real::zero(); d]; d];
            if let Some(bt) = table.get("b") {
                let bt = bt.as_table().ok_or_else(|| bad("'b' must be a table"))?;
                for (i, row) in bt {
                    let i = index(i, "b")?;
                    let row = row.as_table().ok_or_else(|| bad("'b' rows must be tables"))?;
                    for (j, v) in row {
                        let j = index(j, "b")?;
                        if !(3..=d).contains(&i) || !(2..i).contains(&j) {
                            return Err(bad(format!("b[{}][{}] is not a free coefficient", i, j)));
                        }
                        b[i - 1][j - 1] = real(v)?;
                    }
                }
            }
            let mut h = vec![Vec::new()];
            for i in 2..=d {
                let key = format!("h_{}", i);
                let coeffs = match table.get(&key) {
                    Some(v) => real_list(v, &key)?,
                    None => Vec::new(),
                };
                if coeffs.len() > MAX_DEGREE + 1 {
                    return Err(bad(format!("'{}' has too many coefficients", key)));
                }
                allowed.insert(key);
                h.push(coeffs);
            }
            TorusFlow::Simple(SimplePolySkew::new(d, k, a, b, h)?)
        }
        "general_skew" => {
            allowed.extend(["k".into(), "a".into()]);
            let k = get_degree(&table)?;
            let a = real(table.get("a").ok_or_else(|| bad("missing key 'a'"))?)?;
            let mut h = vec![MultiPoly::zero(0)];
            for i in 2..=d {
                let key = format!("h_{}", i);
                let mut p = MultiPoly::zero(i - 1);
                if let Some(v) = table.get(&key) {
                    let terms = v
                        .as_array()
                        .ok_or_else(|| bad(format!("'{}' must be an array of terms", key)))?;
                    for t in terms {
                        p.terms.push(monomial(t, i - 1, &key)?);
                    }
                }
                allowed.insert(key);
                h.push(p);
            }
            TorusFlow::General(GeneralPolySkew::new(d, k, a, h)?)
        }
        other => return Err(bad(format!("unknown flow type '{}'", other))),
    };

    for key in table.keys() {
        if !allowed.contains(key) {
            return Err(bad(format!("unknown key '{}'", key)));
        }
    }
    let x0 = match table.get("x0") {
        Some(v) => {
            let x = real_list(v, "x0")?;
            if x.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: x.len(),
                });
            }
            Some(x)
        }
        None => None,
    };
    Ok(FlowDocument { flow, x0 })
}

fn bad(msg: impl Into<String>) -> Error {
    Error::invalid(msg)
}

fn get_str<'a>(t: &'a Table, key: &str) -> Result<&'a str> {
    t.get(key)
        .ok_or_else(|| bad(format!("missing key '{}'", key)))?
        .as_str()
        .ok_or_else(|| bad(format!("'{}' must be a string", key)))
}

fn get_usize(t: &Table, key: &str) -> Result<usize> {
    let v = t
        .get(key)
        .ok_or_else(|| bad(format!("missing key '{}'", key)))?;
    let n = match v {
        Value::Integer(n) => *n,
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| bad(format!("'{}' must be an integer", key)))?,
        _ => return Err(bad(format!("'{}' must be an integer", key))),
    };
    usize::try_from(n).map_err(|_| bad(format!("'{}' must be nonnegative", key)))
}

fn get_degree(t: &Table) -> Result<usize> {
    let k = get_usize(t, "k")?;
    if k == 0 || k > MAX_DEGREE {
        return Err(bad(format!("k must be in 1..={}", MAX_DEGREE)));
    }
    Ok(k)
}

fn index(s: &str, what: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| bad(format!("'{}' index '{}' is not an integer", what, s)))
}

fn real(v: &Value) -> Result<Real> {
    match v {
        Value::String(s) => s.parse(),
        Value::Integer(n) => Ok(Real::from_int(*n)),
        Value::Float(_) => Err(bad("write non-integer numbers as strings")),
        _ => Err(bad("expected a number")),
    }
}

fn integer(v: &Value) -> Result<BigInt> {
    match v {
        Value::Integer(n) => Ok(BigInt::from(*n)),
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| bad(format!("'{}' is not an integer", s))),
        _ => Err(bad("matrix entries must be integers")),
    }
}

fn real_list(v: &Value, key: &str) -> Result<Vec<Real>> {
    v.as_array()
        .ok_or_else(|| bad(format!("'{}' must be an array", key)))?
        .iter()
        .map(real)
        .collect()
}

fn monomial(t: &Value, nvars: usize, key: &str) -> Result<Monomial<Real>> {
    let t = t
        .as_table()
        .ok_or_else(|| bad(format!("'{}' terms must be tables {{ c, e }}", key)))?;
    if let Some(extra) = t.keys().find(|k| *k != "c" && *k != "e") {
        return Err(bad(format!("unknown key '{}' in '{}'", extra, key)));
    }
    let coeff = real(t.get("c").ok_or_else(|| bad(format!("'{}' term lacks 'c'", key)))?)?;
    let exps = t
        .get("e")
        .ok_or_else(|| bad(format!("'{}' term lacks 'e'", key)))?
        .as_array()
        .ok_or_else(|| bad("'e' must be an array"))?
        .iter()
        .map(|e| match e {
            Value::Integer(n) if (0..=MAX_DEGREE as i64).contains(n) => Ok(*n as u32),
            _ => Err(bad(format!("exponents must be integers in 0..={}", MAX_DEGREE))),
        })
        .collect::<Result<Vec<u32>>>()?;
    if exps.len() != nvars {
        return Err(bad(format!(
            "'{}' exponents must have length {}",
            key, nvars
        )));
    }
    Ok(Monomial { coeff, exps })
}
