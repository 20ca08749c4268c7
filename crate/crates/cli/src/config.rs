//! Config files and flag merging.
//!
//! A config file is TOML with optional run-wide keys at the top and one table
//! per subcommand:
//!
//! ```toml
//! seed = "7"
//! threads = "4"
//!
//! [weyl]
//! seq = "mobius"
//! nmax = "100000"
//! degree = "2"
//! checkpoints = ["10000", "100000"]
//! ```
//!
//! Values are strings. TOML integers and booleans are accepted and turned
//! into their decimal text; floats are rejected so no number passes through
//! binary rounding before it reaches the exact parsers. Arrays become
//! comma-separated text and arrays of arrays become `;`-separated rows.
//! Flags given on the command line override the file.

use std::path::Path;
use std::str::FromStr;

use num_rational::BigRational;
use osclab::real::{parse_rational, rational_to_f64, Real};
use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Lib(#[from] osclab::Error),
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Keys allowed at the top level besides the subcommand tables.
const RUN_KEYS: [&str; 5] = ["seed", "threads", "precision_ceiling", "allow_skip", "out"];

/// Run-wide settings read from the top of a config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunSettings {
    pub seed: Option<String>,
    pub threads: Option<String>,
    pub precision_ceiling: Option<String>,
    pub allow_skip: Option<String>,
    pub out: Option<String>,
}

/// A parsed config file: run-wide settings and normalized subcommand tables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub run: RunSettings,
    pub sections: Table,
}

fn scalar_text(key: &str, v: &Value) -> CliResult<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Boolean(b) => Ok(b.to_string()),
        Value::Float(_) => Err(config_err(format!(
            "'{key}': floats are not accepted, write the number as a string"
        ))),
        Value::Datetime(_) => Err(config_err(format!("'{key}': dates are not accepted"))),
        Value::Array(_) | Value::Table(_) => Err(config_err(format!("'{key}': nested value not accepted here"))),
    }
}

/// Flattens one value to text.
fn normalize(key: &str, v: &Value) -> CliResult<String> {
    match v {
        Value::Array(items) if items.iter().all(|i| i.is_array()) => items
            .iter()
            .map(|row| normalize(key, row))
            .collect::<CliResult<Vec<_>>>()
            .map(|rows| rows.join(";")),
        Value::Array(items) => items
            .iter()
            .map(|i| scalar_text(key, i))
            .collect::<CliResult<Vec<_>>>()
            .map(|xs| xs.join(",")),
        _ => scalar_text(key, v),
    }
}

fn normalize_table(name: &str, t: &Table) -> CliResult<Table> {
    t.iter()
        .map(|(k, v)| Ok((k.clone(), Value::String(normalize(&format!("{name}.{k}"), v)?))))
        .collect()
}

pub fn parse_config(text: &str) -> CliResult<ConfigFile> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| config_err(e.message().to_string()))?;
    let mut cfg = ConfigFile::default();
    for (k, v) in &table {
        if RUN_KEYS.contains(&k.as_str()) {
            let s = Some(normalize(k, v)?);
            match k.as_str() {
                "seed" => cfg.run.seed = s,
                "threads" => cfg.run.threads = s,
                "precision_ceiling" => cfg.run.precision_ceiling = s,
                "allow_skip" => cfg.run.allow_skip = s,
                _ => cfg.run.out = s,
            }
        } else if let Value::Table(t) = v {
            if !crate::COMMAND_NAMES.contains(&k.as_str()) {
                return Err(config_err(format!("unknown section [{k}]")));
            }
            cfg.sections.insert(k.clone(), Value::Table(normalize_table(k, t)?));
        } else {
            return Err(config_err(format!("unknown key '{k}'")));
        }
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> CliResult<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

/// Overlays the flags given on the command line onto the file section and
/// deserializes the result, rejecting unknown keys.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, section: Option<&Value>) -> CliResult<(T, Table)> {
    let mut table = match section {
        Some(Value::Table(t)) => t.clone(),
        Some(_) => return Err(config_err("subcommand section must be a table")),
        None => Table::new(),
    };
    let given = Table::try_from(flags).map_err(|e| config_err(e.to_string()))?;
    for (k, v) in given {
        table.insert(k, v);
    }
    let merged = T::deserialize(table.clone()).map_err(|e| config_err(e.to_string()))?;
    Ok((merged, table))
}

/// Checks that a section deserializes as `T`.
pub fn check_section<T: DeserializeOwned>(name: &str, v: &Value) -> CliResult<()> {
    T::deserialize(v.clone())
        .map(|_| ())
        .map_err(|e| config_err(format!("[{name}]: {e}")))
}

pub fn required<'a>(v: &'a Option<String>, key: &str) -> CliResult<&'a str> {
    v.as_deref().ok_or_else(|| config_err(format!("missing '{key}'")))
}

pub fn parse_int<T: FromStr>(s: &str, key: &str) -> CliResult<T> {
    s.trim()
        .parse()
        .map_err(|_| config_err(format!("'{key}': expected an integer, got '{s}'")))
}

pub fn int_or<T: FromStr>(v: &Option<String>, key: &str, default: T) -> CliResult<T> {
    v.as_deref().map_or(Ok(default), |s| parse_int(s, key))
}

pub fn req_int<T: FromStr>(v: &Option<String>, key: &str) -> CliResult<T> {
    parse_int(required(v, key)?, key)
}

pub fn bool_or(v: &Option<String>, key: &str, default: bool) -> CliResult<bool> {
    match v.as_deref().map(str::trim) {
        None => Ok(default),
        Some("true") => Ok(true),
        Some("false") => Ok(false),
        Some(s) => Err(config_err(format!("'{key}': expected true or false, got '{s}'"))),
    }
}

pub fn rational(s: &str, key: &str) -> CliResult<BigRational> {
    parse_rational(s.trim()).map_err(|e| config_err(format!("'{key}': {e}")))
}

pub fn real(s: &str, key: &str) -> CliResult<Real> {
    s.trim().parse().map_err(|e| config_err(format!("'{key}': {e}")))
}

/// A decimal or `p/q` threshold, rounded once to `f64`.
pub fn number(s: &str, key: &str) -> CliResult<f64> {
    let v = rational_to_f64(&rational(s, key)?);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(format!("'{key}': value out of range")))
    }
}

pub fn number_or(v: &Option<String>, key: &str, default: f64) -> CliResult<f64> {
    v.as_deref().map_or(Ok(default), |s| number(s, key))
}

pub fn split_list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

pub fn int_list<T: FromStr>(s: &str, key: &str) -> CliResult<Vec<T>> {
    split_list(s).into_iter().map(|t| parse_int(t, key)).collect()
}

pub fn rational_list(s: &str, key: &str) -> CliResult<Vec<BigRational>> {
    split_list(s).into_iter().map(|t| rational(t, key)).collect()
}

pub fn real_list(s: &str, key: &str) -> CliResult<Vec<Real>> {
    split_list(s).into_iter().map(|t| real(t, key)).collect()
}

/// Checkpoints from `checkpoints`, defaulting to the single value `nmax`.
pub fn checkpoints(v: &Option<String>, nmax: u64) -> CliResult<Vec<u64>> {
    let cps = match v {
        Some(s) => int_list(s, "checkpoints")?,
        None => vec![nmax],
    };
    if cps.is_empty() || cps.windows(2).any(|w| w[0] >= w[1]) || cps[0] == 0 {
        return Err(config_err("'checkpoints' must be positive and strictly increasing"));
    }
    if *cps.last().expect("nonempty") > nmax {
        return Err(config_err(format!("'checkpoints' exceed nmax = {nmax}")));
    }
    Ok(cps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Default, PartialEq, Serialize, serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Demo {
        #[serde(skip_serializing_if = "Option::is_none")]
        nmax: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        seq: Option<String>,
    }

    #[test]
    fn normalizes_values() {
        let c = parse_config(
            "seed = 7\n[weyl]\nnmax = 100\ncheckpoints = [\"10\", 100]\nstructured = false\n[triangularize]\nmatrix = [[1, 0], [1, 1]]\n",
        )
        .unwrap();
        assert_eq!(c.run.seed.as_deref(), Some("7"));
        let w = c.sections["weyl"].as_table().unwrap();
        assert_eq!(w["nmax"].as_str(), Some("100"));
        assert_eq!(w["checkpoints"].as_str(), Some("10,100"));
        assert_eq!(w["structured"].as_str(), Some("false"));
        assert_eq!(c.sections["triangularize"]["matrix"].as_str(), Some("1,0;1,1"));
    }

    #[test]
    fn rejects_floats_and_unknown_keys() {
        assert!(parse_config("[weyl]\nthreshold = 0.02\n").is_err());
        assert!(parse_config("bogus = \"1\"\n").is_err());
        assert!(parse_config("[nosuch]\nx = \"1\"\n").is_err());
        let c = parse_config("[weyl]\nnmax = \"5\"\ntypo = \"1\"\n").unwrap();
        assert!(merge(&Demo::default(), c.sections.get("weyl")).is_err());
    }

    #[test]
    fn flags_override_file() {
        let c = parse_config("[weyl]\nnmax = \"5\"\nseq = \"one\"\n").unwrap();
        let flags = Demo {
            nmax: Some("9".into()),
            seq: None,
        };
        let (m, _) = merge(&flags, c.sections.get("weyl")).unwrap();
        assert_eq!(m.nmax.as_deref(), Some("9"));
        assert_eq!(m.seq.as_deref(), Some("one"));
    }

    #[test]
    fn scalar_parsers() {
        assert_eq!(number("1/4", "t").unwrap(), 0.25);
        assert_eq!(number("0.02", "t").unwrap(), 0.02);
        assert!(number("abc", "t").is_err());
        assert_eq!(checkpoints(&None, 10).unwrap(), vec![10]);
        assert!(checkpoints(&Some("5,5".into()), 10).is_err());
        assert!(checkpoints(&Some("5,20".into()), 10).is_err());
        assert!(bool_or(&Some("yes".into()), "b", false).is_err());
    }
}
