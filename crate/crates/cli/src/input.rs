//! Parsing of JSON-valued flags.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use shiftspace::json::{self, JsonComplex};
use shiftspace::kernels::{matrix_fn, MatrixFn};
use shiftspace::polyrat::{Poly, RationalFn};
use shiftspace::resolvent::{ClosureFn, SharedFn, VectorPoly};
use shiftspace::symmat::SignatureMatrix;
use shiftspace::C64;

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(shiftspace::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(e) => write!(f, "error: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<shiftspace::Error> for CliError {
    fn from(e: shiftspace::Error) -> Self {
        CliError::Compute(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Reads a flag value as inline JSON, `@path`, or a path to an existing file.
pub fn parse<T: DeserializeOwned>(flag: &str, raw: &str) -> CliResult<T> {
    let text = if let Some(path) = raw.strip_prefix('@') {
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("--{flag}: cannot read {path}: {e}")))?
    } else if serde_json::from_str::<serde_json::Value>(raw).is_err() && Path::new(raw).is_file() {
        std::fs::read_to_string(raw).map_err(|e| CliError::Usage(format!("--{flag}: cannot read {raw}: {e}")))?
    } else {
        raw.to_string()
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

pub fn required<'a>(flag: &str, v: &'a Option<String>) -> CliResult<&'a str> {
    v.as_deref().ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

pub fn complex(flag: &str, raw: &str) -> CliResult<C64> {
    Ok(parse::<JsonComplex>(flag, raw)?.0)
}

pub fn complex_list(flag: &str, raw: &str) -> CliResult<Vec<C64>> {
    Ok(parse::<Vec<JsonComplex>>(flag, raw)?.into_iter().map(|z| z.0).collect())
}

pub fn value_matrix(flag: &str, v: Vec<Vec<JsonComplex>>) -> CliResult<DMatrix<C64>> {
    json::rows_to_matrix(v).map_err(|e| CliError::Usage(format!("{flag}: {e}")))
}

pub fn rational(raw: &str) -> CliResult<RationalFn> {
    parse("r", raw)
}

/// `identity`, `identity:<s>`, `diag:[..]`, or a real matrix.
pub fn signature(raw: &str) -> CliResult<SignatureMatrix> {
    let bad = |m: String| CliError::Usage(format!("--j: {m}"));
    if raw == "identity" {
        return Ok(SignatureMatrix::identity(1));
    }
    if let Some(s) = raw.strip_prefix("identity:") {
        let s: usize = s.parse().map_err(|_| bad(format!("bad size {s}")))?;
        if s == 0 {
            return Err(bad("size must be positive".into()));
        }
        return Ok(SignatureMatrix::identity(s));
    }
    if let Some(d) = raw.strip_prefix("diag:") {
        let signs: Vec<f64> = parse("j", d)?;
        return SignatureMatrix::diag(&signs).map_err(|e| bad(e.to_string()));
    }
    let rows: Vec<Vec<f64>> = parse("j", raw)?;
    let m = json_real(rows).map_err(bad)?;
    SignatureMatrix::new(m).map_err(|e| bad(e.to_string()))
}

fn json_real(rows: Vec<Vec<f64>>) -> Result<DMatrix<f64>, String> {
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err("ragged matrix rows".into());
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Function inputs: `{"poly":[..]}`, `{"rational":{"p":..,"q":..}}`,
/// `{"vector":[[..],..]}` or `{"exp":a}` for `e^{a z}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum FnSpec {
    Poly(Poly),
    Rational(RationalFn),
    Vector(Vec<Poly>),
    Exp(JsonComplex),
}

impl FnSpec {
    pub fn build(&self) -> SharedFn {
        match self {
            FnSpec::Poly(p) => Arc::new(p.clone()),
            FnSpec::Rational(r) => Arc::new(r.clone()),
            FnSpec::Vector(v) => Arc::new(VectorPoly(v.clone())),
            FnSpec::Exp(a) => {
                let a = a.0;
                Arc::new(ClosureFn::scalar(move |z| (a * z).exp()).with_derivative(move |z| vec![a * (a * z).exp()]))
            }
        }
    }
}

/// Entry `p/q` of a matrix function; `q` defaults to 1 and need not be coprime to `p`.
#[derive(Clone, Debug, Deserialize)]
pub struct Entry {
    p: Poly,
    #[serde(default = "Poly::one")]
    q: Poly,
}

/// A matrix of rational entries as a [`MatrixFn`].
pub fn rational_matrix(name: &str, rows: Vec<Vec<Entry>>) -> CliResult<MatrixFn> {
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(CliError::Usage(format!("{name}: need a nonempty rectangular matrix")));
    }
    Ok(matrix_fn(move |l| {
        let mut out = DMatrix::zeros(rows.len(), ncols);
        for (i, row) in rows.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let q = e.q.eval(l);
                if q.norm() == 0.0 {
                    return Err(shiftspace::Error::PoleOfR { z: l });
                }
                out[(i, j)] = e.p.eval(l) / q;
            }
        }
        Ok(out)
    }))
}
