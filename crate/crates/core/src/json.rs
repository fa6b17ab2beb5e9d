//! Serde adapters. Complex numbers travel as `[re, im]`; a bare number is
//! accepted on input as a real value. Matrices are row-major arrays of rows.

use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::C64;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Pair([f64; 2]),
    Real(f64),
}

impl From<Repr> for C64 {
    fn from(r: Repr) -> Self {
        match r {
            Repr::Pair([re, im]) => C64::new(re, im),
            Repr::Real(re) => C64::new(re, 0.0),
        }
    }
}

/// Wrapper giving a complex number the `[re, im]` encoding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsonComplex(pub C64);

impl Serialize for JsonComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for JsonComplex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(JsonComplex(Repr::deserialize(d)?.into()))
    }
}

pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        JsonComplex(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        Ok(JsonComplex::deserialize(d)?.0)
    }
}

pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let w: Vec<JsonComplex> = v.iter().map(|&z| JsonComplex(z)).collect();
        w.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let w: Vec<JsonComplex> = Vec::deserialize(d)?;
        Ok(w.into_iter().map(|z| z.0).collect())
    }
}

/// Row-major rows of a complex matrix.
pub fn matrix_to_rows(m: &DMatrix<C64>) -> Vec<Vec<JsonComplex>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| JsonComplex(m[(i, j)])).collect())
        .collect()
}

pub fn rows_to_matrix(rows: Vec<Vec<JsonComplex>>) -> Result<DMatrix<C64>, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err("ragged matrix rows".into());
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j].0))
}

pub mod complex_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &DMatrix<C64>, s: S) -> Result<S::Ok, S::Error> {
        matrix_to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<C64>, D::Error> {
        let rows: Vec<Vec<JsonComplex>> = Vec::deserialize(d)?;
        rows_to_matrix(rows).map_err(D::Error::custom)
    }
}

pub mod real_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(D::Error::custom("ragged matrix rows"));
        }
        Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }
}
