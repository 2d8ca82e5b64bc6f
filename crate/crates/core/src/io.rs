// Copyright 2026 The tomoct Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON file formats.
//!
//! Matrices are `{"rows": R, "cols": C, "data": [[re, im], ...]}` in
//! row-major order. χ files add `"basis"`; Kraus files hold a list of such
//! matrices with their weights. All floats are written with 17 significant
//! digits, so every file reads back to bit-identical values.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::qpt::{KrausSet, ProcessMatrix};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.data.len() != j.rows * j.cols {
            return Err(Error::Parse(format!(
                "matrix declares {}x{} but has {} entries",
                j.rows,
                j.cols,
                j.data.len()
            )));
        }
        ComplexMatrix::from_vec(j.rows, j.cols, j.data.iter().map(|&[re, im]| C64::new(re, im)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiJson {
    pub basis: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausJson {
    pub weights: Vec<f64>,
    pub completeness_residual: f64,
    pub operators: Vec<MatrixJson>,
}

/// Compact JSON with every float printed as `{:.16e}`.
struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

fn check_finite(data: &[[f64; 2]]) -> Result<()> {
    if data.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries; refusing to write".into()));
    }
    Ok(())
}

/// Serializes `value`. Non-finite floats become `null`, so callers writing
/// matrices go through the checked helpers below.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Numeric(format!("cannot serialize: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("JSON is UTF-8"))
}

/// Parses JSON, reporting line and column on failure.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_json(value)?).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Result<String> {
    let j = MatrixJson::from(m);
    check_finite(&j.data)?;
    to_json(&j)
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    from_json::<MatrixJson>(text)?.try_into()
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    read_json::<MatrixJson>(path)?.try_into()
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    fs::write(path, matrix_to_json(m)?).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    DensityMatrix::new(read_matrix(path)?)
}

impl From<&ProcessMatrix> for ChiJson {
    fn from(chi: &ProcessMatrix) -> Self {
        let m = MatrixJson::from(chi.chi());
        Self {
            basis: chi.basis_tag().to_string(),
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

impl TryFrom<ChiJson> for ProcessMatrix {
    type Error = Error;

    fn try_from(j: ChiJson) -> Result<Self> {
        let m: ComplexMatrix = MatrixJson {
            rows: j.rows,
            cols: j.cols,
            data: j.data,
        }
        .try_into()?;
        ProcessMatrix::with_tag(&j.basis, m)
    }
}

pub fn read_chi(path: &Path) -> Result<ProcessMatrix> {
    read_json::<ChiJson>(path)?.try_into()
}

pub fn write_chi(path: &Path, chi: &ProcessMatrix) -> Result<()> {
    let j = ChiJson::from(chi);
    check_finite(&j.data)?;
    write_json(path, &j)
}

impl From<&KrausSet> for KrausJson {
    fn from(k: &KrausSet) -> Self {
        Self {
            weights: k.weights.clone(),
            completeness_residual: k.completeness_residual,
            operators: k.operators.iter().map(MatrixJson::from).collect(),
        }
    }
}

impl TryFrom<KrausJson> for KrausSet {
    type Error = Error;

    /// Weights and residual are recomputed from the operators.
    fn try_from(j: KrausJson) -> Result<Self> {
        let ops = j
            .operators
            .into_iter()
            .map(ComplexMatrix::try_from)
            .collect::<Result<Vec<_>>>()?;
        KrausSet::from_operators(ops)
    }
}

pub fn read_kraus(path: &Path) -> Result<KrausSet> {
    read_json::<KrausJson>(path)?.try_into()
}

pub fn write_kraus(path: &Path, k: &KrausSet) -> Result<()> {
    let j = KrausJson::from(k);
    for op in &j.operators {
        check_finite(&op.data)?;
    }
    write_json(path, &j)
}
