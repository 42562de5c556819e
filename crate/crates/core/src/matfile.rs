//! Matrix files: JSON documents `{"dim": n, "rows": [[..], ..]}`.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::symmetric::SymmetricMatrix;

/// Largest dimension accepted from a file.
pub const MAX_FILE_DIM: usize = 1024;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

/// A matrix read from text, symmetrized, with the Frobenius norm of the
/// antisymmetric part `(M − Mᵀ)/2` that was discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub matrix: SymmetricMatrix,
    pub asymmetry: f64,
}

pub fn parse_matrix(text: &str) -> Result<MatrixFile> {
    let raw: RawMatrix =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix file: {e}")))?;
    let n = raw.dim;
    if n == 0 || n > MAX_FILE_DIM {
        return Err(Error::Shape(format!("dim {n} outside 1..={MAX_FILE_DIM}")));
    }
    if raw.rows.len() != n {
        return Err(Error::Shape(format!("dim {n} but {} rows", raw.rows.len())));
    }
    if let Some(r) = raw.rows.iter().find(|r| r.len() != n) {
        return Err(Error::Shape(format!("dim {n} but a row has {} entries", r.len())));
    }
    let m = DMatrix::from_fn(n, n, |i, j| raw.rows[i][j]);
    let asymmetry = ((&m - m.transpose()) * 0.5).norm();
    let matrix = SymmetricMatrix::new(m)?;
    Ok(MatrixFile { matrix, asymmetry })
}

pub fn read_matrix(path: &Path) -> Result<MatrixFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix(&text)
}

pub fn format_matrix(m: &SymmetricMatrix) -> String {
    serde_json::to_string_pretty(m).expect("matrix serializes")
}

pub fn write_matrix(path: &Path, m: &SymmetricMatrix) -> Result<()> {
    fs::write(path, format_matrix(m) + "\n")
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}
