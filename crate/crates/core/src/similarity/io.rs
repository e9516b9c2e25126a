//! Matrix export: full-square CSV and a compact upper-triangle binary.
//!
//! The binary holds the strict upper triangle (i < j) in row-major order as
//! little-endian `f64`; the diagonal is zero by construction and omitted.
//! A JSON sidecar records `n`, the row ids and the SHA-256 of the binary.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::matrix::SymMatrix;
use crate::checksum::sha256_hex;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const BINARY_LAYOUT: &str = "upper_triangle_row_major_f64_le";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSidecar {
    pub n: usize,
    pub ids: Vec<String>,
    pub checksum: String,
    pub layout: String,
}

pub fn write_matrix_csv<T: Scalar, W: Write>(ids: &[String], m: &SymMatrix<T>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id".to_string()];
    header.extend(ids.iter().cloned());
    w.write_record(&header)?;
    for (i, id) in ids.iter().enumerate() {
        let mut rec = vec![id.clone()];
        rec.extend(m.row(i).iter().map(|v| format!("{:?}", v.to_f64_lossy())));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn encode_upper_triangle<T: Scalar>(m: &SymMatrix<T>) -> Vec<u8> {
    let n = m.n();
    let mut bytes = Vec::with_capacity(n * n.saturating_sub(1) / 2 * 8);
    for v in m.upper_triangle() {
        bytes.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
    }
    bytes
}

pub fn decode_upper_triangle(n: usize, bytes: &[u8]) -> Result<SymMatrix<f64>> {
    let expected = n * n.saturating_sub(1) / 2 * 8;
    if bytes.len() != expected {
        return Err(Error::MalformedArtifact(format!("binary matrix has {} bytes, expected {expected}", bytes.len())));
    }
    let mut m = SymMatrix::zeros(n);
    let mut chunks = bytes.chunks_exact(8);
    for i in 0..n {
        for j in i + 1..n {
            let c = chunks.next().expect("length checked");
            m.set(i, j, f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
        }
    }
    Ok(m)
}

pub fn sidecar_path(bin: &Path) -> PathBuf {
    bin.with_extension("json")
}

/// Writes `<path>` and its sidecar `<path minus extension>.json`.
pub fn write_binary<T: Scalar>(path: &Path, ids: &[String], m: &SymMatrix<T>) -> Result<MatrixSidecar> {
    if ids.len() != m.n() {
        return Err(Error::LengthMismatch { expected: m.n(), found: ids.len() });
    }
    let bytes = encode_upper_triangle(m);
    std::fs::write(path, &bytes).map_err(|e| Error::io(path, e))?;
    let sidecar =
        MatrixSidecar { n: m.n(), ids: ids.to_vec(), checksum: sha256_hex(&bytes), layout: BINARY_LAYOUT.to_string() };
    let side = sidecar_path(path);
    let text = serde_json::to_string_pretty(&sidecar)?;
    std::fs::write(&side, text).map_err(|e| Error::io(&side, e))?;
    Ok(sidecar)
}

/// Reads a binary matrix, verifying its checksum against the sidecar.
pub fn read_binary(path: &Path) -> Result<(Vec<String>, SymMatrix<f64>)> {
    let side = sidecar_path(path);
    let text = std::fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let sidecar: MatrixSidecar = serde_json::from_str(&text)?;
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if sha256_hex(&bytes) != sidecar.checksum {
        return Err(Error::ChecksumMismatch(path.display().to_string()));
    }
    if sidecar.ids.len() != sidecar.n {
        return Err(Error::MalformedArtifact(side.display().to_string()));
    }
    Ok((sidecar.ids, decode_upper_triangle(sidecar.n, &bytes)?))
}
