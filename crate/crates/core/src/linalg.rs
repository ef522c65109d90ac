//! Hermitian eigendecomposition and SVD of dense complex matrices, backed
//! by faer. Results are returned as nalgebra matrices, sorted descending.

use faer::{c64, Mat, MatRef, Side};

use crate::{CMatrix, C64};

fn to_faer(m: &CMatrix) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        c64::new(z.re, z.im)
    })
}

fn from_faer(m: MatRef<'_, c64>, columns: &[usize]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), columns.len(), |i, j| {
        let z = m[(i, columns[j])];
        C64::new(z.re, z.im)
    })
}

fn descending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Eigendecomposition of a Hermitian matrix (only the lower triangle is
/// read).
pub fn eigh(h: &CMatrix) -> Eigh {
    let n = h.nrows();
    if n == 0 {
        return Eigh { values: Vec::new(), vectors: CMatrix::zeros(0, 0) };
    }
    let evd = to_faer(h).self_adjoint_eigen(Side::Lower).expect("Hermitian eigensolver converges");
    let s = evd.S().column_vector();
    let raw: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    let order = descending(&raw);
    Eigh { values: order.iter().map(|&k| raw[k]).collect(), vectors: from_faer(evd.U(), &order) }
}

/// Thin SVD `M = U·diag(σ)·Vᴴ` with `k = min(rows, cols)` columns in `U`
/// and `V`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(m: &CMatrix) -> Svd {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Svd { u: CMatrix::zeros(r, 0), singular_values: Vec::new(), v: CMatrix::zeros(c, 0) };
    }
    let dec = to_faer(m).thin_svd().expect("SVD converges");
    let s = dec.S().column_vector();
    let raw: Vec<f64> = (0..s.nrows()).map(|i| s[i].re).collect();
    let order = descending(&raw);
    Svd { u: from_faer(dec.U(), &order), singular_values: order.iter().map(|&k| raw[k]).collect(), v: from_faer(dec.V(), &order) }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s = to_faer(m).singular_values().expect("SVD converges");
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
