//! JSON interchange: state and observable files, and the report documents
//! emitted by the command-line tool.
//!
//! Complex numbers are `[re, im]` pairs; matrices are lists of rows.
//! Composite amplitude indices are row-major over the factors.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decoherence::{CrossTermReport, Triorthogonality};
use crate::error::{Error, Result};
use crate::hilbert::{HermitianOperator, PureState};
use crate::lattice::{AtomLabel, DefiniteLattice, LatticeScope};
use crate::measure::BornMeasure;
use crate::schmidt::SchmidtDecomposition;
use crate::stability::SweepPoint;
use crate::{CMatrix, CVector, C64};

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

fn to_json(z: &C64) -> JsonComplex {
    [z.re, z.im]
}

fn from_json(z: &JsonComplex) -> C64 {
    C64::new(z[0], z[1])
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| to_json(&m[(i, j)])).collect()).collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMatrix> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(Error::Format(format!("row {i} has {} entries, expected {cols}", r.len())));
    }
    Ok(CMatrix::from_fn(n, cols, |i, j| from_json(&rows[i][j])))
}

pub fn vector_to_json(v: &CVector) -> Vec<JsonComplex> {
    v.iter().map(to_json).collect()
}

/// `{"dims": [...], "amplitudes": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub amplitudes: Vec<JsonComplex>,
}

impl StateFile {
    pub fn from_state(state: &PureState) -> Self {
        Self { dims: state.dims().to_vec(), amplitudes: vector_to_json(state.amplitudes()) }
    }

    /// Validates the normalization invariant.
    pub fn into_state(self, norm_tol: f64) -> Result<PureState> {
        let amps = CVector::from_iterator(self.amplitudes.len(), self.amplitudes.iter().map(from_json));
        PureState::new(self.dims, amps, norm_tol)
    }
}

/// `{"dim": n, "matrix": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub matrix: JsonMatrix,
}

impl MatrixFile {
    pub fn from_operator(op: &HermitianOperator) -> Self {
        Self { dim: op.dim(), matrix: matrix_to_json(op.matrix()) }
    }

    pub fn into_operator(self, herm_tol: f64) -> Result<HermitianOperator> {
        let m = matrix_from_json(&self.matrix)?;
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::Format(format!("declared dim {} but matrix is {}x{}", self.dim, m.nrows(), m.ncols())));
        }
        HermitianOperator::new(m, herm_tol)
    }
}

pub fn parse_state(text: &str, norm_tol: f64) -> Result<PureState> {
    serde_json::from_str::<StateFile>(text)?.into_state(norm_tol)
}

pub fn read_state(path: &Path, norm_tol: f64) -> Result<PureState> {
    parse_state(&std::fs::read_to_string(path)?, norm_tol)
}

pub fn parse_observable(text: &str, herm_tol: f64) -> Result<HermitianOperator> {
    serde_json::from_str::<MatrixFile>(text)?.into_operator(herm_tol)
}

pub fn read_observable(path: &Path, herm_tol: f64) -> Result<HermitianOperator> {
    parse_observable(&std::fs::read_to_string(path)?, herm_tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub weight: f64,
    pub multiplicity: usize,
    pub coefficients: Vec<JsonComplex>,
    pub left_basis: JsonMatrix,
    pub right_basis: JsonMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub left_dim: usize,
    pub right_dim: usize,
    pub cluster_tol: f64,
    pub schmidt_rank: usize,
    pub clusters: Vec<ClusterReport>,
}

impl From<&SchmidtDecomposition> for DecompositionReport {
    fn from(sd: &SchmidtDecomposition) -> Self {
        Self {
            left_dim: sd.left_dim,
            right_dim: sd.right_dim,
            cluster_tol: sd.cluster_tol,
            schmidt_rank: sd.schmidt_rank(),
            clusters: sd
                .clusters
                .iter()
                .map(|c| ClusterReport {
                    weight: c.weight,
                    multiplicity: c.multiplicity,
                    coefficients: vector_to_json(&c.coefficients),
                    left_basis: matrix_to_json(c.left_basis.basis()),
                    right_basis: matrix_to_json(c.right_basis.basis()),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomReport {
    pub label: String,
    pub kind: String,
    pub eigenspace: usize,
    pub dimension: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeReport {
    pub scope: String,
    pub ambient_dim: usize,
    pub atoms: Vec<AtomReport>,
}

impl From<&DefiniteLattice> for LatticeReport {
    fn from(lat: &DefiniteLattice) -> Self {
        let scope = match lat.scope() {
            LatticeScope::Whole => "whole".to_string(),
            LatticeScope::LeftFactor { .. } => "left_factor".to_string(),
        };
        let atoms = lat
            .atoms()
            .iter()
            .enumerate()
            .map(|(k, a)| AtomReport {
                label: lat.atom_name(k),
                kind: match a.label {
                    AtomLabel::PsiProjection(_) => "psi_projection",
                    AtomLabel::ComplementInEigenspace(_) => "complement_in_eigenspace",
                    AtomLabel::WholeEigenspace(_) => "whole_eigenspace",
                }
                .to_string(),
                eigenspace: a.label.eigenspace(),
                dimension: a.subspace.rank(),
                weight: a.weight,
            })
            .collect();
        Self { scope, ambient_dim: lat.ambient_dim(), atoms }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub label: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BornReport {
    pub atoms: Vec<WeightEntry>,
}

impl BornReport {
    pub fn new(lat: &DefiniteLattice, measure: &BornMeasure) -> Self {
        let atoms = measure
            .atom_weights
            .iter()
            .enumerate()
            .map(|(k, &weight)| WeightEntry { label: lat.atom_name(k), weight })
            .collect();
        Self { atoms }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountEntry {
    pub label: String,
    pub weight: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub n: u64,
    pub seed: u64,
    pub atoms: Vec<CountEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTermJson {
    pub overlaps: JsonMatrix,
    pub total_expectation: f64,
    pub branch_expectation: f64,
    pub cross_magnitude: f64,
    pub additivity_defect: f64,
    pub overlap_bound: f64,
}

impl From<&CrossTermReport> for CrossTermJson {
    fn from(r: &CrossTermReport) -> Self {
        Self {
            overlaps: matrix_to_json(&r.overlaps),
            total_expectation: r.total_expectation,
            branch_expectation: r.branch_expectation,
            cross_magnitude: r.cross_magnitude,
            additivity_defect: r.additivity_defect,
            overlap_bound: r.overlap_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriorthoReport {
    pub result: String,
}

impl From<Triorthogonality> for TriorthoReport {
    fn from(t: Triorthogonality) -> Self {
        Self { result: t.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub gap: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub delta: f64,
    pub generator: String,
    pub trials: usize,
    pub points: Vec<SweepEntry>,
}

impl StabilityReport {
    pub fn new(delta: f64, generator: String, trials: usize, points: &[SweepPoint]) -> Self {
        Self { delta, generator, trials, points: points.iter().map(|p| SweepEntry { gap: p.gap, angle: p.mean_angle }).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvarianceReport {
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    pub max_invariance_defect: f64,
    pub max_unitarity_defect: f64,
    pub max_row_sum_defect: f64,
    pub contract: f64,
    pub pass: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_loader_names_the_norm() {
        let err = parse_state(r#"{"dims":[2],"amplitudes":[[1,0],[1,0]]}"#, 1e-10).unwrap_err();
        assert!(err.to_string().contains("1.41421356237309"), "{err}");
    }

    #[test]
    fn state_loader_checks_length() {
        assert!(parse_state(r#"{"dims":[2,2],"amplitudes":[[1,0]]}"#, 1e-10).is_err());
        assert!(parse_state(r#"{"dims":[2],"amplitudes":[[1,0],[0,0]],"extra":1}"#, 1e-10).is_err());
    }

    #[test]
    fn observable_must_be_hermitian_and_square() {
        assert!(parse_observable(r#"{"dim":2,"matrix":[[[0,0],[1,0]],[[0,0],[0,0]]]}"#, 1e-10).is_err());
        assert!(parse_observable(r#"{"dim":2,"matrix":[[[1,0]]]}"#, 1e-10).is_err());
        let x = parse_observable(r#"{"dim":2,"matrix":[[[0,0],[1,0]],[[1,0],[0,0]]]}"#, 1e-10).unwrap();
        assert_eq!(x.dim(), 2);
    }
}
