//! Decoherence-style states `Σ_k c_k|k⟩⊗|E_k⟩` with nearly orthogonal
//! environment states, their cross terms, and the tripartite
//! (system, apparatus, environment) orthogonality check.

use std::fmt;


use crate::error::{domain, Error, Result};
use crate::linalg;
use crate::hilbert::{kron_vec, HermitianOperator, PureState};
use crate::schmidt::decompose;
use crate::tolerance::Tolerances;
use crate::{CMatrix, CVector, C64};

/// Environments larger than this many qubits are refused.
pub const MAX_ENV_QUBITS: usize = 24;

/// System of `system_dim` branches coupled to `env_qubits` environment
/// qubits. Branch `k` rotates qubit `q` by `k·θ_q`, so
/// `|E_k⟩ = ⊗_q (cos(kθ_q)|0⟩ + sin(kθ_q)|1⟩)` and
/// `⟨E_j|E_k⟩ = ∏_q cos((k-j)·θ_q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceModel {
    pub system_dim: usize,
    pub env_qubits: usize,
    pub branch_coefficients: Vec<C64>,
    pub env_rotation_angles: Vec<f64>,
}

/// One term `c_k |ψ_k⟩⊗|E_k⟩` of a branch decomposition.
#[derive(Debug, Clone)]
pub struct Branch {
    pub coefficient: C64,
    pub system: CVector,
    pub environment: CVector,
}

impl DecoherenceModel {
    /// `branches` equal-weight branches with every qubit rotated by `theta`.
    pub fn uniform(branches: usize, env_qubits: usize, theta: f64) -> Self {
        let c = C64::new((branches as f64).sqrt().recip(), 0.0);
        Self {
            system_dim: branches,
            env_qubits,
            branch_coefficients: vec![c; branches],
            env_rotation_angles: vec![theta; env_qubits],
        }
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.system_dim == 0 {
            return domain("system dimension must be positive");
        }
        if self.branch_coefficients.len() != self.system_dim {
            return Err(Error::DimensionMismatch { expected: self.system_dim, found: self.branch_coefficients.len() });
        }
        if self.env_rotation_angles.len() != self.env_qubits {
            return Err(Error::DimensionMismatch { expected: self.env_qubits, found: self.env_rotation_angles.len() });
        }
        if self.env_qubits > MAX_ENV_QUBITS {
            return domain(format!("at most {MAX_ENV_QUBITS} environment qubits are supported"));
        }
        let norm_sq: f64 = self.branch_coefficients.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol.norm_tol {
            return Err(Error::NotNormalized { norm: norm_sq.sqrt(), tol: tol.norm_tol });
        }
        Ok(())
    }

    pub fn env_dim(&self) -> usize {
        1 << self.env_qubits
    }

    /// `|E_k⟩`.
    pub fn environment_state(&self, k: usize) -> CVector {
        self.env_rotation_angles.iter().fold(CVector::from_element(1, C64::new(1.0, 0.0)), |acc, &theta| {
            let angle = k as f64 * theta;
            let qubit = CVector::from_vec(vec![C64::new(angle.cos(), 0.0), C64::new(angle.sin(), 0.0)]);
            kron_vec(&acc, &qubit)
        })
    }

    /// The model's own branch list, `|ψ_k⟩ = |k⟩`.
    pub fn branches(&self) -> Vec<Branch> {
        (0..self.system_dim)
            .map(|k| {
                let mut system = CVector::zeros(self.system_dim);
                system[k] = C64::new(1.0, 0.0);
                Branch { coefficient: self.branch_coefficients[k], system, environment: self.environment_state(k) }
            })
            .collect()
    }
}

/// `Σ_k c_k |k⟩⊗|E_k⟩` with dims `[system_dim, 2^env_qubits]`.
pub fn generate_decohered_state(model: &DecoherenceModel, tol: &Tolerances) -> Result<PureState> {
    model.validate(tol)?;
    let env = model.env_dim();
    let mut amps = CVector::zeros(model.system_dim * env);
    for (k, c) in model.branch_coefficients.iter().enumerate() {
        let e = model.environment_state(k);
        for (i, v) in e.iter().enumerate() {
            amps[k * env + i] = c * v;
        }
    }
    PureState::normalized(vec![model.system_dim, env], amps)
}

#[derive(Debug, Clone)]
pub struct CrossTermReport {
    /// `⟨E_i|E_j⟩`.
    pub overlaps: CMatrix,
    /// `⟨ψ|A⊗I|ψ⟩`.
    pub total_expectation: f64,
    /// `Σ_k |c_k|² ⟨ψ_k|A|ψ_k⟩`.
    pub branch_expectation: f64,
    /// `|total_expectation - branch_expectation|`.
    pub cross_magnitude: f64,
    /// Largest violation of probability additivity over the spectral
    /// projectors `Q` of `A`: `|⟨ψ|Q⊗I|ψ⟩ - Σ_k |c_k|²⟨ψ_k|Q|ψ_k⟩|`.
    pub additivity_defect: f64,
    /// `2·Σ_{i<j} |c_i||c_j|·|⟨E_i|E_j⟩|·‖A‖`.
    pub overlap_bound: f64,
}

/// Compares total-state expectation values of `A⊗I` with branch-weighted
/// sums. The branch list must reconstruct `state` within `recon_tol`.
pub fn cross_term_report(state: &PureState, observable: &HermitianOperator, branches: &[Branch], tol: &Tolerances) -> Result<CrossTermReport> {
    state.require_factors(2)?;
    let (d1, d2) = (state.dims()[0], state.dims()[1]);
    if observable.dim() != d1 {
        return Err(Error::DimensionMismatch { expected: d1, found: observable.dim() });
    }
    let mut rebuilt = CVector::zeros(d1 * d2);
    let mut normalized = Vec::with_capacity(branches.len());
    for b in branches {
        if b.system.len() != d1 || b.environment.len() != d2 {
            return domain(format!(
                "branch vectors have dims ({}, {}) but the state is {d1}x{d2}",
                b.system.len(),
                b.environment.len()
            ));
        }
        let (sn, en) = (b.system.norm(), b.environment.norm());
        if !(sn > 0.0 && en > 0.0) {
            return domain("branch vectors must be nonzero");
        }
        let coefficient = b.coefficient * C64::new(sn * en, 0.0);
        let (system, environment) = (b.system.unscale(sn), b.environment.unscale(en));
        rebuilt += kron_vec(&system, &environment) * coefficient;
        normalized.push(Branch { coefficient, system, environment });
    }
    let residual = (&rebuilt - state.amplitudes()).norm();
    if residual > tol.recon_tol {
        return domain(format!("branches do not reconstruct the state: residual {residual:.3e}"));
    }

    let n = normalized.len();
    let overlaps = CMatrix::from_fn(n, n, |i, j| normalized[i].environment.dotc(&normalized[j].environment));
    let w1 = state.partial_trace(0)?;

    let split = |a: &CMatrix| {
        let total = (a * w1.matrix()).trace().re;
        let branch: f64 = normalized.iter().map(|b| b.coefficient.norm_sqr() * b.system.dotc(&(a * &b.system)).re).sum();
        (total, branch)
    };
    let (total_expectation, branch_expectation) = split(observable.matrix());

    let additivity_defect = observable
        .eigenspaces(tol.cluster_tol)
        .iter()
        .map(|e| {
            let (t, b) = split(&e.subspace.projector());
            (t - b).abs()
        })
        .fold(0.0, f64::max);

    let norm = observable.spectral_norm();
    let mut overlap_bound = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            overlap_bound += 2.0 * normalized[i].coefficient.norm() * normalized[j].coefficient.norm() * overlaps[(i, j)].norm() * norm;
        }
    }

    Ok(CrossTermReport {
        overlaps,
        total_expectation,
        branch_expectation,
        cross_magnitude: (total_expectation - branch_expectation).abs(),
        additivity_defect,
        overlap_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Triorthogonality {
    Holds,
    Fails,
    /// Degenerate system spectrum: the gauge freedom inside a cluster
    /// prevents a decision by this method.
    Indeterminate,
}

impl fmt::Display for Triorthogonality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Triorthogonality::Holds => "holds",
            Triorthogonality::Fails => "fails",
            Triorthogonality::Indeterminate => "indeterminate",
        })
    }
}

/// Decides whether a tripartite state has the form
/// `Σ_k a_k |s_k⟩|A_k⟩|ε_k⟩` with all three families orthonormal.
///
/// Splits `s` against `(A, ε)`; for a non-degenerate spectrum every right
/// Schmidt vector must be a product across `A:ε`, and the resulting
/// apparatus and environment families must be orthonormal.
pub fn triorthogonal_check(state: &PureState, tol: &Tolerances) -> Result<Triorthogonality> {
    state.require_factors(3)?;
    let (ds, da, de) = (state.dims()[0], state.dims()[1], state.dims()[2]);
    let sd = decompose(&state.regrouped(vec![ds, da * de])?, tol)?;
    if !sd.is_non_degenerate() {
        return Ok(Triorthogonality::Indeterminate);
    }

    let mut apparatus = Vec::new();
    let mut environment = Vec::new();
    for (_, _, right) in sd.terms() {
        let m = CMatrix::from_fn(da, de, |i, j| right[i * de + j]);
        let svd = linalg::svd(&m);
        let s = &svd.singular_values;
        if s.len() > 1 && s[1] > tol.rank_tol * s[0] {
            return Ok(Triorthogonality::Fails);
        }
        apparatus.push(svd.u.column(0).into_owned());
        environment.push(svd.v.column(0).map(|z| z.conj()));
    }

    let orthonormal = |vs: &[CVector]| {
        vs.iter().enumerate().all(|(i, a)| {
            vs.iter().enumerate().all(|(j, b)| {
                let target = if i == j { 1.0 } else { 0.0 };
                (a.dotc(b) - C64::new(target, 0.0)).norm() <= tol.ortho_tol.max(1e-9)
            })
        })
    };
    if orthonormal(&apparatus) && orthonormal(&environment) {
        Ok(Triorthogonality::Holds)
    } else {
        Ok(Triorthogonality::Fails)
    }
}
