//! Compensating unitaries inside degeneracy subspaces.
//!
//! For a flat component `|ω⟩ = Σ_j N^{-1/2} e^{iφ_j}|α_j⟩⊗|β_j⟩`, any unitary
//! `U_I` on `span{α_j}` is undone by the unitary `U_II` on `span{β_j}` with
//! matrix elements `⟨β_k|U_II|β_l⟩ = conj(⟨α_k|U_I|α_l⟩)·e^{i(φ_k - φ_l)}`.

use crate::error::{domain, Error, Result};
use crate::hilbert::{kron, max_abs, unitarity_defect, PureState, Subspace};
use crate::measure::same_modal_content;
use crate::schmidt::decompose;
use crate::tolerance::Tolerances;
use crate::{CMatrix, C64};

/// Matrix elements of `U_II` in the `β` basis, given `U_I` in the `α` basis.
pub fn compensator(u1: &CMatrix, phases: &[f64], tol: &Tolerances) -> Result<CMatrix> {
    let n = u1.nrows();
    let defect = unitarity_defect(u1)?;
    if !(defect <= tol.ortho_tol) {
        return Err(Error::NotUnitary { defect, tol: tol.ortho_tol });
    }
    if phases.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: phases.len() });
    }
    Ok(CMatrix::from_fn(n, n, |k, l| u1[(k, l)].conj() * C64::from_polar(1.0, phases[k] - phases[l])))
}

/// The mirror construction: recovers a side-I unitary from a side-II one.
/// The invariance condition `U₁ D U₂ᵀ = D` is symmetric in the two sides
/// because `D` is diagonal, so the same map applies.
pub fn reverse_compensator(u2: &CMatrix, phases: &[f64], tol: &Tolerances) -> Result<CMatrix> {
    compensator(u2, phases, tol)
}

/// `|N^{-1} Σ_{i,j} |⟨α_i|U|α_j⟩|² - 1|`.
pub fn row_sum_identity_defect(u1: &CMatrix) -> f64 {
    let n = u1.nrows() as f64;
    (u1.iter().map(|z| z.norm_sqr()).sum::<f64>() / n - 1.0).abs()
}

#[derive(Debug, Clone)]
pub struct EnvariancePair {
    pub u1: CMatrix,
    pub u2: CMatrix,
    pub phases: Vec<f64>,
}

impl EnvariancePair {
    pub fn new(u1: CMatrix, phases: Vec<f64>, tol: &Tolerances) -> Result<Self> {
        let u2 = compensator(&u1, &phases, tol)?;
        Ok(Self { u1, u2, phases })
    }

    pub fn dim(&self) -> usize {
        self.u1.nrows()
    }

    /// Larger of the two unitarity defects.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.u1).unwrap_or(f64::INFINITY).max(unitarity_defect(&self.u2).unwrap_or(f64::INFINITY))
    }

    /// Largest elementwise deviation from the defining relation.
    pub fn relation_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for k in 0..n {
            for l in 0..n {
                let expect = self.u1[(k, l)].conj() * C64::from_polar(1.0, self.phases[k] - self.phases[l]);
                worst = worst.max((self.u2[(k, l)] - expect).norm());
            }
        }
        worst
    }
}

/// The paired bases `{|α_j⟩}` and `{|β_j⟩}` of one degeneracy subspace,
/// as columns embedded in the factor spaces.
#[derive(Debug, Clone)]
pub struct DegeneracyFrame {
    pub left: Subspace,
    pub right: Subspace,
}

impl DegeneracyFrame {
    pub fn new(left: Subspace, right: Subspace) -> Result<Self> {
        if left.rank() != right.rank() || left.rank() == 0 {
            return domain(format!("frame bases must have equal positive rank, got {} and {}", left.rank(), right.rank()));
        }
        Ok(Self { left, right })
    }

    /// Computational bases of two `n`-dimensional factors.
    pub fn standard(n: usize) -> Self {
        Self { left: Subspace::full(n), right: Subspace::full(n) }
    }

    pub fn dim(&self) -> usize {
        self.left.rank()
    }

    /// `Σ_j N^{-1/2} e^{iφ_j}|α_j⟩⊗|β_j⟩`.
    pub fn omega(&self, phases: &[f64]) -> Result<PureState> {
        let n = self.dim();
        if phases.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: phases.len() });
        }
        let (d1, d2) = (self.left.ambient_dim(), self.right.ambient_dim());
        let mut m = CMatrix::zeros(d1, d2);
        let scale = (n as f64).sqrt().recip();
        for (j, &phi) in phases.iter().enumerate() {
            let a = self.left.basis().column(j);
            let b = self.right.basis().column(j);
            m += a * b.transpose() * C64::from_polar(scale, phi);
        }
        PureState::from_amplitude_matrix(&m)
    }

    /// `U_I ⊗ U_II` on the full space, each acting as the identity outside
    /// the frame.
    pub fn lift(&self, pair: &EnvariancePair) -> Result<CMatrix> {
        if pair.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: pair.dim() });
        }
        Ok(kron(&embed(&self.left, &pair.u1), &embed(&self.right, &pair.u2)))
    }
}

/// `B u B^H + (I - B B^H)`.
fn embed(frame: &Subspace, u: &CMatrix) -> CMatrix {
    let b = frame.basis();
    let n = frame.ambient_dim();
    b * u * b.adjoint() + CMatrix::identity(n, n) - frame.projector()
}

/// `|⟨ω|(U_I ⊗ U_II)|ω⟩ - 1|` for a flat state written in `frame`.
///
/// Fails unless `omega` has a single flat Schmidt cluster of the frame's
/// dimension and is exactly `frame.omega(pair.phases)` up to global phase.
pub fn invariance_defect(omega: &PureState, frame: &DegeneracyFrame, pair: &EnvariancePair, tol: &Tolerances) -> Result<f64> {
    let sd = decompose(omega, tol)?;
    if sd.clusters.len() != 1 || sd.clusters[0].multiplicity != frame.dim() {
        let weights = sd.weights();
        return domain(format!(
            "state is not a flat degeneracy component of dimension {}: Schmidt weights {weights:?}",
            frame.dim()
        ));
    }
    if omega.dims() != [frame.left.ambient_dim(), frame.right.ambient_dim()] {
        return domain(format!("state dims {:?} do not match the frame", omega.dims()));
    }
    let expected = frame.omega(&pair.phases)?;
    let fidelity = omega.inner(&expected)?.norm();
    if (fidelity - 1.0).abs() > tol.recon_tol {
        return domain(format!("state differs from the frame's flat form: |⟨ω|ω'⟩| = {fidelity:.17}"));
    }
    let u = frame.lift(pair)?;
    let a = omega.amplitudes();
    let value = a.dotc(&(u * a));
    Ok((value - C64::new(1.0, 0.0)).norm())
}

/// Applies `u1` (a unitary on factor 1 confined to one degeneracy cluster)
/// together with its compensator on factor 2, and checks that the
/// factor-1 lattice and Born weights are unchanged.
pub fn envariance_probability_check(state: &PureState, u1: &CMatrix, tol: &Tolerances) -> Result<bool> {
    let sd = decompose(state, tol)?;
    let d1 = sd.left_dim;
    if u1.nrows() != d1 || u1.ncols() != d1 {
        return Err(Error::DimensionMismatch { expected: d1, found: u1.nrows() });
    }
    let cluster = sd
        .clusters
        .iter()
        .find(|c| confined_to(u1, &c.left_basis, tol.ortho_tol.max(1e-9)))
        .ok_or_else(|| Error::Domain("u1 is not confined to a single degeneracy cluster".into()))?;

    let a = cluster.left_basis.basis();
    let inner = a.adjoint() * u1 * a;
    let phases: Vec<f64> = cluster.coefficients.iter().map(|c| c.arg()).collect();
    let pair = EnvariancePair::new(inner, phases, tol)?;
    let frame = DegeneracyFrame::new(cluster.left_basis.clone(), cluster.right_basis.clone())?;
    let moved = state.evolve(&frame.lift(&pair)?)?;
    same_modal_content(state, &moved, tol)
}

/// `u` maps `s` to itself and is the identity on `s^⊥`.
fn confined_to(u: &CMatrix, s: &Subspace, tol: f64) -> bool {
    let n = s.ambient_dim();
    let p = s.projector();
    let q = CMatrix::identity(n, n) - &p;
    let invariant = max_abs(&(&q * u * &p)) <= tol && max_abs(&(&p * u * &q)) <= tol;
    let identity_outside = max_abs(&(&q * u * &q - &q)) <= tol;
    invariant && identity_outside && unitarity_defect(u).map(|d| d <= tol).unwrap_or(false)
}

/// Component of `state` inside one factor-1 degeneracy cluster, normalized.
pub fn cluster_component(state: &PureState, cluster: usize, tol: &Tolerances) -> Result<(PureState, DegeneracyFrame, Vec<f64>)> {
    let sd = decompose(state, tol)?;
    let c = sd
        .clusters
        .get(cluster)
        .ok_or_else(|| Error::Domain(format!("cluster {cluster} out of range ({} clusters)", sd.clusters.len())))?;
    let frame = DegeneracyFrame::new(c.left_basis.clone(), c.right_basis.clone())?;
    let phases: Vec<f64> = c.coefficients.iter().map(|z| z.arg()).collect();
    let omega = frame.omega(&phases)?;
    Ok((omega, frame, phases))
}
