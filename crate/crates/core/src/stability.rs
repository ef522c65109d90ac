//! Sensitivity of the leading Schmidt subspace to small perturbations as
//! the top two weights approach degeneracy.

use crate::error::{domain, Error, Result};
use crate::hilbert::{HermitianOperator, PureState, Subspace};
use crate::linalg;
use crate::random::{random_hermitian, rng_from_seed};
use crate::schmidt::{decompose, SchmidtDecomposition};
use crate::tolerance::Tolerances;
use crate::{CMatrix, CVector, C64};

/// One point of a sweep: gap `ε` between the two Schmidt weights
/// `0.5 ± ε`, perturbation strength `δ`, and the number of trials averaged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityProbe {
    pub gap: f64,
    pub perturbation: f64,
    pub trials: usize,
}

/// Generator `G` of the perturbation `exp(iδG)` on two qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// `Z ⊗ X`: flips factor 2 with a sign conditioned on factor 1.
    Fixed,
    /// Random Hermitian generators of unit spectral norm, one per trial.
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub gap: f64,
    pub mean_angle: f64,
}

/// Largest principal angle (radians, in `[0, π/2]`) between the leading
/// atom subspaces (first clusters) of two decompositions. Subspaces of
/// different dimension are at angle `π/2`.
pub fn basis_rotation_angle(reference: &SchmidtDecomposition, perturbed: &SchmidtDecomposition) -> Result<f64> {
    if reference.left_dim != perturbed.left_dim {
        return Err(Error::DimensionMismatch { expected: reference.left_dim, found: perturbed.left_dim });
    }
    match (reference.clusters.first(), perturbed.clusters.first()) {
        (Some(a), Some(b)) => largest_principal_angle(&a.left_basis, &b.left_basis),
        _ => domain("decomposition has no clusters"),
    }
}

/// Largest principal angle between equal-dimension subspaces, from
/// `cos = σ_min(AᴴB)` and `sin = σ_max((I - AAᴴ)B)`; `π/2` if the
/// dimensions differ.
pub fn largest_principal_angle(a: &Subspace, b: &Subspace) -> Result<f64> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: a.ambient_dim(), found: b.ambient_dim() });
    }
    if a.rank() != b.rank() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    if a.rank() == 0 {
        return Ok(0.0);
    }
    let (ba, bb) = (a.basis(), b.basis());
    let cos = linalg::singular_values(&(ba.adjoint() * bb)).last().copied().unwrap_or(0.0);
    let residual = bb - ba * (ba.adjoint() * bb);
    let sin = linalg::singular_values(&residual).first().copied().unwrap_or(0.0);
    Ok(sin.atan2(cos).clamp(0.0, std::f64::consts::FRAC_PI_2))
}

/// `√(0.5+ε)|00⟩ + √(0.5-ε)|11⟩`.
pub fn probe_state(gap: f64) -> Result<PureState> {
    if !(gap > 0.0 && gap < 0.5) {
        return domain(format!("gap must lie in (0, 0.5), got {gap}"));
    }
    let amps = CVector::from_vec(vec![
        C64::new((0.5 + gap).sqrt(), 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new((0.5 - gap).sqrt(), 0.0),
    ]);
    PureState::normalized(vec![2, 2], amps)
}

fn z_tensor_x() -> CMatrix {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    CMatrix::from_row_slice(4, 4, &[o, l, o, o, l, o, o, o, o, o, o, -l, o, o, -l, o])
}

/// `exp(iδG)` for Hermitian `G`.
fn exp_i(generator: &CMatrix, delta: f64) -> CMatrix {
    let eig = linalg::eigh(generator);
    let v = &eig.vectors;
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        eig.values.len(),
        eig.values.iter().map(|&l| C64::from_polar(1.0, delta * l)),
    ));
    v * d * v.adjoint()
}

/// Mean leading-subspace rotation for one probe.
pub fn probe_angle(probe: &StabilityProbe, generator: Generator, tol: &Tolerances) -> Result<f64> {
    if !(probe.perturbation >= 0.0) {
        return domain(format!("perturbation strength must be non-negative, got {}", probe.perturbation));
    }
    let psi = probe_state(probe.gap)?;
    let reference = decompose(&psi, tol)?;
    let generators: Vec<CMatrix> = match generator {
        Generator::Fixed => vec![z_tensor_x()],
        Generator::Random { seed } => {
            if probe.trials == 0 {
                return domain("at least one trial is required");
            }
            let mut rng = rng_from_seed(seed);
            (0..probe.trials)
                .map(|_| {
                    let h = random_hermitian(4, &mut rng);
                    h.matrix().unscale(h.spectral_norm())
                })
                .collect()
        }
    };
    let mut total = 0.0;
    for g in &generators {
        let moved = psi.evolve(&exp_i(g, probe.perturbation))?;
        total += basis_rotation_angle(&reference, &decompose(&moved, tol)?)?;
    }
    Ok(total / generators.len() as f64)
}

/// Leading-subspace rotation over a list of gaps at fixed `δ`.
pub fn degeneracy_sweep(gaps: &[f64], delta: f64, generator: Generator, trials: usize, tol: &Tolerances) -> Result<Vec<SweepPoint>> {
    gaps.iter()
        .map(|&gap| {
            let probe = StabilityProbe { gap, perturbation: delta, trials };
            Ok(SweepPoint { gap, mean_angle: probe_angle(&probe, generator, tol)? })
        })
        .collect()
}

/// Operator used by the fixed generator, exposed for reports.
pub fn fixed_generator() -> HermitianOperator {
    HermitianOperator::new(z_tensor_x(), 0.0).expect("Z⊗X is Hermitian")
}
