//! Seeded random generation of states, unitaries and observables.
//!
//! All randomness in the crate flows through [`Prng`], which is
//! xoshiro256++ seeded from a 64-bit value via SplitMix64.

use nalgebra::QR;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::hilbert::{HermitianOperator, PureState, Subspace};
use crate::{CMatrix, CVector, C64};

pub type Prng = rand_xoshiro::Xoshiro256PlusPlus;

pub fn rng_from_seed(seed: u64) -> Prng {
    Prng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random pure state over `dims`.
pub fn random_state<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> PureState {
    let n = dims.iter().product();
    let v = CVector::from_fn(n, |_, _| complex_gaussian(rng));
    PureState::normalized(dims.to_vec(), v).expect("gaussian vector is nonzero")
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = QR::new(gaussian_matrix(n, n, rng));
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `n × k` matrix with orthonormal columns (first `k` columns of a Haar
/// unitary).
pub fn random_isometry<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> CMatrix {
    random_unitary(n, rng).columns(0, k).into_owned()
}

/// Random subspace of dimension `k` in `C^n`.
pub fn random_subspace<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Subspace {
    Subspace::from_orthonormal(random_isometry(n, k, rng), 1e-10).expect("isometry columns are orthonormal")
}

/// Hermitian operator `(G + G^H)/2` with Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianOperator {
    let g = gaussian_matrix(n, n, rng);
    HermitianOperator::new((&g + g.adjoint()).scale(0.5), 1e-12).expect("symmetrized matrix is Hermitian")
}

/// Hermitian operator `U diag(values) U^H` with a Haar-random `U`; repeated
/// entries in `values` plant exact degeneracies.
pub fn hermitian_with_spectrum<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> HermitianOperator {
    let n = values.len();
    let u = random_unitary(n, rng);
    let d = HermitianOperator::diagonal(values);
    let m = &u * d.matrix() * u.adjoint();
    HermitianOperator::new((&m + m.adjoint()).scale(0.5), 1e-10).expect("conjugated diagonal is Hermitian")
}
