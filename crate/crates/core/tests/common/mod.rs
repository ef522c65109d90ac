//! Reference implementations used only by tests. Nothing here calls into
//! nalgebra's decompositions: eigenproblems go through a cyclic complex
//! Jacobi solver, orthonormalization through modified Gram–Schmidt.

#![allow(dead_code)]

use modal_core::random::random_unitary;
use modal_core::{CMatrix, CVector, C64};
use rand::Rng;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Eigenvalues (descending) and matching eigenvector columns of a Hermitian
/// matrix.
pub fn jacobi_eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    let mut a = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let mut v = CMatrix::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].norm_sqr()).sum();
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if tau >= 0.0 { 1.0 } else { -1.0 } / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J = diag(1, .., conj(phase) at q, ..) · real rotation in (p, q).
                let mut j = CMatrix::identity(n, n);
                j[(p, p)] = C64::new(c, 0.0);
                j[(p, q)] = C64::new(s, 0.0);
                j[(q, p)] = phase.conj() * (-s);
                j[(q, q)] = phase.conj() * c;
                a = j.adjoint() * &a * &j;
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                v = &v * &j;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    (values, vectors)
}

/// Squared singular values of `m`, descending, padded to `min(rows, cols)`.
pub fn squared_singular_values(m: &CMatrix) -> Vec<f64> {
    let g = if m.nrows() <= m.ncols() { m * m.adjoint() } else { m.adjoint() * m };
    jacobi_eigh(&g).0.into_iter().map(|x| x.max(0.0)).collect()
}

pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    let s = squared_singular_values(m);
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > (rel_tol * rel_tol) * top && x > 0.0).count()
}

/// Orthonormal columns spanning `m`'s column space (modified Gram–Schmidt,
/// twice).
pub fn orthonormalize(m: &CMatrix, tol: f64) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::new();
    for k in 0..m.ncols() {
        let mut v = m.column(k).into_owned();
        for _ in 0..2 {
            for u in &cols {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
        }
        let nv = v.norm();
        if nv > tol {
            cols.push(v / C64::new(nv, 0.0));
        }
    }
    if cols.is_empty() {
        return CMatrix::zeros(m.nrows(), 0);
    }
    CMatrix::from_columns(&cols)
}

pub fn projector(basis: &CMatrix) -> CMatrix {
    basis * basis.adjoint()
}

/// Eigenvectors of a PSD matrix whose eigenvalues are below `tol`.
pub fn null_space(h: &CMatrix, tol: f64) -> CMatrix {
    let (vals, vecs) = jacobi_eigh(h);
    let cols: Vec<CVector> = vals.iter().enumerate().filter(|(_, &x)| x.abs() < tol).map(|(k, _)| vecs.column(k).into_owned()).collect();
    if cols.is_empty() {
        return CMatrix::zeros(h.nrows(), 0);
    }
    CMatrix::from_columns(&cols)
}

/// `a ∧ b` as the null space of `(I - P_a) + (I - P_b)`.
pub fn meet(pa: &CMatrix, pb: &CMatrix) -> CMatrix {
    let n = pa.nrows();
    let id = CMatrix::identity(n, n);
    null_space(&((&id - pa) + (&id - pb)), 1e-8)
}

/// Eigenspaces of a Hermitian matrix grouped by `|λ_i - λ_j| ≤ tol`.
pub fn eigenspaces(h: &CMatrix, tol: f64) -> Vec<(f64, CMatrix)> {
    let (vals, vecs) = jacobi_eigh(h);
    let mut groups: Vec<(f64, Vec<CVector>)> = Vec::new();
    for (k, &x) in vals.iter().enumerate() {
        match groups.last_mut() {
            Some((first, cols)) if (*first - x).abs() <= tol => cols.push(vecs.column(k).into_owned()),
            _ => groups.push((x, vec![vecs.column(k).into_owned()])),
        }
    }
    groups.into_iter().map(|(x, cols)| (x, CMatrix::from_columns(&cols))).collect()
}

/// Largest principal angle from the singular values of `AᴴB`.
pub fn largest_principal_angle(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.ncols() != b.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    let cos_sq = squared_singular_values(&(a.adjoint() * b));
    let smallest = cos_sq.last().copied().unwrap_or(1.0).clamp(0.0, 1.0);
    smallest.sqrt().acos()
}

pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    (a * b - b * a).norm()
}

/// Leading-vector rotation of `√(0.5+ε)|00⟩ + √(0.5-ε)|11⟩` under
/// `exp(iδ Z⊗X)`, read off the 2×2 amplitude matrix
/// `[[a cos δ, i a sin δ], [-i b sin δ, b cos δ]]` whose left Gram matrix is
/// `[[a², i ab sin 2δ], [-i ab sin 2δ, b²]]`.
pub fn two_by_two_angle(gap: f64, delta: f64) -> f64 {
    let a = (0.5 + gap).sqrt();
    let b = (0.5 - gap).sqrt();
    0.5 * (a * b * (2.0 * delta).sin()).atan2(gap)
}

/// The same angle obtained by diagonalizing the perturbed amplitude
/// matrix's Gram matrix with the Jacobi solver.
pub fn two_by_two_angle_numeric(gap: f64, delta: f64) -> f64 {
    let a = (0.5 + gap).sqrt();
    let b = (0.5 - gap).sqrt();
    let (c, s) = (delta.cos(), delta.sin());
    let m = CMatrix::from_row_slice(2, 2, &[C64::new(a * c, 0.0), C64::new(0.0, a * s), C64::new(0.0, -b * s), C64::new(b * c, 0.0)]);
    let (_, vecs) = jacobi_eigh(&(&m * m.adjoint()));
    vecs[(0, 0)].norm().clamp(0.0, 1.0).acos()
}

/// `⟨ω|U_I ⊗ U_II|ω⟩` for `ω = N^{-1/2} Σ e^{iφ_j}|j⟩|j⟩`, contracted
/// index by index.
pub fn flat_expectation(u1: &CMatrix, u2: &CMatrix, phases: &[f64]) -> C64 {
    let n = phases.len();
    let mut total = ZERO;
    for k in 0..n {
        for l in 0..n {
            // ⟨k k| U₁⊗U₂ |l l⟩ = U₁[k,l] U₂[k,l].
            total += C64::from_polar(1.0, phases[l] - phases[k]) * u1[(k, l)] * u2[(k, l)];
        }
    }
    total / n as f64
}

/// `u2[k,l] = conj(u1[k,l]) e^{i(φ_k - φ_l)}` written out entry by entry.
pub fn elementwise_compensator(u1: &CMatrix, phases: &[f64]) -> CMatrix {
    let n = phases.len();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            let z = u1[(k, l)];
            let (c, s) = ((phases[k] - phases[l]).cos(), (phases[k] - phases[l]).sin());
            out[(k, l)] = C64::new(z.re * c + z.im * s, z.re * s - z.im * c);
        }
    }
    out
}

pub fn max_unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Reduced operator on factor 1 from the amplitude matrix, by explicit sums.
pub fn reduced_left(amps: &CVector, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1, d1, |i, k| (0..d2).map(|j| amps[i * d2 + j] * amps[k * d2 + j].conj()).sum())
}

pub fn reduced_right(amps: &CVector, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d2, d2, |j, l| (0..d1).map(|i| amps[i * d2 + j] * amps[i * d2 + l].conj()).sum())
}

pub fn amplitude_matrix(amps: &CVector, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1, d2, |i, j| amps[i * d2 + j])
}

/// `⟨x|y⟩` summed term by term.
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// A unitary that fixes `psi` and every eigenspace of `r`: on each
/// eigenspace it fixes the projected ray and acts arbitrarily on the rest.
pub fn invariance_unitary(psi: &CVector, r: &CMatrix, rng: &mut impl Rng) -> CMatrix {
    let n = psi.len();
    let mut u = CMatrix::zeros(n, n);
    for (_, b) in eigenspaces(r, 1e-8 * r.norm().max(1.0)) {
        let v = &b * (b.adjoint() * psi);
        let weight = v.norm_squared();
        if weight >= 1e-10 {
            let ray = &v / C64::new(weight.sqrt(), 0.0);
            u += &ray * ray.adjoint();
            let rest = orthonormalize(&(&b - &ray * (ray.adjoint() * &b)), 1e-6);
            if rest.ncols() > 0 {
                u += &rest * random_unitary(rest.ncols(), rng) * rest.adjoint();
            }
        } else {
            u += &b * random_unitary(b.ncols(), rng) * b.adjoint();
        }
    }
    u
}
