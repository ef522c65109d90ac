//! Biorthogonal (Schmidt) decomposition of bipartite pure states with
//! degeneracy clustering.


use crate::error::Result;
use crate::hilbert::{kron_vec, PureState, Subspace};
use crate::linalg;
use crate::tolerance::Tolerances;
use crate::{CMatrix, CVector, C64};

/// Schmidt terms sharing one weight `|c|²`.
///
/// Column `j` of `left_basis` pairs with column `j` of `right_basis` through
/// `coefficients[j]`. The basis inside a cluster is whatever the
/// factorization produced; only the spanned subspaces are meaningful.
#[derive(Debug, Clone)]
pub struct DegeneracyCluster {
    pub weight: f64,
    pub multiplicity: usize,
    pub left_basis: Subspace,
    pub right_basis: Subspace,
    pub coefficients: CVector,
}

impl DegeneracyCluster {
    /// Total probability carried by the cluster, `multiplicity · weight`.
    pub fn total_weight(&self) -> f64 {
        self.coefficients.norm_squared()
    }
}

#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub clusters: Vec<DegeneracyCluster>,
    pub left_dim: usize,
    pub right_dim: usize,
    pub cluster_tol: f64,
}

/// Decomposes a bipartite state as `Σ c_k |α_k⟩⊗|β_k⟩`.
///
/// Weights are squared singular values of the amplitude matrix; those below
/// `rank_tol` are dropped. Sorted weights `w_prev ≥ w_next` start a new
/// cluster when `(w_prev - w_next) / w_prev ≥ cluster_tol`.
pub fn decompose(state: &PureState, tol: &Tolerances) -> Result<SchmidtDecomposition> {
    let m = state.amplitude_matrix()?;
    let (d1, d2) = m.shape();
    let svd = linalg::svd(&m);
    let (u, v) = (&svd.u, &svd.v);

    let mut terms: Vec<(f64, usize)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(k, s)| (s * s, k))
        .filter(|(w, _)| *w >= tol.rank_tol)
        .collect();
    terms.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut groups: Vec<Vec<(f64, usize)>> = Vec::new();
    for t in terms {
        match groups.last_mut() {
            Some(g) if (g.last().unwrap().0 - t.0) / g.last().unwrap().0 < tol.cluster_tol => g.push(t),
            _ => groups.push(vec![t]),
        }
    }

    let clusters = groups
        .into_iter()
        .map(|g| {
            let n = g.len();
            // M = U·Σ·Vᴴ, so ψ = Σ σ_k u_k ⊗ conj(v_k)
            let left = CMatrix::from_fn(d1, n, |i, j| u[(i, g[j].1)]);
            let right = CMatrix::from_fn(d2, n, |i, j| v[(i, g[j].1)].conj());
            let coefficients = CVector::from_iterator(n, g.iter().map(|(w, _)| C64::new(w.sqrt(), 0.0)));
            DegeneracyCluster {
                weight: g.iter().map(|(w, _)| w).sum::<f64>() / n as f64,
                multiplicity: n,
                left_basis: Subspace::from_orthonormal(left, 1e-8).expect("singular vectors are orthonormal"),
                right_basis: Subspace::from_orthonormal(right, 1e-8).expect("singular vectors are orthonormal"),
                coefficients,
            }
        })
        .collect();

    Ok(SchmidtDecomposition { clusters, left_dim: d1, right_dim: d2, cluster_tol: tol.cluster_tol })
}

impl SchmidtDecomposition {
    /// Number of retained Schmidt terms, counting multiplicity.
    pub fn schmidt_rank(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }

    pub fn is_non_degenerate(&self) -> bool {
        self.clusters.iter().all(|c| c.multiplicity == 1)
    }

    /// Individual weights `|c_k|²`, descending, with multiplicity.
    pub fn weights(&self) -> Vec<f64> {
        self.terms().map(|(c, _, _)| c.norm_sqr()).collect()
    }

    /// All Schmidt terms `(c_k, α_k, β_k)` in cluster order.
    pub fn terms(&self) -> impl Iterator<Item = (C64, CVector, CVector)> + '_ {
        self.clusters.iter().flat_map(|c| {
            (0..c.multiplicity).map(move |j| {
                (c.coefficients[j], c.left_basis.basis().column(j).into_owned(), c.right_basis.basis().column(j).into_owned())
            })
        })
    }

    /// `Σ c_k |α_k⟩⊗|β_k⟩` as a composite amplitude vector.
    pub fn reconstruct(&self) -> CVector {
        let mut out = CVector::zeros(self.left_dim * self.right_dim);
        for (c, a, b) in self.terms() {
            out += kron_vec(&a, &b) * c;
        }
        out
    }

    /// `min_φ ‖ψ - e^{iφ}·reconstruction‖`.
    pub fn reconstruction_error(&self, state: &PureState) -> f64 {
        let rec = self.reconstruct();
        let psi = state.amplitudes();
        let overlap = rec.dotc(psi);
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
        (psi - rec * phase).norm()
    }

    /// Largest deviation of the left and right families from orthonormality.
    pub fn orthonormality_defect(&self) -> f64 {
        let collect = |left: bool| {
            let vecs: Vec<CVector> = self.terms().map(|(_, a, b)| if left { a } else { b }).collect();
            let n = vecs.len();
            let mut worst = 0.0_f64;
            for i in 0..n {
                for j in 0..n {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((vecs[i].dotc(&vecs[j]) - C64::new(target, 0.0)).norm());
                }
            }
            worst
        };
        collect(true).max(collect(false))
    }
}

/// True iff the state has Schmidt rank 1, i.e. it is a product state and
/// both reduced states are pure.
pub fn reduced_purity_is_product(state: &PureState, tol: &Tolerances) -> Result<bool> {
    Ok(decompose(state, tol)?.schmidt_rank() == 1)
}
