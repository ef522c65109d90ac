use serde::{Deserialize, Serialize};

/// Numerical cutoffs used throughout the crate.
///
/// Exact-arithmetic statements (orthogonality, degeneracy, vanishing
/// projections) are decided against these bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed deviation of a state's norm from 1.
    pub norm_tol: f64,
    /// Allowed entrywise deviation of an operator from its adjoint.
    pub herm_tol: f64,
    /// Allowed entrywise deviation of `B^H B` from the identity.
    pub ortho_tol: f64,
    /// Relative singular-value cutoff; also the absolute weight below
    /// which a projection of the state counts as zero.
    pub rank_tol: f64,
    /// Relative gap below which two eigenvalues (or Schmidt weights) are
    /// treated as one degenerate value.
    pub cluster_tol: f64,
    /// Frobenius distance between projectors below which two subspaces
    /// are considered equal.
    pub subspace_eq_tol: f64,
    /// Reconstruction tolerance for decompositions and branch lists.
    pub recon_tol: f64,
    /// Tolerance on the envariance relations.
    pub env_tol: f64,
    /// Tolerance of the additivity functional equation.
    pub add_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm_tol: 1e-10,
            herm_tol: 1e-10,
            ortho_tol: 1e-10,
            rank_tol: 1e-10,
            cluster_tol: 1e-8,
            subspace_eq_tol: 1e-9,
            recon_tol: 1e-10,
            env_tol: 1e-10,
            add_tol: 1e-12,
        }
    }
}

impl Tolerances {
    /// Returns the name of the first tolerance that is not a positive
    /// finite number.
    pub fn first_invalid(&self) -> Option<&'static str> {
        let all = [
            ("norm_tol", self.norm_tol),
            ("herm_tol", self.herm_tol),
            ("ortho_tol", self.ortho_tol),
            ("rank_tol", self.rank_tol),
            ("cluster_tol", self.cluster_tol),
            ("subspace_eq_tol", self.subspace_eq_tol),
            ("recon_tol", self.recon_tol),
            ("env_tol", self.env_tol),
            ("add_tol", self.add_tol),
        ];
        all.iter()
            .find(|(_, v)| !(v.is_finite() && *v > 0.0))
            .map(|(name, _)| *name)
    }
}
