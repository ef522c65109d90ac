//! Finite-dimensional Hilbert-space arithmetic: pure states over a tensor
//! factorization, Hermitian operators, and subspaces stored as orthonormal
//! bases.
//!
//! Composite indices are row-major over the factors: for dims `[d1, d2]`
//! the amplitude of `|i⟩⊗|j⟩` sits at `i * d2 + j`.

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Error, Result};
use crate::linalg;
use crate::{CMatrix, CVector, C64};

const MAX_FACTORS: usize = 3;

/// Normalized amplitude vector over a declared tensor factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: CVector,
}

impl PureState {
    /// Builds a state, rejecting it unless `|‖ψ‖² - 1| ≤ norm_tol`.
    pub fn new(dims: Vec<usize>, amplitudes: CVector, norm_tol: f64) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm_sq = amplitudes.norm_squared();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > norm_tol {
            return Err(Error::NotNormalized { norm: norm_sq.sqrt(), tol: norm_tol });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Builds a state from arbitrary nonzero amplitudes, normalizing them.
    pub fn normalized(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm, tol: 0.0 });
        }
        Ok(Self { dims, amplitudes: amplitudes.unscale(norm) })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let n: usize = dims.iter().product();
        if index >= n {
            return domain(format!("basis index {index} out of range for dimension {n}"));
        }
        let mut amps = CVector::zeros(n);
        amps[index] = C64::new(1.0, 0.0);
        Self::normalized(dims, amps)
    }

    /// Bipartite state whose `d1 × d2` amplitude matrix is `m` (normalized).
    pub fn from_amplitude_matrix(m: &CMatrix) -> Result<Self> {
        let (rows, cols) = m.shape();
        let amps = CVector::from_iterator(rows * cols, (0..rows).flat_map(|i| (0..cols).map(move |j| m[(i, j)])));
        Self::normalized(vec![rows, cols], amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn factor_count(&self) -> usize {
        self.dims.len()
    }

    pub(crate) fn require_factors(&self, expected: usize) -> Result<()> {
        if self.dims.len() != expected {
            return Err(Error::FactorCount { expected, found: self.dims.len() });
        }
        Ok(())
    }

    /// `|self⟩ ⊗ |other⟩`, with factor lists concatenated.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let amps = kron_vec(&self.amplitudes, &other.amplitudes);
        PureState::normalized(dims, amps)
    }

    /// The `d1 × d2` amplitude matrix of a bipartite state.
    pub fn amplitude_matrix(&self) -> Result<CMatrix> {
        self.require_factors(2)?;
        let (d1, d2) = (self.dims[0], self.dims[1]);
        Ok(CMatrix::from_fn(d1, d2, |i, j| self.amplitudes[i * d2 + j]))
    }

    /// Same amplitudes under a coarser or different factorization with the
    /// same total dimension (e.g. `[ds, dA, dE]` as `[ds, dA * dE]`).
    pub fn regrouped(&self, dims: Vec<usize>) -> Result<PureState> {
        check_dims(&dims, self.amplitudes.len())?;
        Ok(PureState { dims, amplitudes: self.amplitudes.clone() })
    }

    /// Multiplies every amplitude by `exp(i·phase)`.
    pub fn with_global_phase(&self, phase: f64) -> PureState {
        let f = C64::from_polar(1.0, phase);
        PureState { dims: self.dims.clone(), amplitudes: self.amplitudes.map(|a| a * f) }
    }

    /// Applies an operator on the full space and renormalizes.
    pub fn evolve(&self, op: &CMatrix) -> Result<PureState> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.nrows() });
        }
        PureState::normalized(self.dims.clone(), op * &self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Reduced density operator on factor `keep` (zero-based).
    pub fn partial_trace(&self, keep: usize) -> Result<HermitianOperator> {
        if self.dims.len() < 2 {
            return domain("partial trace needs a state with at least two factors");
        }
        if keep >= self.dims.len() {
            return Err(Error::InvalidFactor { index: keep, factors: self.dims.len() });
        }
        let outer: usize = self.dims[..keep].iter().product();
        let d = self.dims[keep];
        let inner: usize = self.dims[keep + 1..].iter().product();
        let amp = |l: usize, a: usize, r: usize| self.amplitudes[(l * d + a) * inner + r];
        let mut rho = CMatrix::zeros(d, d);
        for a in 0..d {
            for b in a..d {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..outer {
                    for r in 0..inner {
                        acc += amp(l, a, r) * amp(l, b, r).conj();
                    }
                }
                rho[(a, b)] = acc;
                rho[(b, a)] = acc.conj();
            }
        }
        for a in 0..d {
            rho[(a, a)].im = 0.0;
        }
        Ok(HermitianOperator { matrix: rho })
    }
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.len() > MAX_FACTORS {
        return Err(Error::InvalidDims {
            dims: dims.to_vec(),
            reason: format!("between 1 and {MAX_FACTORS} factors are supported"),
        });
    }
    if dims.contains(&0) {
        return Err(Error::InvalidDims { dims: dims.to_vec(), reason: "factor dimensions must be positive".into() });
    }
    let total: usize = dims.iter().product();
    if total != len {
        return Err(Error::InvalidDims {
            dims: dims.to_vec(),
            reason: format!("product of dims is {total} but {len} amplitudes were given"),
        });
    }
    Ok(())
}

/// Hermitian matrix on a `dim`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

/// One eigenspace of a Hermitian operator after degeneracy clustering.
#[derive(Debug, Clone)]
pub struct Eigenspace {
    /// Mean of the clustered eigenvalues.
    pub eigenvalue: f64,
    pub subspace: Subspace,
}

impl HermitianOperator {
    /// Accepts `matrix` if it is square and `max |A - A^H| ≤ herm_tol`;
    /// the stored matrix is the exact Hermitian part.
    pub fn new(matrix: CMatrix, herm_tol: f64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let defect = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(defect <= herm_tol) {
            return Err(Error::NotHermitian { defect, tol: herm_tol });
        }
        let herm = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(Self { matrix: herm })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim, dim) }
    }

    /// Real diagonal operator.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self { matrix: CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { C64::new(0.0, 0.0) }) }
    }

    /// Orthogonal projector onto `s`.
    pub fn projector(s: &Subspace) -> Self {
        Self { matrix: s.projector() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `self ⊗ I_d`.
    pub fn tensor_identity(&self, d: usize) -> Self {
        Self { matrix: kron(&self.matrix, &CMatrix::identity(d, d)) }
    }

    /// `I_d ⊗ self`.
    pub fn identity_tensor(&self, d: usize) -> Self {
        Self { matrix: kron(&CMatrix::identity(d, d), &self.matrix) }
    }

    /// Real expectation value `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, state: &PureState) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: state.dim() });
        }
        let a = state.amplitudes();
        Ok(a.dotc(&(&self.matrix * a)).re)
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        linalg::eigh(&self.matrix).values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Eigenspaces sorted by descending eigenvalue.
    ///
    /// Consecutive sorted eigenvalues `a ≥ b` share a cluster when
    /// `a - b ≤ cluster_tol · max(|a|, |b|)`. Eigenvalues within roundoff of
    /// zero (relative to the spectral radius) are snapped to zero first, so a
    /// numerically noisy null space stays a single eigenspace.
    pub fn eigenspaces(&self, cluster_tol: f64) -> Vec<Eigenspace> {
        let n = self.dim();
        if n == 0 {
            return Vec::new();
        }
        let eig = linalg::eigh(&self.matrix);
        let radius = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let zero_band = 64.0 * n as f64 * f64::EPSILON * radius;
        let mut order: Vec<usize> = (0..n).collect();
        let value = |k: usize| {
            let v = eig.values[k];
            if v.abs() <= zero_band {
                0.0
            } else {
                v
            }
        };
        order.sort_by(|&a, &b| value(b).total_cmp(&value(a)));

        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &k in &order {
            match groups.last_mut() {
                Some(g) => {
                    let prev = value(*g.last().unwrap());
                    let cur = value(k);
                    if prev - cur <= cluster_tol * prev.abs().max(cur.abs()) {
                        g.push(k);
                    } else {
                        groups.push(vec![k]);
                    }
                }
                None => groups.push(vec![k]),
            }
        }

        groups
            .into_iter()
            .map(|g| {
                let eigenvalue = g.iter().map(|&k| value(k)).sum::<f64>() / g.len() as f64;
                let basis = CMatrix::from_fn(n, g.len(), |i, j| eig.vectors[(i, g[j])]);
                Eigenspace { eigenvalue, subspace: Subspace { basis } }
            })
            .collect()
    }
}

/// Linear subspace of `C^n`, stored as a matrix with orthonormal columns.
/// A basis with zero columns is the null space `{0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self { basis: CMatrix::zeros(ambient_dim, 0) }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self { basis: CMatrix::identity(ambient_dim, ambient_dim) }
    }

    /// Accepts a basis whose columns are orthonormal within `ortho_tol`.
    pub fn from_orthonormal(basis: CMatrix, ortho_tol: f64) -> Result<Self> {
        let r = basis.ncols();
        if r > basis.nrows() {
            return Err(Error::DimensionMismatch { expected: basis.nrows(), found: r });
        }
        let defect = max_abs(&(basis.adjoint() * &basis - CMatrix::identity(r, r)));
        if !(defect <= ortho_tol) {
            return Err(Error::NotOrthonormal { defect, tol: ortho_tol });
        }
        Ok(Self { basis })
    }

    /// Column space of `m`, re-orthonormalized. Singular values at or below
    /// `rank_tol` times the largest are discarded.
    pub fn from_spanning(m: &CMatrix, rank_tol: f64) -> Self {
        let n = m.nrows();
        if m.ncols() == 0 || n == 0 {
            return Self::zero(n);
        }
        let svd = linalg::svd(m);
        let smax = svd.singular_values.first().copied().unwrap_or(0.0);
        if !(smax > 0.0) {
            return Self::zero(n);
        }
        let keep = svd.singular_values.iter().take_while(|&&s| s > rank_tol * smax).count();
        let basis = svd.u.columns(0, keep).into_owned();
        Self { basis }
    }

    /// One-dimensional span of a nonzero vector.
    pub fn ray(v: &CVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return domain("cannot span a ray from the zero vector");
        }
        let unit = v.unscale(norm);
        Ok(Self { basis: CMatrix::from_column_slice(v.len(), 1, unit.as_slice()) })
    }

    /// Span of computational basis vectors.
    pub fn coordinate(ambient_dim: usize, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= ambient_dim) {
            return domain(format!("coordinate index {bad} out of range for dimension {ambient_dim}"));
        }
        let mut m = CMatrix::zeros(ambient_dim, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        Ok(Self::from_spanning(&m, 1e-12))
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// `B·B^H`.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: other.ambient_dim() });
        }
        Ok(())
    }

    /// Frobenius distance between the two projectors.
    pub fn distance(&self, other: &Subspace) -> Result<f64> {
        self.check_ambient(other)?;
        Ok((self.projector() - other.projector()).norm())
    }

    pub fn approx_eq(&self, other: &Subspace, subspace_eq_tol: f64) -> bool {
        matches!(self.distance(other), Ok(d) if d < subspace_eq_tol)
    }

    /// Column space of the concatenated bases.
    pub fn span(&self, other: &Subspace, rank_tol: f64) -> Result<Subspace> {
        self.check_ambient(other)?;
        let n = self.ambient_dim();
        let (ra, rb) = (self.rank(), other.rank());
        let mut m = CMatrix::zeros(n, ra + rb);
        m.columns_mut(0, ra).copy_from(&self.basis);
        m.columns_mut(ra, rb).copy_from(&other.basis);
        Ok(Subspace::from_spanning(&m, rank_tol))
    }

    /// Intersection, computed as `(a^⊥ ∨ b^⊥)^⊥`.
    pub fn meet(&self, other: &Subspace, rank_tol: f64) -> Result<Subspace> {
        self.check_ambient(other)?;
        let joined = self.ortho_complement(rank_tol).span(&other.ortho_complement(rank_tol), rank_tol)?;
        Ok(joined.ortho_complement(rank_tol))
    }

    /// Range of `I - P`.
    pub fn ortho_complement(&self, rank_tol: f64) -> Subspace {
        let n = self.ambient_dim();
        if self.is_zero() {
            return Subspace::full(n);
        }
        if self.rank() == n {
            return Subspace::zero(n);
        }
        let q = CMatrix::identity(n, n) - self.projector();
        // singular values of I - P are 0 or 1; anything in between is noise
        Subspace::from_spanning(&q, rank_tol.max(0.5))
    }

    /// `S ⊗ C^d`, the lift of a factor subspace to `H ⊗ C^d`.
    pub fn tensor_identity(&self, d: usize) -> Subspace {
        Subspace { basis: kron(&self.basis, &CMatrix::identity(d, d)) }
    }

    /// Image under a unitary `u`.
    pub fn transformed(&self, u: &CMatrix) -> Result<Subspace> {
        if u.ncols() != self.ambient_dim() || u.nrows() != self.ambient_dim() {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim(), found: u.ncols() });
        }
        Ok(Subspace::from_spanning(&(u * &self.basis), 1e-12))
    }

    /// `max |B^H B - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let r = self.rank();
        max_abs(&(self.basis.adjoint() * &self.basis - CMatrix::identity(r, r)))
    }
}

/// Orthogonal projection of `state` onto `s`: the unnormalized component
/// `P_s|ψ⟩` and its weight `⟨ψ|P_s|ψ⟩`.
pub fn project_state(state: &PureState, s: &Subspace) -> Result<(CVector, f64)> {
    if s.ambient_dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: state.dim(), found: s.ambient_dim() });
    }
    let coords = s.basis.adjoint() * state.amplitudes();
    let component = &s.basis * &coords;
    Ok((component, coords.norm_squared()))
}

/// Kronecker product of two matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of two vectors (row-major composite index).
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let nb = b.len();
    CVector::from_fn(a.len() * nb, |k, _| a[k / nb] * b[k % nb])
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |U^H U - I|`, or an error for non-square input.
pub fn unitarity_defect(u: &CMatrix) -> Result<f64> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch { expected: u.nrows(), found: u.ncols() });
    }
    let n = u.nrows();
    Ok(max_abs(&(u.adjoint() * u - CMatrix::identity(n, n))))
}

/// Converts a real matrix to a complex one.
pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// Complex vector from `(re, im)` pairs.
pub fn cvector(values: &[(f64, f64)]) -> CVector {
    DVector::from_iterator(values.len(), values.iter().map(|&(re, im)| C64::new(re, im)))
}
