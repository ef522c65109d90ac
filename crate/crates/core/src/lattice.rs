//! Boolean lattices of definite-valued projectors.
//!
//! A lattice is stored by its atoms: mutually orthogonal subspaces that
//! resolve the identity. Every other element is the join of a subset of
//! atoms and is materialized only on demand.

use std::fmt;

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::hilbert::{project_state, HermitianOperator, PureState, Subspace};
use crate::schmidt::SchmidtDecomposition;
use crate::tolerance::Tolerances;
use crate::CMatrix;

/// Largest atom count for which lattice elements can be addressed.
pub const MAX_ELEMENT_ATOMS: usize = 128;

/// Exhaustive law checking is done up to this many atoms.
pub const EXHAUSTIVE_LAW_ATOMS: usize = 12;

/// Where an atom came from, in terms of the eigenspace index `i` of the
/// preferred observable (eigenspaces sorted by descending eigenvalue).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomLabel {
    /// The ray spanned by the projection of the state onto eigenspace `i`.
    PsiProjection(usize),
    /// The part of eigenspace `i` orthogonal to the projected state.
    ComplementInEigenspace(usize),
    /// Eigenspace `i` as a whole (zero projection, or a 1-dim eigenspace).
    WholeEigenspace(usize),
}

impl AtomLabel {
    pub fn eigenspace(&self) -> usize {
        match *self {
            AtomLabel::PsiProjection(i) | AtomLabel::ComplementInEigenspace(i) | AtomLabel::WholeEigenspace(i) => i,
        }
    }
}

/// Space the atoms live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeScope {
    /// Atoms are subspaces of the full state space.
    Whole,
    /// Atoms are subspaces of the first factor; as properties of the
    /// composite they act as `P ⊗ I` on a second factor of `right_dim`.
    LeftFactor { right_dim: usize },
}

#[derive(Debug, Clone)]
pub struct Atom {
    pub subspace: Subspace,
    pub label: AtomLabel,
    /// `⟨ψ|P|ψ⟩` for the state the lattice was built from.
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct DefiniteLattice {
    ambient_dim: usize,
    atoms: Vec<Atom>,
    scope: LatticeScope,
}

/// A lattice element: the join of a set of atoms, stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeElement {
    mask: u128,
}

impl LatticeElement {
    pub const BOTTOM: LatticeElement = LatticeElement { mask: 0 };

    pub fn from_mask(mask: u128) -> Self {
        Self { mask }
    }

    pub fn atom(index: usize) -> Self {
        Self { mask: 1u128 << index }
    }

    pub fn from_atoms(indices: &[usize]) -> Self {
        Self { mask: indices.iter().fold(0, |m, &i| m | (1u128 << i)) }
    }

    pub fn top(atom_count: usize) -> Self {
        if atom_count >= 128 {
            Self { mask: u128::MAX }
        } else {
            Self { mask: (1u128 << atom_count) - 1 }
        }
    }

    pub fn mask(&self) -> u128 {
        self.mask
    }

    pub fn contains(&self, atom: usize) -> bool {
        atom < 128 && (self.mask >> atom) & 1 == 1
    }

    pub fn join(self, other: Self) -> Self {
        Self { mask: self.mask | other.mask }
    }

    pub fn meet(self, other: Self) -> Self {
        Self { mask: self.mask & other.mask }
    }

    pub fn complement(self, atom_count: usize) -> Self {
        Self { mask: !self.mask & Self::top(atom_count).mask }
    }

    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        (0..128).filter(move |&i| self.contains(i))
    }
}

impl DefiniteLattice {
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn scope(&self) -> LatticeScope {
        self.scope
    }

    /// Report name of atom `k`: `w_i` for factor lattices, otherwise
    /// `psi_r{i}`, `perp_r{i}` or `r_{i}`.
    pub fn atom_name(&self, k: usize) -> String {
        let label = self.atoms[k].label;
        match (self.scope, label) {
            (LatticeScope::LeftFactor { .. }, l) => format!("w_{}", l.eigenspace()),
            (LatticeScope::Whole, AtomLabel::PsiProjection(i)) => format!("psi_r{i}"),
            (LatticeScope::Whole, AtomLabel::ComplementInEigenspace(i)) => format!("perp_r{i}"),
            (LatticeScope::Whole, AtomLabel::WholeEigenspace(i)) => format!("r_{i}"),
        }
    }

    /// Number of lattice elements, `2^m`, if it fits in a `u128`.
    pub fn element_count(&self) -> Option<u128> {
        1u128.checked_shl(self.atoms.len() as u32)
    }

    fn check_element(&self, e: LatticeElement) -> Result<()> {
        if self.atoms.len() > MAX_ELEMENT_ATOMS {
            return domain(format!("lattice elements are addressable only up to {MAX_ELEMENT_ATOMS} atoms"));
        }
        if e.mask & !LatticeElement::top(self.atoms.len()).mask != 0 {
            return domain("lattice element refers to atoms that do not exist");
        }
        Ok(())
    }

    /// Subspace of a lattice element (span of its atoms).
    pub fn element_subspace(&self, e: LatticeElement) -> Result<Subspace> {
        self.check_element(e)?;
        let chosen: Vec<&Atom> = e.atoms().map(|i| &self.atoms[i]).collect();
        let r: usize = chosen.iter().map(|a| a.subspace.rank()).sum();
        let mut m = CMatrix::zeros(self.ambient_dim, r);
        let mut col = 0;
        for a in chosen {
            let k = a.subspace.rank();
            m.columns_mut(col, k).copy_from(a.subspace.basis());
            col += k;
        }
        Ok(Subspace::from_spanning(&m, 1e-8))
    }

    /// `max_{a≠b} ‖P_a P_b‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[i + 1..] {
                worst = worst.max((a.subspace.basis().adjoint() * b.subspace.basis()).norm());
            }
        }
        worst
    }

    /// `‖Σ_a P_a - I‖_F`.
    pub fn completeness_defect(&self) -> f64 {
        let n = self.ambient_dim;
        let sum = self.atoms.iter().fold(CMatrix::zeros(n, n), |acc, a| acc + a.subspace.projector());
        (sum - CMatrix::identity(n, n)).norm()
    }

    /// `max_{a,b} ‖[P_a, P_b]‖_F`. Elements are sums of atom projectors, so
    /// this bounds every commutator in the lattice.
    pub fn commutator_defect(&self) -> f64 {
        let projectors: Vec<CMatrix> = self.atoms.iter().map(|a| a.subspace.projector()).collect();
        let mut worst = 0.0_f64;
        for i in 0..projectors.len() {
            for j in i + 1..projectors.len() {
                let c = &projectors[i] * &projectors[j] - &projectors[j] * &projectors[i];
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// If `p` is (within `subspace_eq_tol`) a join of atoms, returns that
    /// element.
    pub fn element_of(&self, p: &Subspace, subspace_eq_tol: f64) -> Result<Option<LatticeElement>> {
        if p.ambient_dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch { expected: self.ambient_dim, found: p.ambient_dim() });
        }
        let proj = p.projector();
        let mut mask = 0u128;
        for (k, a) in self.atoms.iter().enumerate().take(MAX_ELEMENT_ATOMS) {
            // fraction of the atom inside p
            let inside = (a.subspace.basis().adjoint() * &proj * a.subspace.basis()).trace().re / a.subspace.rank() as f64;
            if inside > 0.5 {
                mask |= 1 << k;
            }
        }
        let e = LatticeElement::from_mask(mask);
        Ok(self.element_subspace(e)?.approx_eq(p, subspace_eq_tol).then_some(e))
    }

    fn sorted(mut atoms: Vec<Atom>, rank_tol: f64) -> Vec<Atom> {
        let kind = |l: &AtomLabel| match l {
            AtomLabel::PsiProjection(_) => 0,
            AtomLabel::ComplementInEigenspace(_) => 1,
            AtomLabel::WholeEigenspace(_) => 2,
        };
        atoms.sort_by_key(|a| (a.label.eigenspace(), kind(&a.label)));
        let key = |w: f64| if w < rank_tol { 0.0 } else { w };
        atoms.sort_by(|a, b| key(b.weight).total_cmp(&key(a.weight)));
        atoms
    }
}

/// The lattice generated by `{0, ψ_{r_i}, ψ_{r_i}^⊥ ∧ r_i, r_i}` over the
/// eigenspaces `r_i` of `r`.
///
/// A projection with weight below `rank_tol` counts as zero and its
/// eigenspace becomes one atom; a one-dimensional eigenspace is always a
/// single atom. Atoms are ordered by descending weight, then eigenspace
/// index.
pub fn definite_lattice(state: &PureState, r: &HermitianOperator, tol: &Tolerances) -> Result<DefiniteLattice> {
    let n = state.dim();
    if r.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: r.dim() });
    }
    HermitianOperator::new(r.matrix().clone(), tol.herm_tol)?;

    let mut atoms = Vec::new();
    for (i, es) in r.eigenspaces(tol.cluster_tol).into_iter().enumerate() {
        let (component, weight) = project_state(state, &es.subspace)?;
        if weight < tol.rank_tol || es.subspace.rank() == 1 {
            atoms.push(Atom { subspace: es.subspace, label: AtomLabel::WholeEigenspace(i), weight });
            continue;
        }
        let ray = Subspace::ray(&component)?;
        let u = ray.basis();
        let rest = es.subspace.basis() - u * (u.adjoint() * es.subspace.basis());
        // singular values of `rest` are 1 (rank - 1 times) and 0
        let complement = Subspace::from_spanning(&rest, 0.5);
        let complement_weight = project_state(state, &complement)?.1;
        atoms.push(Atom { subspace: ray, label: AtomLabel::PsiProjection(i), weight });
        atoms.push(Atom { subspace: complement, label: AtomLabel::ComplementInEigenspace(i), weight: complement_weight });
    }
    Ok(DefiniteLattice { ambient_dim: n, atoms: DefiniteLattice::sorted(atoms, tol.rank_tol), scope: LatticeScope::Whole })
}

/// The orthodox lattice `{0, ψ, ψ^⊥, H}` (preferred observable = identity).
pub fn orthodox_lattice(state: &PureState, tol: &Tolerances) -> Result<DefiniteLattice> {
    definite_lattice(state, &HermitianOperator::identity(state.dim()), tol)
}

/// Definite properties of the first factor of a bipartite state: the
/// eigenspaces of the reduced density operator `W₁`, including its null
/// space as one atom. Eigenvalues below `rank_tol` count as null.
pub fn modal_lattice(state: &PureState, tol: &Tolerances) -> Result<DefiniteLattice> {
    state.require_factors(2)?;
    let (d1, d2) = (state.dims()[0], state.dims()[1]);
    let w1 = state.partial_trace(0)?;
    let mut atoms = Vec::new();
    for (i, es) in eigenspaces_with_null_floor(&w1, tol).into_iter().enumerate() {
        let weight = project_state(state, &es.tensor_identity(d2))?.1;
        atoms.push(Atom { subspace: es, label: AtomLabel::WholeEigenspace(i), weight });
    }
    Ok(DefiniteLattice {
        ambient_dim: d1,
        atoms: DefiniteLattice::sorted(atoms, tol.rank_tol),
        scope: LatticeScope::LeftFactor { right_dim: d2 },
    })
}

fn eigenspaces_with_null_floor(w1: &HermitianOperator, tol: &Tolerances) -> Vec<Subspace> {
    let spaces = w1.eigenspaces(tol.cluster_tol);
    let (kept, null): (Vec<_>, Vec<_>) = spaces.into_iter().partition(|e| e.eigenvalue >= tol.rank_tol);
    let mut out: Vec<Subspace> = kept.into_iter().map(|e| e.subspace).collect();
    if !null.is_empty() {
        let n = w1.dim();
        let r: usize = null.iter().map(|e| e.subspace.rank()).sum();
        let mut m = CMatrix::zeros(n, r);
        let mut col = 0;
        for e in &null {
            m.columns_mut(col, e.subspace.rank()).copy_from(e.subspace.basis());
            col += e.subspace.rank();
        }
        out.push(Subspace::from_spanning(&m, 0.5));
    }
    out
}

/// Second route to [`modal_lattice`]: build the full lattice for the
/// preferred observable `W₁ ⊗ I` and keep only elements of the form
/// `P ⊗ I`.
///
/// Minimal elements of that form are found by closure: starting from one
/// atom, take the support `P` of the partial trace of the current element,
/// pull in every atom overlapping `P ⊗ I`, and repeat until the element
/// equals `P ⊗ I`.
pub fn modal_lattice_by_restriction(state: &PureState, tol: &Tolerances) -> Result<DefiniteLattice> {
    state.require_factors(2)?;
    let (d1, d2) = (state.dims()[0], state.dims()[1]);
    let r = state.partial_trace(0)?.tensor_identity(d2);
    let full = definite_lattice(state, &r, tol)?;
    let m = full.atom_count();
    if m > MAX_ELEMENT_ATOMS {
        return domain(format!("restriction supports at most {MAX_ELEMENT_ATOMS} atoms"));
    }

    let mut assigned = vec![false; m];
    let mut atoms = Vec::new();
    for seed in 0..m {
        if assigned[seed] {
            continue;
        }
        let mut element = LatticeElement::atom(seed);
        let factor = loop {
            let pi = full.element_subspace(element)?;
            let reduced = partial_trace_right(&pi.projector(), d1, d2);
            let support = Subspace::from_spanning(&reduced, 1e-8);
            let lifted = support.tensor_identity(d2);
            let lp = lifted.projector();
            let mut grown = element;
            for (k, a) in full.atoms.iter().enumerate() {
                let overlap = (a.subspace.basis().adjoint() * &lp * a.subspace.basis()).trace().re;
                if overlap > 1e-6 {
                    grown = grown.join(LatticeElement::atom(k));
                }
            }
            if grown == element {
                if !lifted.approx_eq(&pi, tol.subspace_eq_tol) {
                    return domain("restriction closure did not reach an element of the form P ⊗ I");
                }
                break support;
            }
            element = grown;
        };
        let mut weight = 0.0;
        let mut eigenspace = usize::MAX;
        for k in element.atoms() {
            assigned[k] = true;
            weight += full.atoms[k].weight;
            eigenspace = eigenspace.min(full.atoms[k].label.eigenspace());
        }
        atoms.push(Atom { subspace: factor, label: AtomLabel::WholeEigenspace(eigenspace), weight });
    }
    Ok(DefiniteLattice {
        ambient_dim: d1,
        atoms: DefiniteLattice::sorted(atoms, tol.rank_tol),
        scope: LatticeScope::LeftFactor { right_dim: d2 },
    })
}

/// `tr₂` of an operator on `C^{d1} ⊗ C^{d2}`.
fn partial_trace_right(op: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    CMatrix::from_fn(d1, d1, |a, b| (0..d2).map(|j| op[(a * d2 + j, b * d2 + j)]).sum())
}

/// One projector per degeneracy cluster: the cluster's left subspace.
pub fn degenerate_property_projectors(sd: &SchmidtDecomposition) -> Vec<Subspace> {
    sd.clusters.iter().map(|c| c.left_basis.clone()).collect()
}

/// Two-valued homomorphism that makes atom `true_atom` true.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueHomomorphism {
    pub true_atom: usize,
    pub atom_count: usize,
}

impl ValueHomomorphism {
    /// Truth value of an element: true iff it contains the true atom.
    pub fn value(&self, e: LatticeElement) -> bool {
        e.contains(self.true_atom)
    }

    /// Checks the homomorphism laws. Exhaustive over all elements and
    /// element pairs when `atom_count ≤ 12`; otherwise `samples` random
    /// pairs drawn from `rng`.
    pub fn check_laws<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> LawReport {
        let m = self.atom_count;
        let top = LatticeElement::top(m);
        let mut report = LawReport::default();
        let check = |ok: bool, report: &mut LawReport| {
            report.checks += 1;
            if !ok {
                report.violations += 1;
            }
        };
        let true_atoms = (0..m).filter(|&a| self.value(LatticeElement::atom(a))).count();
        check(true_atoms == 1, &mut report);
        check(!self.value(LatticeElement::BOTTOM), &mut report);
        check(self.value(top), &mut report);

        let pair = |x: LatticeElement, y: LatticeElement, report: &mut LawReport| {
            let (vx, vy) = (self.value(x), self.value(y));
            check(self.value(x.join(y)) == (vx || vy), report);
            check(self.value(x.meet(y)) == (vx && vy), report);
        };
        if m <= EXHAUSTIVE_LAW_ATOMS {
            let count = 1u128 << m;
            for x in 0..count {
                let ex = LatticeElement::from_mask(x);
                check(self.value(ex.complement(m)) != self.value(ex), &mut report);
                for y in 0..count {
                    pair(ex, LatticeElement::from_mask(y), &mut report);
                }
            }
        } else {
            let random = |rng: &mut R| LatticeElement::from_mask(rng.gen::<u128>() & top.mask());
            for _ in 0..samples {
                let (x, y) = (random(rng), random(rng));
                check(self.value(x.complement(m)) != self.value(x), &mut report);
                pair(x, y, &mut report);
            }
        }
        report
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LawReport {
    pub checks: u64,
    pub violations: u64,
}

impl LawReport {
    pub fn holds(&self) -> bool {
        self.violations == 0 && self.checks > 0
    }
}

/// All two-valued homomorphisms of the lattice: exactly one per atom.
pub fn enumerate_homomorphisms(lat: &DefiniteLattice) -> Vec<ValueHomomorphism> {
    let m = lat.atom_count();
    (0..m).map(|true_atom| ValueHomomorphism { true_atom, atom_count: m }).collect()
}

/// Outcome of the Bub–Clifton membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BubClifton {
    /// Definite in the Bub–Clifton set; `in_lattice` tells whether it is
    /// also an element of the individually-definable lattice.
    Definite { in_lattice: bool },
    NotDefinite,
    /// Neither clause applies (straddles zero-weight components other than
    /// whole null eigenspaces); the comparison is not decided here.
    Unspecified,
}

impl BubClifton {
    pub fn is_member(&self) -> Option<bool> {
        match self {
            BubClifton::Definite { .. } => Some(true),
            BubClifton::NotDefinite => Some(false),
            BubClifton::Unspecified => None,
        }
    }
}

impl fmt::Display for BubClifton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BubClifton::Definite { in_lattice: true } => write!(f, "definite"),
            BubClifton::Definite { in_lattice: false } => write!(f, "definite-bub-clifton-only"),
            BubClifton::NotDefinite => write!(f, "not-definite"),
            BubClifton::Unspecified => write!(f, "unspecified"),
        }
    }
}

/// Whether `p` belongs to the Bub–Clifton definite set for `(state, r)`.
///
/// Joins of atoms are members. Inside an eigenspace that the state does not
/// reach, any subspace is accepted. A subspace that fails to commute with,
/// or splits, a positive-weight atom is rejected.
pub fn bub_clifton_membership(state: &PureState, r: &HermitianOperator, p: &Subspace, tol: &Tolerances) -> Result<BubClifton> {
    let lat = definite_lattice(state, r, tol)?;
    if p.ambient_dim() != lat.ambient_dim() {
        return Err(Error::DimensionMismatch { expected: lat.ambient_dim(), found: p.ambient_dim() });
    }
    let pp = p.projector();
    let commutes = |a: &Atom, q: &CMatrix| {
        let pa = a.subspace.projector();
        (q * &pa - &pa * q).norm() < tol.subspace_eq_tol
    };
    let inside = |a: &Atom, q: &CMatrix| (a.subspace.basis().adjoint() * q * a.subspace.basis()).trace().re;

    let (positive, null): (Vec<&Atom>, Vec<&Atom>) = lat.atoms().iter().partition(|a| a.weight >= tol.rank_tol);
    let mut rest = pp.clone();
    for a in &positive {
        if !commutes(a, &pp) {
            return Ok(BubClifton::NotDefinite);
        }
        let k = inside(a, &pp);
        let r = a.subspace.rank() as f64;
        if (k - r).abs() < 0.5 {
            rest -= a.subspace.projector();
        } else if k.abs() >= 0.5 {
            return Ok(BubClifton::NotDefinite);
        }
    }

    let mut in_lattice = true;
    for a in &null {
        if !commutes(a, &rest) {
            return Ok(BubClifton::Unspecified);
        }
        let k = inside(a, &rest);
        let r = a.subspace.rank() as f64;
        let whole_or_nothing = (k - r).abs() < 0.5 || k.abs() < 0.5;
        if !whole_or_nothing {
            match a.label {
                AtomLabel::WholeEigenspace(_) => in_lattice = false,
                _ => return Ok(BubClifton::Unspecified),
            }
        }
    }
    Ok(BubClifton::Definite { in_lattice })
}
