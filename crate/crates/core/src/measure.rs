//! The Born measure on a definite lattice, the coarse-graining additivity
//! test that singles it out, and seeded actualization sampling.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::hilbert::{kron_vec, project_state, PureState};
use crate::lattice::{modal_lattice, DefiniteLattice, LatticeElement, LatticeScope, ValueHomomorphism};
use crate::random::{rng_from_seed, Prng};
use crate::schmidt::decompose;
use crate::tolerance::Tolerances;
use crate::{CVector, C64};

/// Probability of each lattice atom.
#[derive(Debug, Clone, PartialEq)]
pub struct BornMeasure {
    pub atom_weights: Vec<f64>,
}

impl BornMeasure {
    pub fn total(&self) -> f64 {
        self.atom_weights.iter().sum()
    }

    /// Weight of a lattice element: the sum over its atoms.
    pub fn element_weight(&self, e: LatticeElement) -> f64 {
        e.atoms().take_while(|&i| i < self.atom_weights.len()).map(|i| self.atom_weights[i]).sum()
    }
}

/// One actualized atom together with the seed that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueAssignment {
    pub homomorphism: ValueHomomorphism,
    pub seed: u64,
}

/// `⟨ψ|P|ψ⟩` for every atom (`⟨ψ|P⊗I|ψ⟩` for factor lattices).
pub fn born_measure(state: &PureState, lat: &DefiniteLattice) -> Result<BornMeasure> {
    let lift = match lat.scope() {
        LatticeScope::Whole => {
            if state.dim() != lat.ambient_dim() {
                return Err(Error::DimensionMismatch { expected: lat.ambient_dim(), found: state.dim() });
            }
            None
        }
        LatticeScope::LeftFactor { right_dim } => {
            if state.dims() != [lat.ambient_dim(), right_dim] {
                return domain(format!(
                    "lattice acts on factor 1 of a {}x{} system but the state has dims {:?}",
                    lat.ambient_dim(),
                    right_dim,
                    state.dims()
                ));
            }
            Some(right_dim)
        }
    };
    let atom_weights = lat
        .atoms()
        .iter()
        .map(|a| {
            let s = match lift {
                Some(d) => a.subspace.tensor_identity(d),
                None => a.subspace.clone(),
            };
            project_state(state, &s).map(|(_, w)| w)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BornMeasure { atom_weights })
}

/// Merges the Schmidt terms listed in `merge` (zero-based, descending-weight
/// order) into a single term:
///
/// `|χ⟩ = Σ_{k∉merge} c_k|α_k⟩⊗|β_k⟩ + √(Σ_{k∈merge}|c_k|²)·|α⟩⊗|β_m⟩`
///
/// where `m` is the smallest merged index and
/// `|α⟩ ∝ Σ_{k∈merge} c_k|α_k⟩`.
pub fn coarse_grain(state: &PureState, merge: &[usize], tol: &Tolerances) -> Result<PureState> {
    let sd = decompose(state, tol)?;
    if !sd.is_non_degenerate() {
        return domain("coarse graining needs a non-degenerate Schmidt spectrum");
    }
    let terms: Vec<(C64, CVector, CVector)> = sd.terms().collect();
    let merged: BTreeSet<usize> = merge.iter().copied().collect();
    if merged.len() != merge.len() {
        return domain("merge indices must be distinct");
    }
    if merged.len() < 2 {
        return domain("at least two Schmidt indices must be merged");
    }
    if let Some(&bad) = merged.iter().find(|&&k| k >= terms.len()) {
        return domain(format!("merge index {bad} out of range for Schmidt rank {}", terms.len()));
    }

    let mut chi = CVector::zeros(state.dim());
    for (k, (c, a, b)) in terms.iter().enumerate() {
        if !merged.contains(&k) {
            chi += kron_vec(a, b) * *c;
        }
    }
    let first = *merged.iter().next().unwrap();
    let mut alpha = CVector::zeros(sd.left_dim);
    for &k in &merged {
        alpha += &terms[k].1 * terms[k].0;
    }
    let merged_weight: f64 = merged.iter().map(|&k| terms[k].0.norm_sqr()).sum();
    alpha.unscale_mut(alpha.norm());
    chi += kron_vec(&alpha, &terms[first].2) * C64::new(merged_weight.sqrt(), 0.0);
    PureState::normalized(state.dims().to_vec(), chi)
}

/// `|f(Σw) - Σf(w)|`.
pub fn additivity_defect(weights: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let total: f64 = weights.iter().sum();
    (f(total) - weights.iter().map(|&w| f(w)).sum::<f64>()).abs()
}

/// True iff `f` satisfies the coarse-graining equation on this partition to
/// within `add_tol`.
pub fn additivity_check(weights: &[f64], f: impl Fn(f64) -> f64, add_tol: f64) -> bool {
    additivity_defect(weights, f) < add_tol
}

/// Random partition of a total weight in `[0.5, 1]` into 2 to 6 parts whose
/// sizes differ by at most a factor of 10.
pub fn random_partition<R: Rng + ?Sized>(rng: &mut R) -> Vec<f64> {
    let parts = rng.gen_range(2..=6);
    let total = rng.gen_range(0.5..=1.0);
    let raw: Vec<f64> = (0..parts).map(|_| rng.gen_range(0.1..=1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| total * x / sum).collect()
}

/// Multiplies Schmidt term `k` by `exp(i·phases[k])` and checks that the
/// factor-1 lattice and its Born weights are unchanged.
pub fn phase_invariance_check(state: &PureState, phases: &[f64], tol: &Tolerances) -> Result<bool> {
    let sd = decompose(state, tol)?;
    if phases.len() != sd.schmidt_rank() {
        return Err(Error::DimensionMismatch { expected: sd.schmidt_rank(), found: phases.len() });
    }
    let mut rotated = CVector::zeros(state.dim());
    for ((c, a, b), &phi) in sd.terms().zip(phases) {
        rotated += kron_vec(&a, &b) * (c * C64::from_polar(1.0, phi));
    }
    let rotated = PureState::normalized(state.dims().to_vec(), rotated)?;
    same_modal_content(state, &rotated, tol)
}

/// Whether two bipartite states have the same factor-1 lattice atoms and
/// Born weights.
pub(crate) fn same_modal_content(a: &PureState, b: &PureState, tol: &Tolerances) -> Result<bool> {
    let (la, lb) = (modal_lattice(a, tol)?, modal_lattice(b, tol)?);
    if la.atom_count() != lb.atom_count() {
        return Ok(false);
    }
    let (ma, mb) = (born_measure(a, &la)?, born_measure(b, &lb)?);
    let atoms_match = la.atoms().iter().zip(lb.atoms()).all(|(x, y)| x.subspace.approx_eq(&y.subspace, tol.subspace_eq_tol));
    let weights_match = ma.atom_weights.iter().zip(&mb.atom_weights).all(|(x, y)| (x - y).abs() <= tol.norm_tol);
    Ok(atoms_match && weights_match)
}

/// Draws one atom index by inverse CDF over the weights in atom order.
pub fn draw_atom<R: Rng + ?Sized>(measure: &BornMeasure, rng: &mut R) -> Result<usize> {
    let total = measure.total();
    if !(total > 0.0 && total.is_finite()) || measure.atom_weights.iter().any(|w| *w < 0.0) {
        return domain(format!("cannot sample from a measure with total weight {total}"));
    }
    let u = rng.gen::<f64>() * total;
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (k, &w) in measure.atom_weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = k;
        }
        cumulative += w;
        if u < cumulative {
            return Ok(k);
        }
    }
    Ok(last_positive)
}

/// Samples the atom that carries the value 1.
pub fn sample_assignment(measure: &BornMeasure, lat: &DefiniteLattice, seed: u64) -> Result<ValueAssignment> {
    check_sizes(measure, lat)?;
    let mut rng = rng_from_seed(seed);
    let true_atom = draw_atom(measure, &mut rng)?;
    Ok(ValueAssignment { homomorphism: ValueHomomorphism { true_atom, atom_count: lat.atom_count() }, seed })
}

/// Per-atom counts over `n` draws from one seeded stream.
pub fn sample_counts(measure: &BornMeasure, n: u64, seed: u64) -> Result<Vec<u64>> {
    let mut rng: Prng = rng_from_seed(seed);
    let mut counts = vec![0u64; measure.atom_weights.len()];
    for _ in 0..n {
        counts[draw_atom(measure, &mut rng)?] += 1;
    }
    Ok(counts)
}

fn check_sizes(measure: &BornMeasure, lat: &DefiniteLattice) -> Result<()> {
    if measure.atom_weights.len() != lat.atom_count() {
        return Err(Error::DimensionMismatch { expected: lat.atom_count(), found: measure.atom_weights.len() });
    }
    Ok(())
}
