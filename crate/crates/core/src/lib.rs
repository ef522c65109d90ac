//! Numerical kernel for modal interpretations of bipartite pure states:
//! Schmidt decompositions, definite-property lattices, Born measures,
//! envariance, decoherence cross terms and degeneracy stability.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decoherence;
pub mod envariance;
pub mod error;
pub mod hilbert;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod measure;
pub mod random;
pub mod schmidt;
pub mod stability;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;
