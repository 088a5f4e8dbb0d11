//! Interior-penalty discontinuous Galerkin discretization of the Helmholtz
//! scattering problem on triangular meshes, together with the sparse
//! machinery needed to study LU fill-in: fill-reducing orderings (AMD,
//! nested dissection, reverse Cuthill-McKee), a left-looking sparse LU and
//! an experiment harness that tabulates the resulting fill.

pub mod assembly;
pub mod error;
pub mod lufact;
pub mod mesh;
pub mod ordering;
pub mod report;
pub mod sparse;

pub use error::{Error, Result};
pub use num_complex::Complex64;
