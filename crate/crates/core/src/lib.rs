//! Time-dependent quasi-exactly solvable models built on the Euclidean E₂
//! algebra `[u,J] = iv`, `[v,J] = −iu`, `[u,v] = 0`.
//!
//! The crate covers PT-symmetry classification of non-Hermitian
//! Hamiltonians, time-dependent Dyson maps to Hermitian counterparts,
//! terminating three-term-recurrence spectra, Lewis–Riesenfeld invariants and
//! closed-form three-level observables. Closed forms are paired with an
//! independent numerical path (matrix representation, root finding,
//! quadrature) that checks them.

pub mod algebra;
pub mod dyson;
pub mod error;
pub mod exec;
pub mod invariants;
pub mod model;
pub mod observables;
pub mod qes;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Exec;
