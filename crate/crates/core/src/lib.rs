//! Rigorous lower/upper bounds on local observables in MPS ground states,
//! computed from a local patch of the tensor network around the observable.
//!
//! The crate builds the four benchmark spin chains, finds their ground
//! states with a two-site DMRG sweep, extracts the local patch subspace,
//! and bounds observables either by the extreme eigenvalues of the
//! projected observable (basic algorithm) or by optimizing over commutator
//! gauges with a semidefinite program (CGO).

extern crate blas_src;

pub mod error;
pub mod exact;
pub mod exec;
pub mod linalg;
pub mod models;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
