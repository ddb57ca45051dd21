//! Operator-algebraic harmonic analysis on the boundary of a free group.
//!
//! The crate computes transfer operators on tuples of positive operators,
//! Hilbert-Schmidt trace pairings, Abel limits and Schur orthogonality
//! relations for the unitary principal series of a free group realized on
//! `L^2` of its boundary, and checks their identities numerically.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod freegroup;
pub mod goodvec;
pub mod opalg;
pub mod par;
pub mod realize;
pub mod reps;
pub mod schur;
pub mod transfer;

pub use error::{Error, Result};
