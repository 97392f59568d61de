//! Parity of modular degrees of elliptic curves over Q.
//!
//! The crate combines a closed-form filter on the conductor and curve
//! invariants with an exact computation of the Hecke algebra of X0(N)
//! modulo 2 for prime levels.

pub mod arith;
pub mod classify;
pub mod cubicfield;
pub mod curve;
pub mod error;
pub mod f2;
pub mod hecke2;
pub mod ingest;
pub mod modsym;
pub mod zlinalg;

pub use error::{Error, Result};
