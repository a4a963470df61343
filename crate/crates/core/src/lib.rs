//! Exact algebra for local coordinate-wise linear (LCL) code properties.
//!
//! The crate is `no_std` and only needs an allocator. It covers:
//!
//! - [`field`] and [`matrix`]: arithmetic in `F_q` and exact linear algebra
//!   (reduced row echelon form, rank, kernel).
//! - [`subspace`]: canonical subspaces of `F_q^b`, lattice operations and
//!   enumeration of the subspace lattice.
//! - [`profile`] and [`lr`]: local profiles, the degree function, exact
//!   threshold rates, and the list-recovery profile families.
//! - [`witness`]: brute-force decision procedures for clustered word sets,
//!   certification of list-recoverability and profile containment.
//! - [`code`]: random linear codes, random Reed-Solomon codes and the coupling
//!   between the two Reed-Solomon models.
//! - [`poly`]: tuples of polynomials, ranks over `F_q(X)` and the constraint
//!   revelation process used for Reed-Solomon codes.
//! - [`oracle`]: slow, independent reference implementations used to check
//!   everything above.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod code;
pub mod error;
pub mod field;
pub mod lr;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod profile;
pub mod rational;
pub mod subspace;
pub mod witness;

pub use code::{Code, Provenance, RngStream};
pub use error::{Error, Result};
pub use field::{Elem, Field};
pub use lr::{EquivRelation, RecoveryParams};
pub use matrix::{Matrix, Rref};
pub use profile::Profile;
pub use rational::{Rate, Rational};
pub use subspace::Subspace;

/// Default ceiling on the number of objects any exhaustive enumeration may visit.
pub const DEFAULT_CAP: u128 = 10_000_000;
