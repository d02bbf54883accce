//! Exact reconstruction of genus-1 permutation-equivariant quantum K-invariants.
//!
//! The crate is layered bottom-up:
//!
//! * [`ring`]: the cyclotomic field `Q(zeta_12)` and truncated multivariate
//!   power series modelling the local coefficient ring.
//! * [`qfun`]: Laurent polynomials and rational functions in `q` with
//!   K-theory-valued coefficients, jets at roots of unity, residues.
//! * [`correlators`]: the genus-0 point backend, correlator tables and
//!   double-bracket generating functions.
//! * [`reconstruct`]: the fixed-point computation of `tau`, the S-operator,
//!   the Jacobian, the `y` classes and the genus-1 assembly.
//! * [`dmconst`]: closed-form fixed-locus constants and their counting checks.
//! * [`spec`] / [`report`] / [`checks`]: run descriptions, JSON reports and
//!   named invariant suites used by the command-line front end.

pub mod checks;
pub mod correlators;
pub mod dmconst;
pub mod error;
pub mod qfun;
pub mod reconstruct;
pub mod report;
pub mod ring;
pub mod spec;

pub use error::{Error, Result};
