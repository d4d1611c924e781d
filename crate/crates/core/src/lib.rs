//! Desk-scale simulation of multiphoton Dicke-state experiments.
//!
//! * [`qstate`]: dense polarization-qubit registers (pure and mixed).
//! * [`dicke`]: Dicke/W/GHZ constructors and navigation by measurement.
//! * [`fock`]: sparse Fock-space model of an SPDC source, splitter network,
//!   loss and sixfold post-selection.
//! * [`witness`]: collective-spin witnesses, see-saw biseparable bounds and
//!   correlator scans.
//! * [`lms`]: Pauli decompositions, local measurement settings and fidelity
//!   estimation from counts.
//! * [`protocols`]: teleportation, telecloning, open-destination
//!   teleportation and secret-sharing figures of merit.
//! * [`sampler`]: seeded coincidence-count generation.
//! * [`reference`]: published values used by comparison reports.

// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod dicke;
pub mod fock;
pub mod lms;
pub mod protocols;
pub mod qstate;
pub mod reference;
pub mod rng;
pub mod sampler;
pub mod witness;

#[cfg(test)]
mod testutil;
