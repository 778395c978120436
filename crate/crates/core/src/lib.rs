//! Local-degree adiabatic annealing for maximum independent set on simulated
//! Rydberg atom arrays.
//!
//! The crate covers the full pipeline:
//!
//! - [`graph`]: disordered King's-graph / unit-disk instance generation with
//!   degree bookkeeping.
//! - [`mis`]: exact independent-set enumeration, branch-and-bound MIS, and
//!   connected/disconnected classification of near-optimal sets.
//! - [`detuning`]: degree-dependent detuning engineering — profile families,
//!   the band difference function, and the critical `(k*, a*)` search.
//! - [`dynamics`]: time-dependent state-vector evolution of the Rydberg
//!   Hamiltonian, final-time band spectra, and minimal-gap scans.
//! - [`metrics`]: success probability, approximation ratio, hardness
//!   parameters, correlation statistics, and power-law fits.
//! - [`harness`]: reproducible paired-protocol benchmark runs with CSV/JSON
//!   outputs.

pub mod detuning;
pub mod dynamics;
mod error;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod mis;

pub use error::{Error, Result};
