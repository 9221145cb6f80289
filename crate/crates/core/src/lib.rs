//! Compiler and simulator for the generalized Green Machine (gGM): a time-bin
//! photonic processor that realizes arbitrary N-mode linear-optical unitaries
//! with a single programmable Mach-Zehnder interferometer, a bank of
//! switchable delay lines, and a feedback loop.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! target unitary --mesh--> coupling program --schedule--> hardware schedule
//!                                   |                          |
//!                                   v                          v
//!                             abstract unitary  ==equals==  hwsim transfer matrix
//! ```
//!
//! plus engines that consume either representation: [`noise`] (coherent-error
//! Monte Carlo), [`fock`] (multi-photon interference), [`bsm`] (boosted
//! Bell-state measurement), [`transport`] (stage-resolved photon walks) and
//! [`cost`] (architecture comparison). [`experiments`] bundles the benchmark
//! drivers shared by the CLI and the acceptance suite.

pub mod bsm;
pub mod cost;
pub mod experiments;
pub mod fock;
pub mod hwsim;
pub mod io;
pub mod mesh;
pub mod mzi;
pub mod noise;
pub mod numerics;
pub mod par;
pub mod schedule;
pub mod transport;

mod error;

pub use error::{Error, Result};
