//! Exact single-excitation dynamics of two fiber-coupled cavities, each
//! hosting a magnon mode and a superconducting qubit, together with
//! concurrence analytics and open-system (colored-noise) solvers.
//!
//! Module map:
//!
//! * [`params`]: physical parameters, unit handling, fiber coupling estimate.
//! * [`config`]: TOML schema for the model sections.
//! * [`hilbert`]: single-excitation basis, Hamiltonian, spectral propagation.
//! * [`entanglement`]: reduced two-mode states and concurrence.
//! * [`analytics`]: closed-form optima and numeric peak searches.
//! * [`open`]: OU noise, hierarchy trajectories, pseudomode and Lindblad solvers.
//! * [`exec`]: parallel/sequential execution switch.

// NaN-rejecting `!(x > 0.0)` guards and index loops over fixed-size arrays are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analytics;
pub mod config;
pub mod entanglement;
pub mod error;
pub mod exec;
pub mod hilbert;
pub mod open;
pub mod params;

pub use error::{Error, Result};
pub use exec::Execution;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
