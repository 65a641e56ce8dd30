//! Fidelity engine for continuous-variable teleportation of photonic and
//! hybrid qubits through (lossy) two-mode squeezed vacuum channels.
//!
//! Everything here is `no_std` + `alloc`: the crate evaluates displacement
//! matrix elements, builds input qubits as short sums of product kets, and
//! integrates characteristic functions against the Gaussian channel kernel
//! `exp(-(Δ/2)|z|²)`. Closed-form average fidelities live in
//! [`closed_form`] and are checked against the quadrature in [`engine`].
//!
//! ```
//! use hybridtele_core::{channel::ChannelSpec, closed_form, engine, qubit::Family};
//!
//! let kernel = ChannelSpec::pair(1.0, 0.0)?.kernel();
//! let quad = engine::QuadratureConfig::default();
//! let avg = engine::fidelity_average(Family::Spq, 0.0, &kernel, &quad, engine::Averaging::AnalyticMoments)?;
//! assert!((avg.value - closed_form::avg_fidelity_spq(&kernel)).abs() < 1e-12);
//! # Ok::<(), hybridtele_core::Error>(())
//! ```
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod channel;
pub mod closed_form;
pub mod engine;
mod error;
pub mod quadrature;
pub mod qubit;
pub mod special;
pub mod threshold;

pub use error::{Error, Result};

/// Fidelity of the best classical (measure-and-prepare) qubit teleportation.
pub const CLASSICAL_LIMIT: f64 = 2.0 / 3.0;
