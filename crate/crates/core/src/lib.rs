//! Forward and inverse pricing of vanilla calls under a strike-dependent
//! local volatility.
//!
//! * [`grid_pde`]: the finite-difference engine everything else runs on.
//! * [`pricing`]: backward Black-Scholes, forward Dupire and the
//!   log-moneyness problem, plus the closed-form constant-volatility oracle.
//! * [`carleman`]: the explicit Carleman weight and numerical probes of the
//!   weighted and energy estimates.
//! * [`inverse`]: the linearized system, Dupire inversion, single-slice
//!   calibration and the Lipschitz stability harness.
//! * [`cli_io`]: configuration, file formats and the command pipelines.

pub mod carleman;
pub mod cli_io;
pub mod error;
pub mod grid_pde;
pub mod inverse;
pub mod pricing;

pub use error::{Error, Result};
