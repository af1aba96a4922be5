//! Pseudo-spectral simulation of the 2D incompressible inhomogeneous
//! Navier-Stokes equations with density-dependent viscosity, together with a
//! numerical Littlewood-Paley toolkit and a harness that measures decay
//! rates, weighted energy ladders, transport regularity growth and the
//! explicit smallness constants.
//!
//! Module map:
//! - [`spectral`]: grid, FFTs, derivatives, Leray/Riesz projectors, norms.
//! - [`besov`]: dyadic blocks, Besov and log-Besov norms, Bony paraproducts,
//!   Bernstein and heat-block checks.
//! - [`solver`]: density transport and variable-viscosity momentum stepping.
//! - [`harness`]: initial data, decay fits, Fourier splitting, energy
//!   ledgers, the `K`/`G` constants and the smallness check.
//! - [`transport`]: block-wise transport experiments and the product law.
//! - [`analysis`]: Gronwall bound and the calculus integrals.
//! - [`config`], [`report`]: experiment configuration and output files.

pub mod analysis;
pub mod besov;
pub mod config;
pub mod error;
pub mod harness;
pub mod par;
pub mod random;
pub mod report;
pub mod solver;
pub mod spectral;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};
pub use par::Execution;

/// Version string embedded in every report.
pub const VERSION: &str = concat!("lpdecay ", env!("CARGO_PKG_VERSION"));
