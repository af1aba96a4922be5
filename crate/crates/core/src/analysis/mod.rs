//! Scalar inequality utilities: the integral Gronwall bound and the
//! log-weighted calculus integrals, each with a brute-force oracle.

mod calculus;
mod gronwall;

pub use calculus::{
    calculus_integral, calculus_value, format_constants, frozen_constants, frozen_gamma, gamma_key,
    parse_constants, CalculusCase, CalculusValue, GammaSweep, SweepCell,
};
pub use gronwall::{gronwall_bound, gronwall_ode_oracle};
