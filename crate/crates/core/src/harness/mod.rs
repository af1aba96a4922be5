//! Decay experiments: initial data, exponent fits, Fourier splitting,
//! weighted energy ledgers and the explicit constants.

mod constants;
mod decay;
mod initial;
mod ledger;
mod splitting;

pub use constants::{
    check_smallness, compute_g, compute_k, g1_terms, g2_terms, k_terms, DataNorms, GValues,
    SmallnessConstants, SmallnessReport,
};
pub use decay::{
    decay_report, default_fit_window, fit_decay_exponent, flat_disk_heat_energy, heat_baseline,
    DecayFit, DecayReport, BOX_VALID_FRACTION, MIN_FIT_SAMPLES,
};
pub use initial::{
    beta, gen_initial_density, gen_initial_velocity, hat_modulus, initial_report,
    velocity_lp_norm, velocity_sobolev_norm, InitialDataSpec, InitialReport, Regularity,
    SpectralProfile,
};
pub use ledger::{energy_ledger, EnergyLedger, LedgerRow, WeightKind, LEDGER_COLUMNS};
pub use splitting::{
    fourier_splitting_check, g_squared, heat_flow_trajectory, splitting_tolerance, sweep_m, SplittingReport,
    SplittingRow,
};
