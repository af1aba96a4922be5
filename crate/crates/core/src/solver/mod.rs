//! Time integration of the variable-density, variable-viscosity
//! incompressible Navier-Stokes system on the periodic box.

mod density;
mod momentum;
mod run;
mod stepper;
mod viscosity;

pub use density::{advect_density, cfl_number, AdvectionScheme, DensityField};
pub(crate) use density::{check_cfl, transport_nodal};
pub use momentum::{
    force_decomposition, momentum_rhs, tendency, FlowState, ForceDecomposition, ProjectionOptions,
    Tendency,
};
pub use run::{
    initial_state, integrate, read_diagnostics, read_snapshot, read_snapshot_fields, run,
    step_options, write_snapshot, Sample, ShellSpectra, Trajectory, DIAGNOSTIC_COLUMNS,
    EXTRA_COLUMNS,
};
pub use stepper::{step, StepOptions, Stepper};
pub use viscosity::ViscosityLaw;
