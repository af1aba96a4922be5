use serde::{Deserialize, Serialize};

use super::density::{check_cfl, semi_lagrangian, transport_tendency, AdvectionScheme, DensityField};
use super::momentum::{integrating_factor, tendency, viscous_diagonal, FlowState, ProjectionOptions, Tendency};
use super::viscosity::ViscosityLaw;
use crate::error::{Error, Result};
use crate::spectral::{SpectralField, VelocityField};

/// Knobs of the time integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepOptions {
    pub projection: ProjectionOptions,
    pub cfl_max: f64,
    pub scheme: AdvectionScheme,
    /// Drop `rho u . grad u` (linear Stokes-type flow).
    pub nonlinear: bool,
    /// Density overshoot tolerance as a fraction of the initial range.
    pub overshoot: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions {
            projection: ProjectionOptions::default(),
            cfl_max: 0.5,
            scheme: AdvectionScheme::Spectral,
            nonlinear: true,
            overshoot: 1e-3,
        }
    }
}

/// Integrating-factor RK2 for the momentum equation, coupled to an RK2 (or
/// semi-Lagrangian) density update in the same stages.
///
/// With `nu = mu0 / rho_ref` and `E = exp(nu dt Delta)`, writing
/// `u_t = nu Delta u + N(u, rho)`:
/// `u* = E(u + dt N1)`, `u' = E u + dt/2 (E N1 + N2)`.
#[derive(Clone, Debug)]
pub struct Stepper {
    law: ViscosityLaw,
    opts: StepOptions,
    lo: f64,
    hi: f64,
    delta: f64,
}

impl Stepper {
    /// Density bounds are frozen from `rho0`. The spectral scheme moves the
    /// band-limited field off the nodes, so its bounds come from a 4x finer
    /// evaluation of the same polynomial; the semi-Lagrangian scheme keeps
    /// the nodal bounds exactly.
    pub fn new(law: ViscosityLaw, opts: StepOptions, rho0: &DensityField) -> Result<Self> {
        let (mut lo, mut hi) = (rho0.min(), rho0.max());
        if opts.scheme == AdvectionScheme::Spectral {
            let fine = rho0.to_spectral().resampled(4 * rho0.grid().n())?.to_nodal();
            lo = fine.iter().copied().fold(lo, f64::min);
            hi = fine.iter().copied().fold(hi, f64::max);
        }
        law.validate(lo, hi)?;
        let delta = (opts.overshoot * (hi - lo)).max(1e-12 * hi);
        Ok(Stepper { law, opts, lo, hi, delta })
    }

    pub fn law(&self) -> &ViscosityLaw {
        &self.law
    }

    pub fn options(&self) -> &StepOptions {
        &self.opts
    }

    /// `(lo - delta, hi + delta)`.
    pub fn density_window(&self) -> (f64, f64) {
        (self.lo - self.delta, self.hi + self.delta)
    }

    pub fn tendency(&self, state: &FlowState) -> Result<Tendency> {
        tendency(state, &self.law, self.opts.projection, self.opts.nonlinear)
    }

    fn check_density(&self, rho: &[f64]) -> Result<()> {
        let min = rho.iter().copied().fold(f64::INFINITY, f64::min);
        let max = rho.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = self.density_window();
        if min < lo || max > hi || !(min > 0.0) {
            return Err(Error::DensityBounds { lo, hi, min, max });
        }
        Ok(())
    }

    /// Advances `state` by `dt`; also returns the tendency evaluated at the
    /// incoming state so callers can record diagnostics without recomputing.
    pub fn advance(&self, state: &FlowState, dt: f64) -> Result<(FlowState, Tendency)> {
        check_cfl(&state.u, dt, self.opts.cfl_max)?;
        let grid = *state.grid();
        let t1 = self.tendency(state)?;
        let nu = self.law.mu0() / t1.rho_ref;

        let mut n1 = t1.ut.clone();
        n1.axpy(-1.0, &viscous_diagonal(&state.u, nu));
        let mut pred = state.u.clone();
        pred.axpy(dt, &n1);
        let u_star = integrating_factor(&pred, nu * dt);

        let un = state.u.to_nodal();
        let rho_n = state.rho.nodal();
        let (rho_star, r1) = match self.opts.scheme {
            AdvectionScheme::Spectral => {
                let r1 = transport_tendency(rho_n, &un, grid);
                let mut s = state.rho.to_spectral();
                s.axpy(dt, &r1);
                (s.to_nodal(), Some(r1))
            }
            AdvectionScheme::SemiLagrangian => (semi_lagrangian(rho_n, &un, grid, dt), None),
        };
        self.check_density(&rho_star)?;
        let rho_star = DensityField::new(grid, rho_star)?;
        let stage = FlowState::new(state.t + dt, u_star, rho_star)?;

        let t2 = self.tendency(&stage)?;
        let mut n2 = t2.ut;
        n2.axpy(-1.0, &viscous_diagonal(&stage.u, nu));

        let mut u_next = integrating_factor(&state.u, nu * dt);
        u_next.axpy(0.5 * dt, &integrating_factor(&n1, nu * dt));
        u_next.axpy(0.5 * dt, &n2);

        let rho_next = match r1 {
            Some(r1) => {
                let r2 = transport_tendency(stage.rho.nodal(), &stage.u.to_nodal(), grid);
                let mut s: SpectralField = state.rho.to_spectral();
                s.axpy(0.5 * dt, &r1);
                s.axpy(0.5 * dt, &r2);
                s.to_nodal()
            }
            None => {
                let mut mid = state.u.clone();
                mid.axpy(1.0, &stage.u);
                let mid: VelocityField = mid.scaled(0.5);
                semi_lagrangian(rho_n, &mid.to_nodal(), grid, dt)
            }
        };
        self.check_density(&rho_next)?;
        let next = FlowState::new(state.t + dt, u_next, DensityField::new(grid, rho_next)?)?;
        Ok((next, t1))
    }
}

/// One step with default options and density bounds taken from `state`.
pub fn step(state: &FlowState, law: &ViscosityLaw, dt: f64) -> Result<FlowState> {
    let stepper = Stepper::new(law.clone(), StepOptions::default(), &state.rho)?;
    Ok(stepper.advance(state, dt)?.0)
}
