use serde::{Deserialize, Serialize};

use super::density::DensityField;
use super::viscosity::ViscosityLaw;
use crate::error::{Error, Result};
use crate::spectral::{
    derivative, gradient_part, heat, laplacian, leray_project, product_nodal, Grid, SpectralField,
    VelocityField,
};

/// Velocity and density at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub u: VelocityField,
    pub rho: DensityField,
}

impl FlowState {
    pub fn new(t: f64, u: VelocityField, rho: DensityField) -> Result<Self> {
        if u.grid() != rho.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(FlowState { t, u, rho })
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    /// `||sqrt(rho) u||^2_{L^2}`.
    pub fn energy(&self) -> f64 {
        weighted_square(self.rho.nodal(), &self.u.to_nodal(), self.grid())
    }
}

/// `int w |v|^2` by the nodal rule.
pub(crate) fn weighted_square(w: &[f64], v: &(Vec<f64>, Vec<f64>), grid: &Grid) -> f64 {
    let s: f64 = w
        .iter()
        .zip(v.0.iter().zip(&v.1))
        .map(|(r, (a, b))| r * (a * a + b * b))
        .sum();
    s * grid.cell_area()
}

/// Stopping rule of the density-weighted projection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions {
            tol: 1e-10,
            max_iterations: 50,
        }
    }
}

type Pair = (SpectralField, SpectralField);

/// Everything the momentum equation yields at one state.
#[derive(Clone, Debug)]
pub struct Tendency {
    /// Divergence-free `u_t`.
    pub ut: VelocityField,
    /// `grad Pi`.
    pub grad_pi: Pair,
    /// `div(mu(rho) M(u))`.
    pub viscous: Pair,
    /// Dealiased `rho u . grad u`.
    pub inertia: Pair,
    /// Reference density used by the projection iteration.
    pub rho_ref: f64,
    pub iterations: usize,
    pub residual: f64,
}

fn pair_l2(p: &Pair) -> f64 {
    (p.0.l2_norm().powi(2) + p.1.l2_norm().powi(2)).sqrt()
}

/// Nodal derivatives `[d1 u1, d2 u1, d1 u2, d2 u2]`.
fn velocity_gradient(u: &VelocityField) -> [Vec<f64>; 4] {
    [
        derivative(u.u1(), 0).to_nodal(),
        derivative(u.u1(), 1).to_nodal(),
        derivative(u.u2(), 0).to_nodal(),
        derivative(u.u2(), 1).to_nodal(),
    ]
}

/// `div(mu(rho) M(u))`: the `mu0` part exactly as `mu0 Delta u`, the rest
/// pseudo-spectrally.
fn viscous_force(u: &VelocityField, grad: &[Vec<f64>; 4], rho: &DensityField, law: &ViscosityLaw) -> Pair {
    let grid = *u.grid();
    let mu0 = law.mu0();
    let mut f1 = laplacian(u.u1()).scaled(mu0);
    let mut f2 = laplacian(u.u2()).scaled(mu0);
    let dmu = rho.map(|r| law.eval(r) - mu0);
    if dmu.iter().any(|&m| m != 0.0) {
        let m11: Vec<f64> = grad[0].iter().map(|v| 2.0 * v).collect();
        let m22: Vec<f64> = grad[3].iter().map(|v| 2.0 * v).collect();
        let m12: Vec<f64> = grad[1].iter().zip(&grad[2]).map(|(a, b)| a + b).collect();
        let s11 = product_nodal(grid, &dmu, &m11);
        let s12 = product_nodal(grid, &dmu, &m12);
        let s22 = product_nodal(grid, &dmu, &m22);
        f1 += &derivative(&s11, 0);
        f1 += &derivative(&s12, 1);
        f2 += &derivative(&s12, 0);
        f2 += &derivative(&s22, 1);
    }
    (f1, f2)
}

/// Dealiased `rho (u . grad) u`.
fn inertia_force(un: &(Vec<f64>, Vec<f64>), grad: &[Vec<f64>; 4], rho: &[f64], grid: Grid) -> Pair {
    let n = grid.len();
    let mut a1 = vec![0.0; n];
    let mut a2 = vec![0.0; n];
    for k in 0..n {
        a1[k] = un.0[k] * grad[0][k] + un.1[k] * grad[1][k];
        a2[k] = un.0[k] * grad[2][k] + un.1[k] * grad[3][k];
    }
    (product_nodal(grid, rho, &a1), product_nodal(grid, rho, &a2))
}

/// Solves `rho u_t = F - grad Pi`, `div u_t = 0` for `u_t` by the fixed
/// point `rho_ref u_t = P[F - (rho - rho_ref) u_t]` with
/// `rho_ref = (max rho + min rho)/2`. The map contracts in `L^2` with factor
/// at most `(max - min)/(max + min)`.
fn weighted_projection(
    force: &Pair,
    rho: &DensityField,
    opts: ProjectionOptions,
) -> Result<(VelocityField, Pair, f64, usize, f64)> {
    let grid = *rho.grid();
    let rho_ref = 0.5 * (rho.max() + rho.min());
    let dev = rho.map(|r| r - rho_ref);
    let mut ut = leray_project(&force.0, &force.1)?.scaled(1.0 / rho_ref);
    if dev.iter().all(|&d| d == 0.0) {
        let gp = gradient_part(&force.0, &force.1)?;
        return Ok((ut, gp, rho_ref, 0, 0.0));
    }
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let (a, b) = ut.to_nodal();
        let rhs = (
            &force.0 - &product_nodal(grid, &dev, &a),
            &force.1 - &product_nodal(grid, &dev, &b),
        );
        let next = leray_project(&rhs.0, &rhs.1)?.scaled(1.0 / rho_ref);
        let mut diff = next.clone();
        diff.axpy(-1.0, &ut);
        let scale = next.l2_norm();
        residual = if scale > 0.0 { diff.l2_norm() / scale } else { 0.0 };
        ut = next;
        if residual <= opts.tol {
            let gp = gradient_part(&rhs.0, &rhs.1)?;
            return Ok((ut, gp, rho_ref, it, residual));
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        residual,
    })
}

/// Full momentum balance at `state`. With `nonlinear = false` the inertia
/// term is dropped (variable-coefficient Stokes flow).
pub fn tendency(
    state: &FlowState,
    law: &ViscosityLaw,
    opts: ProjectionOptions,
    nonlinear: bool,
) -> Result<Tendency> {
    let grid = *state.grid();
    let u = &state.u;
    let grad = velocity_gradient(u);
    let viscous = viscous_force(u, &grad, &state.rho, law);
    let inertia = if nonlinear {
        inertia_force(&u.to_nodal(), &grad, state.rho.nodal(), grid)
    } else {
        (SpectralField::zeros(grid), SpectralField::zeros(grid))
    };
    let force = (&viscous.0 - &inertia.0, &viscous.1 - &inertia.1);
    let (ut, grad_pi, rho_ref, iterations, residual) = weighted_projection(&force, &state.rho, opts)?;
    Ok(Tendency {
        ut,
        grad_pi,
        viscous,
        inertia,
        rho_ref,
        iterations,
        residual,
    })
}

/// `u_t` from the spatial terms of the momentum equation.
pub fn momentum_rhs(state: &FlowState, law: &ViscosityLaw) -> Result<VelocityField> {
    Ok(tendency(state, law, ProjectionOptions::default(), true)?.ut)
}

/// Norms of the projected viscous force, split as in the energy estimates.
#[derive(Clone, Debug)]
pub struct ForceDecomposition {
    /// `||P div(mu M(u))||`
    pub p_div: f64,
    /// `||Q div(mu M(u)) - grad Pi||`
    pub q_div_minus_gradpi: f64,
    /// `||u_t||`
    pub ut_l2: f64,
    pub grad_pi: Pair,
    /// `||P div(mu M) - P(rho u_t + rho u.grad u)||`
    pub p_identity_residual: f64,
    /// `||(Q div(mu M) - grad Pi) - Q(rho u_t + rho u.grad u)||`
    pub q_identity_residual: f64,
    /// `||P(rho u_t + rho u.grad u)||`, the identity-side value of `p_div`.
    pub p_div_identity: f64,
    /// `||Q(rho u_t + rho u.grad u)||`, the identity-side value of `q_div_minus_gradpi`.
    pub q_identity: f64,
}

impl ForceDecomposition {
    pub fn from_tendency(state: &FlowState, t: &Tendency) -> Result<Self> {
        let grid = *state.grid();
        let (pv, qv) = split(&t.viscous)?;
        let q_minus = (&qv.0 - &t.grad_pi.0, &qv.1 - &t.grad_pi.1);

        let (a, b) = t.ut.to_nodal();
        let rho = state.rho.nodal();
        let m = (
            &product_nodal(grid, rho, &a) + &t.inertia.0,
            &product_nodal(grid, rho, &b) + &t.inertia.1,
        );
        let (pm, qm) = split(&m)?;
        let dp = (&pv.0 - &pm.0, &pv.1 - &pm.1);
        let dq = (&q_minus.0 - &qm.0, &q_minus.1 - &qm.1);
        Ok(ForceDecomposition {
            p_div: pair_l2(&pv),
            q_div_minus_gradpi: pair_l2(&q_minus),
            ut_l2: t.ut.l2_norm(),
            grad_pi: t.grad_pi.clone(),
            p_identity_residual: pair_l2(&dp),
            q_identity_residual: pair_l2(&dq),
            p_div_identity: pair_l2(&pm),
            q_identity: pair_l2(&qm),
        })
    }
}

fn split(v: &Pair) -> Result<(Pair, Pair)> {
    let q = gradient_part(&v.0, &v.1)?;
    let p = (&v.0 - &q.0, &v.1 - &q.1);
    Ok((p, q))
}

pub fn force_decomposition(state: &FlowState, law: &ViscosityLaw) -> Result<ForceDecomposition> {
    let t = tendency(state, law, ProjectionOptions::default(), true)?;
    ForceDecomposition::from_tendency(state, &t)
}

/// `-nu |xi|^2` applied to `u`.
pub(crate) fn viscous_diagonal(u: &VelocityField, nu: f64) -> VelocityField {
    u.map(|c| laplacian(c).scaled(nu))
}

/// Multiplies every mode by `exp(-nu |xi|^2 dt)`.
pub(crate) fn integrating_factor(u: &VelocityField, nu_dt: f64) -> VelocityField {
    u.map(|c| heat(c, nu_dt))
}
