//! Periodic grid, transforms, differential operators and the Leray/Riesz
//! projectors.
//!
//! The box `[0, l)^2` stands in for the plane. Quantities that the decay
//! analysis writes as integrals over frequency space use the unitary
//! convention `u_hat(xi) = (l^2 / 2 pi) c_k` with cell `d xi = (2 pi / l)^2`,
//! so Plancherel reads `int |u_hat|^2 d xi = ||u||_{L^2}^2` exactly.

mod fft;
mod field;
mod grid;
mod ops;
mod velocity;

pub use field::SpectralField;
pub(crate) use field::product_nodal;
pub use grid::{Grid, DEFAULT_DEALIAS};
pub use ops::{
    derivative, divergence, gradient, gradient_part, heat, inverse_laplacian, laplacian, leray_project,
    lp_norm, lp_norm_nodal, riesz, sobolev_norm, to_physical, to_spectral,
};
pub use velocity::VelocityField;

/// Scale between grid coefficients and the unitary continuous transform.
pub fn unitary_scale(grid: &Grid) -> f64 {
    grid.area() / (2.0 * std::f64::consts::PI)
}
