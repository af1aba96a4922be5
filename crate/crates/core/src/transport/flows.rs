use std::f64::consts::PI;

use crate::besov::chi;
use crate::spectral::{Grid, SpectralField, VelocityField};

/// `(a sin(2 pi m y / l), 0)`.
pub fn shear_velocity(grid: &Grid, amplitude: f64, mode: i64) -> VelocityField {
    let k = 2.0 * PI * mode as f64 / grid.l();
    VelocityField::from_parts(
        SpectralField::from_fn(*grid, |_, y| amplitude * (k * y).sin()),
        SpectralField::zeros(*grid),
    )
}

/// Smooth cutoff: 1 for `r <= 0.2 l`, 0 for `r >= 0.48 l`.
fn rotation_taper(r: f64, l: f64) -> f64 {
    let (r1, r2) = (0.2 * l, 0.48 * l);
    // rescale so chi's transition [3/4, 4/3] maps onto [r1, r2]
    let s = 0.75 + (r - r1) / (r2 - r1) * (4.0 / 3.0 - 0.75);
    chi(s)
}

/// Stream function `omega r^2 / 2` about the box centre, tapered smoothly to
/// zero before the boundary. Inside `r <= 0.2 l` the flow is the rigid
/// rotation `omega (-(y - c), x - c)` with period `2 pi / omega`.
pub fn rotation_stream_function(grid: &Grid, omega: f64) -> SpectralField {
    let l = grid.l();
    let c = 0.5 * l;
    SpectralField::from_fn(*grid, |x, y| {
        let r2 = (x - c).powi(2) + (y - c).powi(2);
        0.5 * omega * r2 * rotation_taper(r2.sqrt(), l)
    })
}

pub fn rotation_velocity(grid: &Grid, omega: f64) -> VelocityField {
    VelocityField::from_stream_function(&rotation_stream_function(grid, omega))
}
