use super::field::SpectralField;
use super::grid::Grid;
use super::ops::{derivative, divergence, leray_project};
use crate::error::Result;

/// Two-component velocity with a divergence-free contract.
///
/// Values built by [`VelocityField::solenoidal`] (or by any projection in
/// this crate) satisfy `||div u|| <= 1e-10 ||grad u||`; `from_parts` trusts
/// the caller.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    u1: SpectralField,
    u2: SpectralField,
}

impl VelocityField {
    pub fn zeros(grid: Grid) -> Self {
        VelocityField {
            u1: SpectralField::zeros(grid),
            u2: SpectralField::zeros(grid),
        }
    }

    pub fn from_parts(u1: SpectralField, u2: SpectralField) -> Self {
        debug_assert_eq!(u1.grid(), u2.grid());
        VelocityField { u1, u2 }
    }

    /// Leray projection of an arbitrary pair.
    pub fn solenoidal(u1: &SpectralField, u2: &SpectralField) -> Result<Self> {
        leray_project(u1, u2)
    }

    /// Perpendicular gradient `(-d_y psi, d_x psi)` of a stream function.
    pub fn from_stream_function(psi: &SpectralField) -> Self {
        VelocityField {
            u1: -&derivative(psi, 1),
            u2: derivative(psi, 0),
        }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        self.u1.grid()
    }

    #[inline]
    pub fn u1(&self) -> &SpectralField {
        &self.u1
    }

    #[inline]
    pub fn u2(&self) -> &SpectralField {
        &self.u2
    }

    pub fn component(&self, axis: usize) -> &SpectralField {
        if axis == 0 {
            &self.u1
        } else {
            &self.u2
        }
    }

    pub fn into_parts(self) -> (SpectralField, SpectralField) {
        (self.u1, self.u2)
    }

    pub fn divergence(&self) -> SpectralField {
        divergence(&self.u1, &self.u2)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.u1.l2_norm().powi(2) + self.u2.l2_norm().powi(2)).sqrt()
    }

    /// `||grad u||_{L^2}` summed over all four derivative components.
    pub fn grad_l2_norm(&self) -> f64 {
        let g = *self.grid();
        let sum: f64 = self
            .u1
            .coeffs()
            .iter()
            .zip(self.u2.coeffs())
            .enumerate()
            .map(|(i, (a, b))| {
                let (x, y) = g.xi_odd(i);
                (x * x + y * y) * (a.norm_sqr() + b.norm_sqr())
            })
            .sum();
        (g.area() * sum).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        VelocityField {
            u1: self.u1.scaled(s),
            u2: self.u2.scaled(s),
        }
    }

    pub fn axpy(&mut self, s: f64, other: &VelocityField) {
        self.u1.axpy(s, &other.u1);
        self.u2.axpy(s, &other.u2);
    }

    pub fn map<F: Fn(&SpectralField) -> SpectralField>(&self, f: F) -> Self {
        VelocityField {
            u1: f(&self.u1),
            u2: f(&self.u2),
        }
    }

    pub fn dealiased(self) -> Self {
        VelocityField {
            u1: self.u1.dealiased(),
            u2: self.u2.dealiased(),
        }
    }

    /// Nodal components.
    pub fn to_nodal(&self) -> (Vec<f64>, Vec<f64>) {
        (self.u1.to_nodal(), self.u2.to_nodal())
    }

    pub fn max_speed(&self) -> f64 {
        let (a, b) = self.to_nodal();
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x * x + y * y).sqrt())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.u1.is_zero() && self.u2.is_zero()
    }
}
