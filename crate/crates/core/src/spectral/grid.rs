use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic `n x n` grid on the box `[0, l)^2`.
///
/// Flat indices are row-major with `x` varying fastest: `idx = iy * n + ix`.
/// Integer wavenumbers run over `[-n/2, n/2)` and the physical wavevector is
/// `xi = (2 pi / l) k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    l: f64,
    dealias_fraction: f64,
}

pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

impl Grid {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        Self::with_dealias(n, l, DEFAULT_DEALIAS)
    }

    pub fn with_dealias(n: usize, l: f64, dealias_fraction: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n = {n} must be even and >= 8")));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidGrid(format!("box side l = {l} must be positive")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias fraction {dealias_fraction} outside (0, 1]"
            )));
        }
        Ok(Grid {
            n,
            l,
            dealias_fraction,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn l(&self) -> f64 {
        self.l
    }

    #[inline]
    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of grid points, `n^2`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Area of one cell, the nodal quadrature weight.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dx()
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.l * self.l
    }

    /// Fundamental wavenumber `2 pi / l`.
    #[inline]
    pub fn k0(&self) -> f64 {
        2.0 * PI / self.l
    }

    /// Integer wavenumber of a 1D index.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Inverse of [`Grid::wavenumber`]; `k` must lie in `[-n/2, n/2)`.
    #[inline]
    pub fn index_of(&self, k: i64) -> usize {
        let n = self.n as i64;
        k.rem_euclid(n) as usize
    }

    #[inline]
    pub fn flat(&self, ix: usize, iy: usize) -> usize {
        iy * self.n + ix
    }

    /// Integer wavevector `(kx, ky)` of a flat index.
    #[inline]
    pub fn k_of(&self, idx: usize) -> (i64, i64) {
        (self.wavenumber(idx % self.n), self.wavenumber(idx / self.n))
    }

    /// Flat index of integer wavevector `(kx, ky)`.
    #[inline]
    pub fn idx_of(&self, kx: i64, ky: i64) -> usize {
        self.flat(self.index_of(kx), self.index_of(ky))
    }

    /// Physical wavevector of a flat index.
    #[inline]
    pub fn xi(&self, idx: usize) -> (f64, f64) {
        let (kx, ky) = self.k_of(idx);
        (self.k0() * kx as f64, self.k0() * ky as f64)
    }

    #[inline]
    pub fn xi_norm_sq(&self, idx: usize) -> f64 {
        let (a, b) = self.xi(idx);
        a * a + b * b
    }

    #[inline]
    pub fn xi_norm(&self, idx: usize) -> f64 {
        self.xi_norm_sq(idx).sqrt()
    }

    /// Wavevector used by first-order (odd) multipliers: the Nyquist
    /// component is set to zero so that real fields stay real.
    #[inline]
    pub fn xi_odd(&self, idx: usize) -> (f64, f64) {
        let n2 = (self.n / 2) as i64;
        let (kx, ky) = self.k_of(idx);
        let kx = if kx == -n2 { 0 } else { kx };
        let ky = if ky == -n2 { 0 } else { ky };
        (self.k0() * kx as f64, self.k0() * ky as f64)
    }

    /// Largest `|xi|` represented on the grid (the corner mode).
    pub fn k_max(&self) -> f64 {
        self.k0() * (self.n / 2) as f64 * std::f64::consts::SQRT_2
    }

    /// Whether the 2/3-type dealiasing mask keeps this mode.
    #[inline]
    pub fn dealias_keeps(&self, idx: usize) -> bool {
        let cut = self.dealias_fraction * (self.n / 2) as f64;
        let (kx, ky) = self.k_of(idx);
        (kx.abs() as f64) <= cut && (ky.abs() as f64) <= cut
    }

    /// Nodal coordinate of a 1D index.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// Nodal values of `f(x, y)` in flat order.
    pub fn sample<F: Fn(f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for iy in 0..self.n {
            let y = self.coord(iy);
            for ix in 0..self.n {
                out.push(f(self.coord(ix), y));
            }
        }
        out
    }

    /// Diffusion time after which the smallest nonzero wavenumber has decayed
    /// by `1/e` under `e^{mu t Delta}`: `l^2 / (8 pi^2 mu)`. Past this time the
    /// periodic box no longer approximates the plane.
    pub fn box_cutoff(&self, mu0: f64) -> f64 {
        self.l * self.l / (8.0 * PI * PI * mu0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::new(7, 1.0).is_err());
        assert!(Grid::new(6, 1.0).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::with_dealias(16, 1.0, 0.0).is_err());
        assert!(Grid::new(16, 1.0).is_ok());
    }

    #[test]
    fn wavenumber_layout() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let ks: Vec<i64> = (0..8).map(|i| g.wavenumber(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        for k in -4..4 {
            assert_eq!(g.wavenumber(g.index_of(k)), k);
        }
        assert_eq!(g.k_of(g.idx_of(-3, 2)), (-3, 2));
        assert!((g.k0() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dealias_mask_cuts_above_two_thirds() {
        let g = Grid::new(12, 1.0).unwrap();
        // cut = 2/3 * 6 = 4
        assert!(g.dealias_keeps(g.idx_of(4, -4)));
        assert!(!g.dealias_keeps(g.idx_of(5, 0)));
        assert!(!g.dealias_keeps(g.idx_of(0, -6)));
    }

    #[test]
    fn odd_wavevector_drops_nyquist() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        assert_eq!(g.xi_odd(g.idx_of(-4, 3)), (0.0, 3.0));
        assert_eq!(g.xi(g.idx_of(-4, 3)), (-4.0, 3.0));
    }
}
