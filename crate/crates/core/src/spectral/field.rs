use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use super::fft;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Fourier coefficients of a real scalar field on a periodic [`Grid`].
///
/// `coeffs[0]` is the mean of the nodal values; nodal values are recovered as
/// the plain sum `f(x) = sum_k c_k e^{i xi_k . x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(c, 0.0);
        f
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(SpectralField { grid, coeffs })
    }

    /// Forward transform of nodal values (flat, row-major, `x` fastest).
    pub fn from_nodal(grid: Grid, nodal: &[f64]) -> Result<Self> {
        if nodal.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: nodal.len(),
            });
        }
        let mut coeffs: Vec<Complex64> = nodal.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&mut coeffs, grid.n());
        Ok(SpectralField { grid, coeffs })
    }

    /// Samples `f(x, y)` on the grid and transforms it.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: Grid, f: F) -> Self {
        let nodal = grid.sample(f);
        Self::from_nodal(grid, &nodal).expect("sampled field has grid shape")
    }

    /// Inverse transform; the (roundoff-level) imaginary part is discarded.
    pub fn to_nodal(&self) -> Vec<f64> {
        let mut data = self.coeffs.clone();
        fft::inverse(&mut data, self.grid.n());
        data.into_iter().map(|c| c.re).collect()
    }

    /// The same trigonometric polynomial on an `n`-point grid of the same
    /// box. Refining zero-pads; coarsening truncates. Nyquist rows of the
    /// source are dropped so the result stays real.
    pub fn resampled(&self, n: usize) -> Result<SpectralField> {
        let target = Grid::with_dealias(n, self.grid.l(), self.grid.dealias_fraction())?;
        let half = (self.grid.n().min(n) / 2) as i64;
        let mut out = SpectralField::zeros(target);
        for (i, c) in self.coeffs.iter().enumerate() {
            let (kx, ky) = self.grid.k_of(i);
            if kx.abs() < half && ky.abs() < half {
                out.coeffs[target.idx_of(kx, ky)] = *c;
            }
        }
        Ok(out)
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    #[inline]
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub(crate) fn check_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Applies a Fourier multiplier given as a function of the flat index.
    pub fn apply<M: Fn(usize) -> Complex64>(&self, m: M) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * m(i))
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
        }
    }

    /// Applies a real radial-or-not multiplier given as a function of `xi`.
    pub fn apply_real<M: Fn(f64, f64) -> f64>(&self, m: M) -> Self {
        let g = self.grid;
        self.apply(|i| {
            let (a, b) = g.xi(i);
            Complex64::new(m(a, b), 0.0)
        })
    }

    /// Zeroes every mode removed by the dealiasing mask.
    pub fn dealiased(mut self) -> Self {
        let g = self.grid;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if !g.dealias_keeps(i) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self
    }

    /// Dealiased pointwise product, formed in physical space.
    pub fn product(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_grid(other)?;
        let a = self.to_nodal();
        let b = other.to_nodal();
        Ok(product_nodal(self.grid, &a, &b))
    }

    /// `L^2` norm via Parseval: `||f||^2 = l^2 sum |c_k|^2`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.area() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `L^2` inner product via Parseval.
    pub fn l2_dot(&self, other: &SpectralField) -> f64 {
        self.grid.area()
            * self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| (a * b.conj()).re)
                .sum::<f64>()
    }

    /// Largest relative violation of `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..g.len() {
            let (kx, ky) = g.k_of(i);
            let j = g.idx_of(-kx, -ky);
            worst = worst.max((self.coeffs[i] - self.coeffs[j].conj()).norm());
        }
        worst / scale
    }

    pub fn scaled(&self, s: f64) -> Self {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &SpectralField) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }
}

/// Forward transform of the dealiased product of two nodal arrays.
pub(crate) fn product_nodal(grid: Grid, a: &[f64], b: &[f64]) -> SpectralField {
    let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    SpectralField::from_nodal(grid, &prod)
        .expect("product keeps grid shape")
        .dealiased()
}

impl Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        debug_assert_eq!(self.grid, rhs.grid);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        debug_assert_eq!(self.grid, rhs.grid);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, s: f64) -> SpectralField {
        self.scaled(s)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}
