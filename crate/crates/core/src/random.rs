//! Seeded randomness.
//!
//! Every random draw comes from a ChaCha8 stream keyed by `(seed, Stream)`.
//! ChaCha is counter based, so the values depend only on the seed, the
//! stream and the draw order, never on platform or thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{Grid, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    InitialVelocity = 1,
    InitialDensity = 2,
    Ensemble = 3,
    Transport = 4,
    Inequalities = 5,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Integer wavevectors with `0 < |k| <= k_cut` in the upper half plane, in a
/// canonical order that does not depend on the grid size.
pub fn half_plane_modes(k_cut: f64) -> Vec<(i64, i64)> {
    let kc = k_cut.floor() as i64;
    let mut out = Vec::new();
    for ky in 0..=kc {
        for kx in -kc..=kc {
            if ky == 0 && kx <= 0 {
                continue;
            }
            if ((kx * kx + ky * ky) as f64) <= k_cut * k_cut {
                out.push((kx, ky));
            }
        }
    }
    out
}

/// Writes `c` at `k` and `conj(c)` at `-k`.
pub fn set_hermitian(f: &mut SpectralField, k: (i64, i64), c: Complex64) {
    let g = *f.grid();
    let i = g.idx_of(k.0, k.1);
    let j = g.idx_of(-k.0, -k.1);
    f.coeffs_mut()[i] = c;
    f.coeffs_mut()[j] = c.conj();
}

/// Real random field with independent uniform coefficients on the integer
/// disk `|k| <= k_cut` and a random mean. The coefficients depend on the seed
/// and `k_cut` only, so the same call on a finer grid gives the same field.
pub fn random_field(grid: Grid, seed: u64, k_cut: f64) -> SpectralField {
    random_field_in(grid, seed, k_cut, Stream::Ensemble)
}

/// [`random_field`] drawn from a chosen stream.
pub fn random_field_in(grid: Grid, seed: u64, k_cut: f64, stream: Stream) -> SpectralField {
    assert!(
        k_cut < (grid.n() / 2) as f64,
        "k_cut {k_cut} must stay below the Nyquist index"
    );
    let mut rng = stream_rng(seed, stream);
    let mut f = SpectralField::zeros(grid);
    f.coeffs_mut()[0] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
    for k in half_plane_modes(k_cut) {
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        set_hermitian(&mut f, k, c);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_field_is_real_and_resolution_independent() {
        let g1 = Grid::new(32, 1.0).unwrap();
        let g2 = Grid::new(64, 1.0).unwrap();
        let a = random_field(g1, 4, 6.0);
        let b = random_field(g2, 4, 6.0);
        assert!(a.hermitian_defect() < 1e-15);
        for k in half_plane_modes(6.0) {
            assert_eq!(a.coeffs()[g1.idx_of(k.0, k.1)], b.coeffs()[g2.idx_of(k.0, k.1)]);
        }
        assert_eq!(random_field(g1, 4, 6.0), a);
        assert_ne!(random_field(g1, 5, 6.0), a);
    }

    #[test]
    fn streams_are_independent() {
        let a: u64 = stream_rng(1, Stream::InitialVelocity).random();
        let b: u64 = stream_rng(1, Stream::InitialDensity).random();
        assert_ne!(a, b);
    }
}
