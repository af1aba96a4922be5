//! Square 2D complex FFTs built from cached 1D rustfft plans.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use std::sync::LazyLock;
use rustfft::{Fft, FftPlanner};

use crate::par::for_each_chunk_mut;

type Plan = Arc<dyn Fft<f64>>;

static PLANS: LazyLock<Mutex<HashMap<(usize, bool), Plan>>> = LazyLock::new(|| Mutex::new(HashMap::new()));

fn plan(n: usize, inverse: bool) -> Plan {
    let mut cache = PLANS.lock().expect("fft plan cache poisoned");
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

fn rows(data: &mut [Complex64], n: usize, fft: &Plan) {
    // at least 16 rows per task; smaller chunks cost more in scheduling than they save
    let chunk = n * 16.max(n / 32);
    for_each_chunk_mut(data, chunk, |c| fft.process(c));
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

fn transform(data: &mut [Complex64], n: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n * n);
    let fft = plan(n, inverse);
    rows(data, n, &fft);
    transpose(data, n);
    rows(data, n, &fft);
    transpose(data, n);
}

/// Forward transform normalised so that the `k = 0` coefficient is the mean.
pub(crate) fn forward(data: &mut [Complex64], n: usize) {
    transform(data, n, false);
    let scale = 1.0 / (n * n) as f64;
    data.iter_mut().for_each(|c| *c *= scale);
}

/// Unnormalised inverse: nodal values are the plain Fourier sum.
pub(crate) fn inverse(data: &mut [Complex64], n: usize) {
    transform(data, n, true);
}
