use crate::error::{invalid, Error, Result};

fn check_samples(g: &[f64], h: &[f64], t: &[f64]) -> Result<()> {
    if g.len() != t.len() || h.len() != t.len() {
        return Err(Error::ShapeMismatch {
            expected: t.len(),
            got: if g.len() != t.len() { g.len() } else { h.len() },
        });
    }
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("t_grid", "must be strictly increasing"));
    }
    if let Some(v) = h.iter().find(|v| !(**v >= 0.0)) {
        return Err(invalid("h", format!("must be nonnegative, found {v}")));
    }
    Ok(())
}

/// Right side `g(t) + int_0^t h g exp(int_s^t h)` of the integral Gronwall
/// inequality on the sample grid, by composite trapezoid quadrature.
///
/// The inner exponential is carried incrementally,
/// `I_k = e^{H_k - H_{k-1}} I_{k-1} + dt/2 (h_{k-1} g_{k-1} e^{H_k - H_{k-1}} + h_k g_k)`,
/// which equals the full trapezoid sum without forming `e^{H}` itself.
pub fn gronwall_bound(g: &[f64], h: &[f64], t: &[f64]) -> Result<Vec<f64>> {
    check_samples(g, h, t)?;
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for k in 0..t.len() {
        if k > 0 {
            let dt = t[k] - t[k - 1];
            let grow = (0.5 * dt * (h[k] + h[k - 1])).exp();
            acc = grow * acc + 0.5 * dt * (h[k - 1] * g[k - 1] * grow + h[k] * g[k]);
        }
        out.push(g[k] + acc);
    }
    Ok(out)
}

/// Worst case of the hypothesis: the solution of `f = g + int_0^t h f`,
/// i.e. `f' = h f + g'`, `f(0) = g(0)`, integrated by classical RK4 with
/// `substeps` steps per grid interval. Returned at the grid times.
pub fn gronwall_ode_oracle<G, D, H>(g: G, dg: D, h: H, t: &[f64], substeps: usize) -> Result<Vec<f64>>
where
    G: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
    H: Fn(f64) -> f64,
{
    if t.is_empty() || substeps == 0 {
        return Err(invalid("t_grid", "need samples and at least one substep"));
    }
    let rhs = |s: f64, f: f64| h(s) * f + dg(s);
    let mut f = g(t[0]);
    let mut out = vec![f];
    for w in t.windows(2) {
        let dt = (w[1] - w[0]) / substeps as f64;
        for i in 0..substeps {
            let s = w[0] + i as f64 * dt;
            let k1 = rhs(s, f);
            let k2 = rhs(s + 0.5 * dt, f + 0.5 * dt * k1);
            let k3 = rhs(s + 0.5 * dt, f + 0.5 * dt * k2);
            let k4 = rhs(s + dt, f + dt * k3);
            f += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        out.push(f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, t_end: f64) -> Vec<f64> {
        (0..=n).map(|i| t_end * i as f64 / n as f64).collect()
    }

    #[test]
    fn no_feedback_returns_g() {
        let t = grid(50, 2.0);
        let g: Vec<f64> = t.iter().map(|s| 1.0 + s * s).collect();
        assert_eq!(gronwall_bound(&g, &vec![0.0; t.len()], &t).unwrap(), g);
    }

    #[test]
    fn constant_coefficients_give_exponential() {
        let t = grid(2000, 3.0);
        let ones = vec![1.0; t.len()];
        let b = gronwall_bound(&ones, &ones, &t).unwrap();
        for (bi, ti) in b.iter().zip(&t) {
            assert!((bi - ti.exp()).abs() <= 1e-5 * ti.exp(), "{ti}: {bi}");
        }
    }

    #[test]
    fn rejects_negative_h() {
        let t = grid(3, 1.0);
        assert!(gronwall_bound(&[1.0; 4], &[0.0, -1.0, 0.0, 0.0], &t).is_err());
        assert!(gronwall_bound(&[1.0; 3], &[0.0; 4], &t).is_err());
    }
}
