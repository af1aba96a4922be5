use std::f64::consts::E;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::solver::Sample;

/// Time weights `f(t)` of the weighted energy estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    /// `t + e`
    TPlusE,
    /// `(t+e) ln(t+e)`
    TPlusELog,
    /// `(t+e) ln^2(t+e)`
    TPlusELog2,
    /// `(t+e)^{1 + 2 beta - epsilon}`
    PowerLadder { beta: f64, epsilon: f64 },
    /// `t^{1-r} (t+e)^{r + 2 beta - epsilon}` with `0 < r < alpha < 1`.
    Interpolated { r: f64, alpha: f64, beta: f64, epsilon: f64 },
}

impl WeightKind {
    pub fn name(&self) -> String {
        match *self {
            WeightKind::TPlusE => "t_plus_e".into(),
            WeightKind::TPlusELog => "t_plus_e_log".into(),
            WeightKind::TPlusELog2 => "t_plus_e_log2".into(),
            WeightKind::PowerLadder { beta, epsilon } => format!("power_ladder_b{beta}_e{epsilon}"),
            WeightKind::Interpolated { r, alpha, beta, epsilon } => {
                format!("interpolated_r{r}_a{alpha}_b{beta}_e{epsilon}")
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightKind::PowerLadder { beta, epsilon } => {
                if !(beta >= 0.0 && epsilon > 0.0) {
                    return Err(invalid("weight", "power ladder needs beta >= 0, epsilon > 0"));
                }
            }
            WeightKind::Interpolated { r, alpha, beta, epsilon } => {
                if !(alpha > 0.0 && alpha < 1.0 && r > 0.0 && r < alpha) {
                    return Err(invalid("weight", "interpolated weight needs 0 < r < alpha < 1"));
                }
                if !(beta >= 0.0 && epsilon > 0.0) {
                    return Err(invalid("weight", "interpolated weight needs beta >= 0, epsilon > 0"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn f(&self, t: f64) -> f64 {
        let s = t + E;
        let l = s.ln();
        match *self {
            WeightKind::TPlusE => s,
            WeightKind::TPlusELog => s * l,
            WeightKind::TPlusELog2 => s * l * l,
            WeightKind::PowerLadder { beta, epsilon } => s.powf(1.0 + 2.0 * beta - epsilon),
            WeightKind::Interpolated { r, beta, epsilon, .. } => {
                t.powf(1.0 - r) * s.powf(r + 2.0 * beta - epsilon)
            }
        }
    }

    /// `f'(t)`. The interpolated weight has an integrable `t^{-r}`
    /// singularity at `t = 0`, where 0 is returned.
    pub fn f_prime(&self, t: f64) -> f64 {
        let s = t + E;
        let l = s.ln();
        match *self {
            WeightKind::TPlusE => 1.0,
            WeightKind::TPlusELog => l + 1.0,
            WeightKind::TPlusELog2 => l * l + 2.0 * l,
            WeightKind::PowerLadder { beta, epsilon } => {
                let a = 1.0 + 2.0 * beta - epsilon;
                a * s.powf(a - 1.0)
            }
            WeightKind::Interpolated { r, beta, epsilon, .. } => {
                if t <= 0.0 {
                    return 0.0;
                }
                let b = r + 2.0 * beta - epsilon;
                (1.0 - r) * t.powf(-r) * s.powf(b) + b * t.powf(1.0 - r) * s.powf(b - 1.0)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    pub f: f64,
    pub f_prime: f64,
    /// `f int mu |grad u|^2`
    pub weighted_dissipation: f64,
    /// `f ||grad u||^2`
    pub weighted_grad: f64,
    /// `f' ||sqrt(rho) u||^2`
    pub f_prime_energy: f64,
    /// `int_0^t f ||sqrt(rho) u_t||^2`
    pub cum_weighted_ut: f64,
    /// `int_0^t f (||P div(mu M)||^2 + ||Q div(mu M) - grad Pi||^2)`
    pub cum_weighted_forces: f64,
    /// `int_0^t (||P div(mu M)|| + ||Q div(mu M) - grad Pi|| + ||u_t||)`
    pub cum_l1_force: f64,
}

pub const LEDGER_COLUMNS: [&str; 9] = [
    "t",
    "f",
    "f_prime",
    "weighted_dissipation",
    "weighted_grad",
    "f_prime_energy",
    "cum_weighted_ut",
    "cum_weighted_forces",
    "cum_l1_force",
];

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyLedger {
    pub weight: WeightKind,
    pub rows: Vec<LedgerRow>,
}

fn sup<F: Fn(&LedgerRow) -> f64>(rows: &[LedgerRow], f: F) -> f64 {
    rows.iter().map(f).fold(0.0, f64::max)
}

impl EnergyLedger {
    pub fn sup_weighted_dissipation(&self) -> f64 {
        sup(&self.rows, |r| r.weighted_dissipation)
    }

    pub fn sup_weighted_grad(&self) -> f64 {
        sup(&self.rows, |r| r.weighted_grad)
    }

    pub fn sup_f_prime_energy(&self) -> f64 {
        sup(&self.rows, |r| r.f_prime_energy)
    }

    pub fn total_weighted_ut(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cum_weighted_ut)
    }

    pub fn total_l1_force(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cum_l1_force)
    }

    /// Share of `cum_l1_force` accumulated after `t_start`.
    pub fn l1_tail_fraction(&self, t_start: f64) -> f64 {
        let total = self.total_l1_force();
        if total == 0.0 {
            return 0.0;
        }
        let before = self
            .rows
            .iter()
            .take_while(|r| r.t <= t_start)
            .last()
            .map_or(0.0, |r| r.cum_l1_force);
        (total - before) / total
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(LEDGER_COLUMNS)?;
        for r in &self.rows {
            w.write_record(
                [
                    r.t,
                    r.f,
                    r.f_prime,
                    r.weighted_dissipation,
                    r.weighted_grad,
                    r.f_prime_energy,
                    r.cum_weighted_ut,
                    r.cum_weighted_forces,
                    r.cum_l1_force,
                ]
                .iter()
                .map(|v| format!("{v:e}")),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Weighted quantities along a trajectory; time integrals by the trapezoid
/// rule over the sample times.
pub fn energy_ledger(samples: &[Sample], weight: WeightKind) -> EnergyLedger {
    let mut rows: Vec<LedgerRow> = Vec::with_capacity(samples.len());
    let mut prev: Option<(&Sample, f64, f64, f64)> = None;
    let (mut cu, mut cf, mut cl) = (0.0, 0.0, 0.0);
    for s in samples {
        let f = weight.f(s.t);
        let ut_integrand = f * s.rho_ut_sq;
        let force_integrand = f * (s.p_div * s.p_div + s.q_div_minus_gradpi * s.q_div_minus_gradpi);
        let l1 = s.p_div + s.q_div_minus_gradpi + s.l2_ut;
        if let Some((p, pu, pf, pl)) = prev {
            let h = s.t - p.t;
            cu += 0.5 * h * (pu + ut_integrand);
            cf += 0.5 * h * (pf + force_integrand);
            cl += 0.5 * h * (pl + l1);
        }
        rows.push(LedgerRow {
            t: s.t,
            f,
            f_prime: weight.f_prime(s.t),
            weighted_dissipation: f * s.dissipation,
            weighted_grad: f * s.l2_grad_u * s.l2_grad_u,
            f_prime_energy: weight.f_prime(s.t) * s.energy,
            cum_weighted_ut: cu,
            cum_weighted_forces: cf,
            cum_l1_force: cl,
        });
        prev = Some((s, ut_integrand, force_integrand, l1));
    }
    EnergyLedger { weight, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(w: WeightKind, t: f64) -> f64 {
        let h = 1e-5;
        (w.f(t + h) - w.f(t - h)) / (2.0 * h)
    }

    #[test]
    fn derivatives_match_differences() {
        let ws = [
            WeightKind::TPlusE,
            WeightKind::TPlusELog,
            WeightKind::TPlusELog2,
            WeightKind::PowerLadder { beta: 0.3, epsilon: 0.1 },
            WeightKind::Interpolated { r: 0.2, alpha: 0.5, beta: 0.3, epsilon: 0.1 },
        ];
        for w in ws {
            for t in [0.5, 3.0, 40.0] {
                let rel = (w.f_prime(t) - fd(w, t)).abs() / w.f_prime(t).abs();
                assert!(rel < 1e-7, "{} at {t}: {rel}", w.name());
            }
        }
    }

    #[test]
    fn zero_samples_give_zero_ledger() {
        let samples: Vec<Sample> = (0..5).map(|i| Sample { t: i as f64, ..Sample::default() }).collect();
        let l = energy_ledger(&samples, WeightKind::TPlusELog);
        assert!(l.rows.iter().all(|r| r.weighted_dissipation == 0.0 && r.cum_l1_force == 0.0));
        assert_eq!(l.l1_tail_fraction(2.0), 0.0);
    }

    #[test]
    fn validation() {
        assert!(WeightKind::Interpolated { r: 0.6, alpha: 0.5, beta: 0.3, epsilon: 0.1 }.validate().is_err());
        assert!(WeightKind::PowerLadder { beta: 0.3, epsilon: 0.0 }.validate().is_err());
    }
}
