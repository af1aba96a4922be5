//! The three calculus integrals in log-weighted time and their bounds.
//!
//! Every integral is evaluated after the substitution `u = ln(s + e)`, which
//! turns `(s+e)^a ln(s+e)^b ds` into `e^{(a+1)u} u^b du` on `[1, ln(t+e)]`.

use std::collections::BTreeMap;
use std::f64::consts::E;

use std::sync::LazyLock;

use crate::error::{invalid, Error, Result};

/// Frozen suprema of the case 2 and case 3 ratios.
const GAMMA_FILE: &str = include_str!("../../data/gamma_constants.txt");

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CalculusCase {
    /// `int_0^t (s+e)^{-1} ln(s+e)^{-m} ds <= 1/(m-1)`, `m > 1`.
    LogPower,
    /// `int_0^t (s+e)^{-1-beta} ln(s+e)^m ds <= gamma_m beta^{-(m+1)}`.
    DampedLog,
    /// `int_0^t (s+e)^{-alpha} ln(s+e)^{-m} ds <= gamma_{m,alpha} (t+e)^{1-alpha} ln(t+e)^{-m}`.
    SublinearLog,
}

impl CalculusCase {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(CalculusCase::LogPower),
            2 => Ok(CalculusCase::DampedLog),
            3 => Ok(CalculusCase::SublinearLog),
            _ => Err(invalid("case", format!("{i} is not one of 1, 2, 3"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            CalculusCase::LogPower => 1,
            CalculusCase::DampedLog => 2,
            CalculusCase::SublinearLog => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CalculusValue {
    pub value: f64,
    /// Right side with the frozen constant; `None` when no constant is frozen
    /// for these parameters.
    pub bound: Option<f64>,
    /// The right side divided by its constant (1 for the first case).
    pub unit_bound: f64,
    pub error_estimate: f64,
}

impl CalculusValue {
    /// `bound - value`.
    pub fn margin(&self) -> Option<f64> {
        self.bound.map(|b| b - self.value)
    }
}

fn validate(case: CalculusCase, m: f64, alpha: f64, beta: f64, t: f64) -> Result<()> {
    if !(t >= 0.0) {
        return Err(invalid("t", format!("{t} must be nonnegative")));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(invalid("m", format!("{m} must be a finite nonnegative number")));
    }
    match case {
        CalculusCase::LogPower if !(m > 1.0) => Err(invalid("m", format!("{m} must exceed 1"))),
        CalculusCase::DampedLog if !(beta > 0.0 && beta.is_finite()) => {
            Err(invalid("beta", format!("{beta} must be positive")))
        }
        CalculusCase::SublinearLog if !(0.0..1.0).contains(&alpha) => {
            Err(invalid("alpha", format!("{alpha} must lie in [0, 1)")))
        }
        CalculusCase::SublinearLog if t.is_infinite() => {
            Err(invalid("t", "the third integral diverges at t = inf"))
        }
        _ => Ok(()),
    }
}

/// `int_a^b f` split into unit pieces so the tolerance stays relative.
fn integrate_pieces<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> (f64, f64) {
    let pieces = ((b - a).ceil() as usize).max(1);
    let h = (b - a) / pieces as f64;
    let (mut sum, mut err) = (0.0, 0.0);
    for i in 0..pieces {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == pieces { b } else { lo + h };
        let scale = f(lo).abs().max(f(hi).abs()).max(f64::MIN_POSITIVE);
        let out = quadrature::integrate(&f, lo, hi, 1e-14 * scale * h);
        sum += out.integral;
        err += out.error_estimate;
    }
    (sum, err)
}

/// `int_1^inf f`, mapped onto `[0, 1)` by `u = 1 + x / (1 - x)`.
fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F) -> (f64, f64) {
    let g = |x: f64| {
        if x >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - x;
        let v = f(1.0 + x / d) / (d * d);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let out = quadrature::integrate(g, 0.0, 1.0, 1e-13);
    (out.integral, out.error_estimate)
}

/// Quadrature value of the integral and its unit right side.
pub fn calculus_value(case: CalculusCase, m: f64, alpha: f64, beta: f64, t: f64) -> Result<(f64, f64, f64)> {
    validate(case, m, alpha, beta, t)?;
    let upper = (t + E).ln();
    let (value, err) = if t == 0.0 {
        (0.0, 0.0)
    } else {
        match case {
            CalculusCase::LogPower if t.is_infinite() => {
                // v = 1/u gives int_0^1 v^{m-2} dv
                let out = quadrature::integrate(|v: f64| v.powf(m - 2.0), 0.0, 1.0, 1e-14);
                (out.integral, out.error_estimate)
            }
            CalculusCase::LogPower => integrate_pieces(|u: f64| u.powf(-m), 1.0, upper),
            CalculusCase::DampedLog if t.is_infinite() => {
                integrate_to_infinity(|u: f64| (-beta * u).exp() * u.powf(m))
            }
            CalculusCase::DampedLog => integrate_pieces(|u: f64| (-beta * u).exp() * u.powf(m), 1.0, upper),
            CalculusCase::SublinearLog => {
                integrate_pieces(|u: f64| ((1.0 - alpha) * u).exp() * u.powf(-m), 1.0, upper)
            }
        }
    };
    let unit = match case {
        CalculusCase::LogPower => 1.0 / (m - 1.0),
        CalculusCase::DampedLog => beta.powf(-(m + 1.0)),
        CalculusCase::SublinearLog => (t + E).powf(1.0 - alpha) * upper.powf(-m),
    };
    Ok((value, unit, err))
}

/// Integral value and its right side with the frozen constant.
pub fn calculus_integral(case: CalculusCase, m: f64, alpha: f64, beta: f64, t: f64) -> Result<CalculusValue> {
    let (value, unit_bound, error_estimate) = calculus_value(case, m, alpha, beta, t)?;
    let bound = match case {
        CalculusCase::LogPower => Some(unit_bound),
        _ => frozen_gamma(case, m, alpha).map(|g| g * unit_bound),
    };
    Ok(CalculusValue {
        value,
        bound,
        unit_bound,
        error_estimate,
    })
}

/// Key of a frozen constant, e.g. `case2.m=1` or `case3.m=0.5.alpha=0.25`.
pub fn gamma_key(case: CalculusCase, m: f64, alpha: f64) -> String {
    match case {
        CalculusCase::SublinearLog => format!("case3.m={m}.alpha={alpha}"),
        _ => format!("case{}.m={m}", case.index()),
    }
}

pub fn parse_constants(text: &str, origin: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: origin.into(),
            line: i + 1,
            message,
        };
        // keys may contain `=`, values never do
        let (k, v) = line
            .rsplit_once('=')
            .ok_or_else(|| parse_err("expected `key = value`".into()))?;
        let v: f64 = v.trim().parse().map_err(|e| parse_err(format!("{e}")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

static FROZEN: LazyLock<BTreeMap<String, f64>> =
    LazyLock::new(|| parse_constants(GAMMA_FILE, "data/gamma_constants.txt").expect("frozen constants parse"));

pub fn frozen_constants() -> &'static BTreeMap<String, f64> {
    &FROZEN
}

pub fn frozen_gamma(case: CalculusCase, m: f64, alpha: f64) -> Option<f64> {
    FROZEN.get(&gamma_key(case, m, alpha)).copied()
}

/// Parameter sweep behind the frozen constants.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSweep {
    pub m: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Case 3 times; case 2 is increasing in `t`, so its supremum is taken
    /// at `t = inf`.
    pub t: Vec<f64>,
}

impl Default for GammaSweep {
    fn default() -> Self {
        GammaSweep {
            m: vec![0.0, 0.5, 1.0, 2.0, 3.0],
            alpha: vec![0.0, 0.25, 0.5, 0.75, 0.9],
            beta: vec![0.05, 0.1, 0.25, 0.5, 1.0, 2.0],
            // 10^{k/4}, k = -12..=24, i.e. 1e-3 ..= 1e6
            t: (-12..=24).map(|k| 10f64.powf(k as f64 / 4.0)).collect(),
        }
    }
}

/// One checked cell of the sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub case: CalculusCase,
    pub m: f64,
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
    pub value: f64,
    pub bound: Option<f64>,
}

impl SweepCell {
    pub fn passes(&self) -> bool {
        matches!(self.bound, Some(b) if self.value <= b)
    }
}

impl GammaSweep {
    /// Every (case, parameters, t) cell of the sweep with its frozen bound.
    pub fn cells(&self) -> Result<Vec<SweepCell>> {
        let mut out = Vec::new();
        let t1: Vec<f64> = self.t.iter().copied().chain([f64::INFINITY]).collect();
        for &m in &self.m {
            if m > 1.0 {
                for &t in &t1 {
                    let v = calculus_integral(CalculusCase::LogPower, m, 0.0, 1.0, t)?;
                    out.push(cell(CalculusCase::LogPower, m, 0.0, 1.0, t, v));
                }
            }
            for &beta in &self.beta {
                for &t in &t1 {
                    let v = calculus_integral(CalculusCase::DampedLog, m, 0.0, beta, t)?;
                    out.push(cell(CalculusCase::DampedLog, m, 0.0, beta, t, v));
                }
            }
            for &alpha in &self.alpha {
                for &t in &self.t {
                    let v = calculus_integral(CalculusCase::SublinearLog, m, alpha, 1.0, t)?;
                    out.push(cell(CalculusCase::SublinearLog, m, alpha, 1.0, t, v));
                }
            }
        }
        Ok(out)
    }

    /// Observed suprema of `value / unit_bound` per constant, rounded up in
    /// the tenth significant digit.
    pub fn fit(&self) -> Result<BTreeMap<String, f64>> {
        let mut out = BTreeMap::new();
        for &m in &self.m {
            let mut sup: f64 = 0.0;
            for &beta in &self.beta {
                let (v, unit, _) = calculus_value(CalculusCase::DampedLog, m, 0.0, beta, f64::INFINITY)?;
                sup = sup.max(v / unit);
            }
            out.insert(gamma_key(CalculusCase::DampedLog, m, 0.0), round_up(sup));
            for &alpha in &self.alpha {
                let mut sup: f64 = 0.0;
                for &t in &self.t {
                    let (v, unit, _) = calculus_value(CalculusCase::SublinearLog, m, alpha, 1.0, t)?;
                    sup = sup.max(v / unit);
                }
                out.insert(gamma_key(CalculusCase::SublinearLog, m, alpha), round_up(sup));
            }
        }
        Ok(out)
    }
}

fn cell(case: CalculusCase, m: f64, alpha: f64, beta: f64, t: f64, v: CalculusValue) -> SweepCell {
    SweepCell {
        case,
        m,
        alpha,
        beta,
        t,
        value: v.value,
        bound: v.bound,
    }
}

fn round_up(x: f64) -> f64 {
    let s: f64 = format!("{:.9e}", x * (1.0 + 2e-9)).parse().expect("formatted float");
    s
}

/// Constants file text in `key = value` form.
pub fn format_constants(values: &BTreeMap<String, f64>) -> String {
    let mut s = String::from(
        "# Suprema of value / unit bound over the default sweep.\n\
         # case2: beta in {0.05, 0.1, 0.25, 0.5, 1, 2} at t = inf.\n\
         # case3: t = 10^(k/4), k = -12..=24.\n\
         # Regenerate with `lpdecay fit-constants`.\n",
    );
    for (k, v) in values {
        s.push_str(&format!("{k} = {v:e}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_case_matches_antiderivative() {
        for &(m, t) in &[(2.0, 10.0), (1.5, 1e4), (3.0, 0.5)] {
            let v = calculus_value(CalculusCase::LogPower, m, 0.0, 1.0, t).unwrap().0;
            let exact = (1.0 - (t + E).ln().powf(1.0 - m)) / (m - 1.0);
            assert!((v - exact).abs() < 1e-12, "{m} {t}: {v} vs {exact}");
        }
        let inf = calculus_integral(CalculusCase::LogPower, 2.0, 0.0, 1.0, f64::INFINITY).unwrap();
        assert!((inf.value - 1.0).abs() < 1e-12);
        assert_eq!(inf.bound, Some(1.0));
    }

    #[test]
    fn degenerate_third_case_is_plain_length() {
        let v = calculus_value(CalculusCase::SublinearLog, 0.0, 0.0, 1.0, 7.0).unwrap();
        assert!((v.0 - 7.0).abs() < 1e-12);
        assert!(v.0 / v.1 < 1.0);
    }

    #[test]
    fn second_case_respects_gamma_function() {
        // int_1^inf e^{-beta u} u^m du <= Gamma(m+1) beta^{-(m+1)}
        let (v, unit, _) = calculus_value(CalculusCase::DampedLog, 2.0, 0.0, 0.5, f64::INFINITY).unwrap();
        let exact = (-0.5f64).exp() * (1.0 / 0.5 + 2.0 / 0.25 + 2.0 / 0.125);
        assert!((v - exact).abs() < 1e-10 * exact, "{v} vs {exact}");
        assert!(v / unit <= 2.0);
    }

    #[test]
    fn range_errors() {
        assert!(calculus_value(CalculusCase::LogPower, 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(calculus_value(CalculusCase::DampedLog, 1.0, 0.0, 0.0, 1.0).is_err());
        assert!(calculus_value(CalculusCase::SublinearLog, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(calculus_value(CalculusCase::SublinearLog, 1.0, 0.5, 1.0, f64::INFINITY).is_err());
        assert!(CalculusCase::from_index(4).is_err());
    }

    #[test]
    fn constants_parse() {
        let m = parse_constants("# c\na.b=1 = 2.5\n\nx = 1e-3 # t\n", "mem").unwrap();
        assert_eq!(m["a.b=1"], 2.5);
        assert_eq!(m["x"], 1e-3);
        assert!(parse_constants("junk\n", "mem").is_err());
    }
}
