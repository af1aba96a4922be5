use crate::besov::{block_norms, besov_norm, j_max, BesovSpec, DyadicDecomposition};
use crate::error::{invalid, Result};
use crate::par::Execution;
use crate::solver::{check_cfl, transport_nodal, AdvectionScheme};
use crate::spectral::{derivative, lp_norm_nodal, Grid, SpectralField, VelocityField};

/// Velocity driving the transport experiment.
#[derive(Clone, Debug)]
pub enum VelocitySource {
    Steady(VelocityField),
    /// Piecewise constant in time: each field applies from its start time
    /// until the next one.
    Piecewise(Vec<(f64, VelocityField)>),
}

impl VelocitySource {
    pub fn at(&self, t: f64) -> &VelocityField {
        match self {
            VelocitySource::Steady(u) => u,
            VelocitySource::Piecewise(seq) => {
                let i = seq.partition_point(|(s, _)| *s <= t).saturating_sub(1);
                &seq[i].1
            }
        }
    }

    fn grid(&self) -> &Grid {
        match self {
            VelocitySource::Steady(u) => u.grid(),
            VelocitySource::Piecewise(seq) => seq[0].1.grid(),
        }
    }
}

/// `||grad u||_{B^0_{inf,2}}`: the `l^2` sum over blocks of the largest
/// `L^inf` norm among the four gradient components.
pub fn grad_besov_0_inf_2(u: &VelocityField) -> f64 {
    let comps = [
        derivative(u.u1(), 0),
        derivative(u.u1(), 1),
        derivative(u.u2(), 0),
        derivative(u.u2(), 1),
    ];
    let per: Vec<Vec<f64>> = comps
        .iter()
        .map(|c| block_norms(&DyadicDecomposition::new(c), f64::INFINITY))
        .collect();
    let mut s = 0.0;
    for j in 0..per[0].len() {
        let m = per.iter().map(|p| p[j]).fold(0.0, f64::max);
        s += m * m;
    }
    s.sqrt()
}

#[derive(Clone, Debug)]
pub struct BlockTransportExperiment {
    pub rho0: SpectralField,
    pub velocity: VelocitySource,
    pub eta: f64,
    pub horizon: f64,
    pub dt: f64,
    /// Number of recorded samples, including `t = 0` and the horizon.
    pub samples: usize,
    pub scheme: AdvectionScheme,
    pub cfl_max: f64,
    pub execution: Execution,
}

/// One recorded time of the experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub t: f64,
    /// `int_0^t ||grad u||_{B^0_{inf,2}}`
    pub integral: f64,
    /// `||rho(t)||_{B^{eta ln}_{inf,1}}`, measured directly.
    pub norm: f64,
    /// Block-index cut `N = ceil(2 integral / ln 2)`.
    pub cut: i32,
    /// Contributions `sum_q (2+q)^eta sum_j ||Delta_q rho_j||_inf` from
    /// `j < q/2 - N`, the middle band, and `j > 3q/2 + N`.
    pub low: f64,
    pub middle: f64,
    pub high: f64,
    /// `C_fit ||rho0||_{B^{(eta+1) ln}} max(1, integral)^{eta+1}`
    pub bound: f64,
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub eta: f64,
    pub rows: Vec<GrowthRow>,
    pub c_fit: f64,
    /// `||rho0||_{B^{(eta+1) ln}_{inf,1}}`
    pub initial_strong_norm: f64,
    /// Log-log slope of `norm` against `integral` over samples with
    /// `integral >= 1`; `None` with fewer than three such samples.
    pub degree: Option<f64>,
    /// `max_t ||sum_j rho_j(t) - rho(t)||_{L^2} / ||rho(t)||_{L^2}`.
    pub superposition_error: f64,
    /// `max_{j,t} ||rho_j(t)||_inf / ||Delta_j rho0||_inf`.
    pub block_linf_growth: f64,
    /// `A[q][j] = ||Delta_q rho_j(t)||_inf` at each sample, indexed from -1.
    pub matrices: Vec<Vec<Vec<f64>>>,
}

fn loglog_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = pts.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn l2_nodal(v: &[f64], grid: &Grid) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() * grid.cell_area()).sqrt()
}

impl BlockTransportExperiment {
    fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(invalid("eta", "must be positive"));
        }
        if !(self.horizon > 0.0 && self.dt > 0.0) {
            return Err(invalid("horizon", "horizon and dt must be positive"));
        }
        if self.samples < 2 {
            return Err(invalid("samples", "need at least two"));
        }
        if self.velocity.grid() != self.rho0.grid() {
            return Err(crate::error::Error::GridMismatch);
        }
        if let VelocitySource::Piecewise(seq) = &self.velocity {
            if seq.is_empty() || seq[0].0 > 0.0 {
                return Err(invalid("velocity", "piecewise velocity must start at t = 0"));
            }
        }
        Ok(())
    }

    pub fn run(&self) -> Result<GrowthReport> {
        self.validate()?;
        let grid = *self.rho0.grid();
        let steps = (self.horizon / self.dt - 1e-9).ceil() as usize;
        let dt = self.horizon / steps as f64;
        let record: Vec<usize> = (0..self.samples)
            .map(|i| ((i * steps) as f64 / (self.samples - 1) as f64).round() as usize)
            .collect();

        // velocity-dependent data per step, shared by every block
        let mut nodal_u = Vec::with_capacity(steps);
        let mut integral = vec![0.0; steps + 1];
        let mut cache: Option<(*const VelocityField, f64, (Vec<f64>, Vec<f64>))> = None;
        for k in 0..steps {
            let t = k as f64 * dt;
            let u = self.velocity.at(t);
            let key = u as *const VelocityField;
            let fresh = !matches!(&cache, Some((p, _, _)) if *p == key);
            if fresh {
                check_cfl(u, dt, self.cfl_max)?;
                cache = Some((key, grad_besov_0_inf_2(u), u.to_nodal()));
            }
            let (_, g, un) = cache.as_ref().expect("filled above");
            integral[k + 1] = integral[k] + g * dt;
            nodal_u.push(un.clone());
        }

        let dec = DyadicDecomposition::new(&self.rho0);
        let jm = dec.j_max();
        let initial_blocks: Vec<Vec<f64>> = dec.blocks().iter().map(SpectralField::to_nodal).collect();
        let scheme = self.scheme;
        let march = |f0: &Vec<f64>| -> Vec<Vec<f64>> {
            let mut out = Vec::with_capacity(record.len());
            let mut f = f0.clone();
            let mut next = 0;
            for k in 0..=steps {
                while next < record.len() && record[next] == k {
                    out.push(f.clone());
                    next += 1;
                }
                if k < steps && f.iter().any(|&v| v != 0.0) {
                    f = transport_nodal(&f, &nodal_u[k], grid, dt, scheme);
                }
            }
            out
        };
        let block_paths = self.execution.map(&initial_blocks, march);
        let direct = march(&self.rho0.to_nodal());

        let weights: Vec<f64> = (-1..=jm).map(|q| (2.0 + q as f64).powf(self.eta)).collect();
        let initial_strong_norm = besov_norm(&self.rho0, BesovSpec::Logarithmic { eta: self.eta + 1.0 });
        let init_linf: Vec<f64> = initial_blocks
            .iter()
            .map(|b| lp_norm_nodal(b, &grid, f64::INFINITY).expect("p valid"))
            .collect();

        let mut rows = Vec::with_capacity(record.len());
        let mut matrices = Vec::with_capacity(record.len());
        let mut superposition_error: f64 = 0.0;
        let mut block_linf_growth: f64 = 0.0;
        for (s, &k) in record.iter().enumerate() {
            let t = k as f64 * dt;
            let blocks_t: Vec<&Vec<f64>> = block_paths.iter().map(|p| &p[s]).collect();
            let mut sum = vec![0.0; grid.len()];
            for b in &blocks_t {
                for (a, v) in sum.iter_mut().zip(b.iter()) {
                    *a += v;
                }
            }
            let diff: Vec<f64> = sum.iter().zip(&direct[s]).map(|(a, b)| a - b).collect();
            let scale = l2_nodal(&direct[s], &grid);
            if scale > 0.0 {
                superposition_error = superposition_error.max(l2_nodal(&diff, &grid) / scale);
            }
            for (b, &n0) in blocks_t.iter().zip(&init_linf) {
                if n0 > 0.0 {
                    let n = lp_norm_nodal(b, &grid, f64::INFINITY)?;
                    block_linf_growth = block_linf_growth.max(n / n0);
                }
            }
            // A[q][j] with both indices offset by one
            let cols: Vec<Vec<f64>> = self.execution.map(&blocks_t, |b| {
                let f = SpectralField::from_nodal(grid, b).expect("grid-shaped");
                block_norms(&DyadicDecomposition::new(&f), f64::INFINITY)
            });
            let nq = (jm + 2) as usize;
            let matrix: Vec<Vec<f64>> = (0..nq).map(|q| cols.iter().map(|c| c[q]).collect()).collect();
            let cut = (2.0 * integral[k] / std::f64::consts::LN_2).ceil() as i32;
            let (mut low, mut middle, mut high) = (0.0, 0.0, 0.0);
            for qi in 0..nq {
                let q = qi as f64 - 1.0;
                for ji in 0..nq {
                    let j = ji as f64 - 1.0;
                    let v = weights[qi] * matrix[qi][ji];
                    if j < q / 2.0 - cut as f64 {
                        low += v;
                    } else if j > 1.5 * q + cut as f64 {
                        high += v;
                    } else {
                        middle += v;
                    }
                }
            }
            let rho_t = SpectralField::from_nodal(grid, &direct[s])?;
            let norm = besov_norm(&rho_t, BesovSpec::Logarithmic { eta: self.eta });
            rows.push(GrowthRow {
                t,
                integral: integral[k],
                norm,
                cut,
                low,
                middle,
                high,
                bound: 0.0,
            });
            matrices.push(matrix);
        }

        let unit = |row: &GrowthRow| initial_strong_norm * row.integral.max(1.0).powf(self.eta + 1.0);
        let c_fit = rows
            .iter()
            .filter(|r| unit(r) > 0.0)
            .map(|r| r.norm / unit(r))
            .fold(0.0, f64::max);
        for r in rows.iter_mut() {
            r.bound = c_fit * unit(r);
        }
        let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.integral >= 1.0).map(|r| (r.integral, r.norm)).collect();
        let _ = j_max(&grid);
        Ok(GrowthReport {
            eta: self.eta,
            degree: loglog_slope(&pts),
            rows,
            c_fit,
            initial_strong_norm,
            superposition_error,
            block_linf_growth,
            matrices,
        })
    }
}

impl GrowthReport {
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "integral", "norm", "cut", "low", "middle", "high", "bound"])?;
        for r in &self.rows {
            w.write_record([
                format!("{:e}", r.t),
                format!("{:e}", r.integral),
                format!("{:e}", r.norm),
                r.cut.to_string(),
                format!("{:e}", r.low),
                format!("{:e}", r.middle),
                format!("{:e}", r.high),
                format!("{:e}", r.bound),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Dense `(q, j)` matrix at one sample; row `q`, column `j`, both from -1.
    pub fn write_matrix_csv(&self, sample: usize, path: &std::path::Path) -> Result<()> {
        let m = &self.matrices[sample];
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["q".to_string()];
        header.extend((0..m.len()).map(|j| format!("j{}", j as i32 - 1)));
        w.write_record(&header)?;
        for (qi, row) in m.iter().enumerate() {
            let mut rec = vec![(qi as i32 - 1).to_string()];
            rec.extend(row.iter().map(|v| format!("{v:e}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl BlockTransportExperiment {
    /// Experiment described by the `[transport]` table of a config: a random
    /// density `1 + phi / (2 max|phi|)` with modes up to `k_cut`, moved by
    /// the configured synthetic flow.
    pub fn from_config(cfg: &crate::config::SimConfig, execution: Execution) -> Result<Self> {
        use crate::config::TransportFlow;
        let tc = cfg
            .transport
            .as_ref()
            .ok_or_else(|| crate::error::Error::Config("missing [transport] table".into()))?;
        let grid = cfg.grid()?;
        let phi = crate::random::random_field_in(grid, cfg.seed, tc.k_cut, crate::random::Stream::Transport);
        let mut phi = phi;
        phi.coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
        let peak = lp_norm_nodal(&phi.to_nodal(), &grid, f64::INFINITY)?;
        let mut rho0 = if peak > 0.0 { phi.scaled(0.5 / peak) } else { phi };
        rho0.coeffs_mut()[0] += 1.0;
        let u = match tc.flow {
            TransportFlow::Shear { amplitude, mode } => super::shear_velocity(&grid, amplitude, mode),
            TransportFlow::Rotation { omega } => super::rotation_velocity(&grid, omega),
            TransportFlow::Still => VelocityField::zeros(grid),
        };
        Ok(BlockTransportExperiment {
            rho0,
            velocity: VelocitySource::Steady(u),
            eta: tc.eta,
            horizon: tc.horizon,
            dt: tc.dt,
            samples: tc.samples,
            scheme: tc.scheme,
            cfl_max: cfg.physics.cfl_max,
            execution,
        })
    }
}
