use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::density::{transport_tendency, DensityField};
use super::momentum::{weighted_square, FlowState, ForceDecomposition, Tendency};
use super::stepper::{StepOptions, Stepper};
use super::viscosity::ViscosityLaw;
use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::harness::{gen_initial_density, gen_initial_velocity};
use crate::spectral::{derivative, Grid, SpectralField, VelocityField};

/// Scalar diagnostics at one sampled instant.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub l2_u: f64,
    pub l2_grad_u: f64,
    pub l2_ut: f64,
    pub p_div: f64,
    pub q_div_minus_gradpi: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    /// `||sqrt(rho) u||^2`
    pub energy: f64,
    /// `int mu(rho) |grad u|^2`
    pub dissipation: f64,
    /// `||sqrt(rho) u_t||^2`
    pub rho_ut_sq: f64,
    /// `int rho_t |u|^2 + 2 int rho u . u_t`
    pub denergy_dt: f64,
    /// Projection iterations used at this state.
    pub iterations: usize,
}

/// Column order of the diagnostics CSV.
pub const DIAGNOSTIC_COLUMNS: [&str; 9] = [
    "t",
    "l2_u",
    "l2_grad_u",
    "l2_ut",
    "p_div",
    "q_div_minus_gradpi",
    "min_rho",
    "max_rho",
    "energy",
];

/// Column order of the supplementary CSV.
pub const EXTRA_COLUMNS: [&str; 5] = ["t", "dissipation", "rho_ut_sq", "denergy_dt", "iterations"];

impl Sample {
    pub fn from_tendency(state: &FlowState, tend: &Tendency, law: &ViscosityLaw) -> Result<Self> {
        let grid = *state.grid();
        let forces = ForceDecomposition::from_tendency(state, tend)?;
        let un = state.u.to_nodal();
        let utn = tend.ut.to_nodal();
        let rho = state.rho.nodal();
        let mu = state.rho.map(|r| law.eval(r));
        let grads = [
            derivative(state.u.u1(), 0).to_nodal(),
            derivative(state.u.u1(), 1).to_nodal(),
            derivative(state.u.u2(), 0).to_nodal(),
            derivative(state.u.u2(), 1).to_nodal(),
        ];
        let mut dissipation = 0.0;
        for k in 0..grid.len() {
            let g2: f64 = grads.iter().map(|g| g[k] * g[k]).sum();
            dissipation += mu[k] * g2;
        }
        dissipation *= grid.cell_area();

        let rho_t = transport_tendency(rho, &un, grid).to_nodal();
        let mut cross = 0.0;
        let mut drho = 0.0;
        for k in 0..grid.len() {
            cross += rho[k] * (un.0[k] * utn.0[k] + un.1[k] * utn.1[k]);
            drho += rho_t[k] * (un.0[k] * un.0[k] + un.1[k] * un.1[k]);
        }
        let denergy_dt = (drho + 2.0 * cross) * grid.cell_area();

        Ok(Sample {
            t: state.t,
            l2_u: state.u.l2_norm(),
            l2_grad_u: state.u.grad_l2_norm(),
            l2_ut: forces.ut_l2,
            p_div: forces.p_div,
            q_div_minus_gradpi: forces.q_div_minus_gradpi,
            min_rho: state.rho.min(),
            max_rho: state.rho.max(),
            energy: weighted_square(rho, &un, &grid),
            dissipation,
            rho_ut_sq: weighted_square(rho, &utn, &grid),
            denergy_dt,
            iterations: tend.iterations,
        })
    }

    pub fn diagnostic_row(&self) -> [f64; 9] {
        [
            self.t,
            self.l2_u,
            self.l2_grad_u,
            self.l2_ut,
            self.p_div,
            self.q_div_minus_gradpi,
            self.min_rho,
            self.max_rho,
            self.energy,
        ]
    }
}

/// Velocity energy `int |u_hat|^2 d xi` binned by integer `|k|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellSpectra {
    k0: f64,
    /// Distinct values of `kx^2 + ky^2`, ascending.
    k2: Vec<i64>,
    shell_of: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl ShellSpectra {
    pub fn new(grid: &Grid) -> Self {
        let mut keys: Vec<i64> = (0..grid.len())
            .map(|i| {
                let (a, b) = grid.k_of(i);
                a * a + b * b
            })
            .collect();
        let per_index = keys.clone();
        keys.sort_unstable();
        keys.dedup();
        let shell_of = per_index
            .iter()
            .map(|k| keys.binary_search(k).expect("key present"))
            .collect();
        ShellSpectra {
            k0: grid.k0(),
            k2: keys,
            shell_of,
            rows: Vec::new(),
        }
    }

    pub fn shell_energies(&self, u: &VelocityField) -> Vec<f64> {
        let area = u.grid().area();
        let mut row = vec![0.0; self.k2.len()];
        for (i, (a, b)) in u.u1().coeffs().iter().zip(u.u2().coeffs()).enumerate() {
            row[self.shell_of[i]] += area * (a.norm_sqr() + b.norm_sqr());
        }
        row
    }

    pub fn push(&mut self, u: &VelocityField) {
        let row = self.shell_energies(u);
        self.rows.push(row);
    }

    /// Pushes a precomputed row (must match the shell layout).
    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.k2.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Shell radii `|xi|` in ascending order.
    pub fn radii(&self) -> Vec<f64> {
        self.k2.iter().map(|&k| self.k0 * (k as f64).sqrt()).collect()
    }

    pub fn row(&self, sample: usize) -> &[f64] {
        &self.rows[sample]
    }

    /// `int_{|xi| <= radius} |u_hat|^2 d xi` at a sample.
    pub fn energy_within(&self, sample: usize, radius: f64) -> f64 {
        let lim = radius / self.k0;
        let lim2 = lim * lim * (1.0 + 1e-12);
        let end = self.k2.partition_point(|&k| (k as f64) <= lim2);
        self.rows[sample][..end].iter().sum()
    }
}

/// Output of [`run`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: Grid,
    pub mu0: f64,
    pub dt: f64,
    pub samples: Vec<Sample>,
    pub spectra: Option<ShellSpectra>,
    pub initial: FlowState,
    pub final_state: FlowState,
    pub snapshots: Vec<PathBuf>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn write_diagnostics(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(DIAGNOSTIC_COLUMNS)?;
        for s in &self.samples {
            w.write_record(s.diagnostic_row().iter().map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_extras(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(EXTRA_COLUMNS)?;
        for s in &self.samples {
            w.write_record([
                format!("{:e}", s.t),
                format!("{:e}", s.dissipation),
                format!("{:e}", s.rho_ut_sq),
                format!("{:e}", s.denergy_dt),
                s.iterations.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a diagnostics CSV written by [`Trajectory::write_diagnostics`].
pub fn read_diagnostics(path: &Path) -> Result<Vec<Sample>> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().ne(DIAGNOSTIC_COLUMNS.iter().copied()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "unexpected diagnostics header".into(),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let v: Vec<f64> = rec
            .iter()
            .map(|x| x.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                message: e.to_string(),
            })?;
        out.push(Sample {
            t: v[0],
            l2_u: v[1],
            l2_grad_u: v[2],
            l2_ut: v[3],
            p_div: v[4],
            q_div_minus_gradpi: v[5],
            min_rho: v[6],
            max_rho: v[7],
            energy: v[8],
            ..Sample::default()
        });
    }
    Ok(out)
}

const SNAPSHOT_MAGIC: &[u8; 8] = b"LPDSNAP1";
const SNAPSHOT_VERSION: u32 = 1;

/// Writes `state` as: magic `LPDSNAP1`, `u32` version, `u32 n`, `f64 l`,
/// `f64` dealias fraction, `f64 t`, `u32` field count (3), then the spectral
/// coefficients of `u1`, `u2`, `rho`, each as `n*n` `(re, im)` pairs of `f64`.
/// All values little endian.
pub fn write_snapshot(path: &Path, state: &FlowState) -> Result<()> {
    let g = state.grid();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    w.write_all(&g.l().to_le_bytes())?;
    w.write_all(&g.dealias_fraction().to_le_bytes())?;
    w.write_all(&state.t.to_le_bytes())?;
    w.write_all(&3u32.to_le_bytes())?;
    let rho = state.rho.to_spectral();
    for f in [state.u.u1(), state.u.u2(), &rho] {
        for c in f.coeffs() {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn bad_snapshot(path: &Path, message: &str) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: message.into(),
    }
}

/// Reads the fields of a snapshot file.
pub fn read_snapshot_fields(path: &Path) -> Result<(f64, Vec<SpectralField>)> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(bad_snapshot(path, "not a snapshot file"));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    if u32::from_le_bytes(b4) != SNAPSHOT_VERSION {
        return Err(bad_snapshot(path, "unsupported snapshot version"));
    }
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b8)?;
    let l = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let dealias = f64::from_le_bytes(b8);
    r.read_exact(&mut b8)?;
    let t = f64::from_le_bytes(b8);
    r.read_exact(&mut b4)?;
    let nfields = u32::from_le_bytes(b4) as usize;
    let grid = Grid::with_dealias(n, l, dealias)?;
    let mut fields = Vec::with_capacity(nfields);
    for _ in 0..nfields {
        let mut coeffs = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            r.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            r.read_exact(&mut b8)?;
            coeffs.push(Complex64::new(re, f64::from_le_bytes(b8)));
        }
        fields.push(SpectralField::from_coeffs(grid, coeffs)?);
    }
    Ok((t, fields))
}

pub fn read_snapshot(path: &Path) -> Result<FlowState> {
    let (t, mut fields) = read_snapshot_fields(path)?;
    if fields.len() != 3 {
        return Err(bad_snapshot(path, "flow snapshot needs three fields"));
    }
    let rho = fields.pop().expect("three fields");
    let u2 = fields.pop().expect("three fields");
    let u1 = fields.pop().expect("three fields");
    FlowState::new(t, VelocityField::from_parts(u1, u2), DensityField::from_spectral(&rho)?)
}

/// Step options implied by a config.
pub fn step_options(config: &SimConfig) -> StepOptions {
    StepOptions {
        cfl_max: config.physics.cfl_max,
        scheme: config.physics.scheme,
        nonlinear: config.physics.nonlinear,
        overshoot: config.physics.overshoot,
        ..StepOptions::default()
    }
}

/// Initial state generated from a config.
pub fn initial_state(config: &SimConfig) -> Result<FlowState> {
    let grid = config.grid()?;
    let u0 = gen_initial_velocity(&config.initial_spec(), &grid)?;
    let rho0 = gen_initial_density(
        &grid,
        config.seed,
        config.physics.density_contrast,
        config.physics.density_k_cut,
    )?;
    FlowState::new(0.0, u0, rho0)
}

/// Integrates from `state` for `steps` steps of `dt`, sampling every
/// `sample_every` steps (and always at the end).
pub fn integrate(
    stepper: &Stepper,
    state: FlowState,
    dt: f64,
    steps: usize,
    sample_every: usize,
    snapshot_every: usize,
    out: Option<&Path>,
) -> Result<Trajectory> {
    let grid = *state.grid();
    let mut spectra = ShellSpectra::new(&grid);
    let mut samples = Vec::new();
    let mut snapshots = Vec::new();
    let snap_dir = match out {
        Some(dir) if snapshot_every > 0 => {
            let d = dir.join("snapshots");
            fs::create_dir_all(&d)?;
            Some(d)
        }
        _ => None,
    };
    let initial = state.clone();
    let mut cur = state;
    for k in 0..steps {
        if let Some(d) = &snap_dir {
            if k % snapshot_every == 0 {
                let p = d.join(format!("snap_{k:07}.bin"));
                write_snapshot(&p, &cur)?;
                snapshots.push(p);
            }
        }
        let (next, tend) = match stepper.advance(&cur, dt) {
            Ok(v) => v,
            Err(e) => {
                if let Some(dir) = out {
                    fs::create_dir_all(dir)?;
                    write_snapshot(&dir.join("last_valid.snap"), &cur)?;
                }
                return Err(e);
            }
        };
        if k % sample_every == 0 {
            samples.push(Sample::from_tendency(&cur, &tend, stepper.law())?);
            spectra.push(&cur.u);
        }
        cur = next;
    }
    let tend = stepper.tendency(&cur)?;
    samples.push(Sample::from_tendency(&cur, &tend, stepper.law())?);
    spectra.push(&cur.u);
    if let Some(d) = &snap_dir {
        let p = d.join(format!("snap_{steps:07}.bin"));
        write_snapshot(&p, &cur)?;
        snapshots.push(p);
    }
    Ok(Trajectory {
        grid,
        mu0: stepper.law().mu0(),
        dt,
        samples,
        spectra: Some(spectra),
        initial,
        final_state: cur,
        snapshots,
    })
}

/// Runs the experiment described by `config`. When `out` is given, snapshot
/// files land in `out/snapshots/` and a failing step leaves the last valid
/// state in `out/last_valid.snap`.
pub fn run(config: &SimConfig, out: Option<&Path>) -> Result<Trajectory> {
    config.validate()?;
    let state = initial_state(config)?;
    let stepper = Stepper::new(config.physics.viscosity.clone(), step_options(config), &state.rho)?;
    integrate(
        &stepper,
        state,
        config.time.dt,
        config.steps(),
        config.time.sample_every,
        config.time.snapshot_every,
        out,
    )
}
