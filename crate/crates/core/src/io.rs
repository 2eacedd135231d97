//! File formats: branch tables, profile dumps, trajectories and sweep
//! reports. Writers produce text so callers can hash or annotate it before
//! it reaches disk.

use serde::{Deserialize, Serialize};

use crate::bifurcation::{Branch, BranchPoint, BranchStatus, ContinuationSettings};
use crate::error::{Error, Result};
use crate::evolution::{EvolutionConfig, Trajectory};
use crate::holder::SweepRecord;
use crate::model::{CosineSeries, ModelParams};
use crate::spectral::grid_points;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn fmt(v: f64) -> String {
    format!("{v:.17e}")
}

/// One row per point: `s, c, residual_norm, newton_iters, phi_1 … phi_n`,
/// where `phi_j` is the amplitude of `cos(mjx)`.
pub fn branch_csv(branch: &Branch) -> Result<String> {
    let n = branch.settings.n;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["s".to_string(), "c".into(), "residual_norm".into(), "newton_iters".into()];
    header.extend((1..=n).map(|j| format!("phi_{j}")));
    w.write_record(&header)?;
    for pt in &branch.points {
        let mut row = vec![fmt(pt.s), fmt(pt.c), fmt(pt.residual_norm), pt.newton_iters.to_string()];
        row.extend(pt.fold_coeffs(branch.m).into_iter().map(fmt));
        w.write_record(&row)?;
    }
    finish(w)
}

/// Parses [`branch_csv`] output (lines starting with `#` are ignored).
pub fn read_branch_csv(text: &str, m: usize) -> Result<Vec<BranchPoint>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() < 5 {
            return Err(Error::Dimension(format!("branch record has {} fields", rec.len())));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("field {i}: {e}")))
        };
        let iters = rec[3]
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Config(format!("newton_iters: {e}")))?;
        let n = rec.len() - 4;
        let mut a = vec![0.0; m * n + 1];
        for j in 1..=n {
            a[m * j] = num(3 + j)?;
        }
        points.push(BranchPoint {
            s: num(0)?,
            c: num(1)?,
            phi: CosineSeries::new(a)?,
            residual_norm: num(2)?,
            newton_iters: iters,
        });
    }
    Ok(points)
}

/// Metadata that accompanies a branch table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchEnvelope {
    pub code_version: String,
    pub params: ModelParams,
    pub m: usize,
    pub n: usize,
    pub tolerances: ContinuationSettings,
    pub status: BranchStatus,
    pub points: usize,
    pub critical_speed: f64,
}

impl BranchEnvelope {
    pub fn new(branch: &Branch) -> Self {
        Self {
            code_version: CODE_VERSION.into(),
            params: branch.params,
            m: branch.m,
            n: branch.settings.n,
            tolerances: branch.settings,
            status: branch.status.clone(),
            points: branch.points.len(),
            critical_speed: branch.points[0].c,
        }
    }
}

/// Grid values of every profile: column `x`, then one column per point
/// named `s=<value>`.
pub fn profile_csv(points: &[&BranchPoint], grid: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["x".to_string()];
    header.extend(points.iter().map(|pt| format!("s={}", fmt(pt.s))));
    w.write_record(&header)?;
    let cols: Vec<Vec<f64>> = points.iter().map(|pt| pt.phi.field().values_on(grid)).collect();
    for (i, x) in grid_points(grid).enumerate() {
        let mut row = vec![fmt(x)];
        row.extend(cols.iter().map(|c| fmt(c[i])));
        w.write_record(&row)?;
    }
    finish(w)
}

/// One `(x, f)` table per save time.
pub fn trajectory_csvs(traj: &Trajectory, grid: usize) -> Result<Vec<(f64, String)>> {
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, f)| {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["x", "f"])?;
            for (x, v) in grid_points(grid).zip(f.values_on(grid)) {
                w.write_record([fmt(x), fmt(v)])?;
            }
            Ok((t, finish(w)?))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryManifest {
    pub code_version: String,
    pub params: ModelParams,
    pub config: EvolutionConfig,
    pub effective_dt: f64,
    pub steps: usize,
    pub dt_max: f64,
    pub save_times: Vec<f64>,
    pub initial_mass: f64,
    pub max_mass_drift: f64,
}

impl TrajectoryManifest {
    pub fn new(traj: &Trajectory, params: &ModelParams, config: &EvolutionConfig) -> Self {
        Self {
            code_version: CODE_VERSION.into(),
            params: *params,
            config: *config,
            effective_dt: traj.dt,
            steps: traj.steps,
            dt_max: traj.dt_max,
            save_times: traj.times.clone(),
            initial_mass: traj.initial_mass,
            max_mass_drift: traj.max_mass_drift,
        }
    }
}

/// `seed, tier, degree_a, degree_b, alpha, ratio` per ensemble member.
pub fn sweep_csv(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "tier", "degree_a", "degree_b", "alpha", "ratio"])?;
    for r in records {
        w.write_record([
            r.seed.to_string(),
            r.tier.to_string(),
            r.degree_a.to_string(),
            r.degree_b.to_string(),
            fmt(r.alpha),
            fmt(r.ratio),
        ])?;
    }
    finish(w)
}
