//! Trajectories of the basis rows of `H` during a fit, projected onto the
//! top principal components of all snapshots taken together.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::algo::{fit_from, Algorithm, SolverSettings};
use crate::baselines::random_init;
use crate::datagen::make_synthetic;
use crate::eigengame::{exact_pca, project_rows, PcaResult};
use crate::error::{arg_err, Result};
use crate::matrix::Mat;
use crate::rng::{derive_seed, Rng};

/// Number of principal components used for the projection.
pub const TRAJ_COMPONENTS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajConfig {
    pub dims: (usize, usize, usize),
    pub snapshot_every: usize,
    pub algos: Vec<Algorithm>,
    pub seed: u64,
    pub solver: SolverSettings,
}

impl Default for TrajConfig {
    fn default() -> Self {
        TrajConfig {
            dims: (100, 20, 3),
            snapshot_every: 10,
            algos: vec![
                Algorithm::Mu,
                Algorithm::Game,
                Algorithm::GameJmin,
                Algorithm::GameJmax,
            ],
            seed: 0,
            solver: SolverSettings::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajPoint {
    pub algo: Algorithm,
    pub iter: usize,
    pub row: usize,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct TrajReport {
    pub raw: Vec<TrajPoint>,
    /// Same order as `raw`; coordinates on the top components.
    pub projected: Vec<TrajPoint>,
    pub pca: PcaResult,
    /// Mean over an algorithm's trajectories of [`step_variance`].
    pub step_variance: BTreeMap<Algorithm, f64>,
}

/// Mean squared deviation of the step vectors `p[t+1] - p[t]` from their mean.
///
/// Zero for a path moving at constant velocity; large for zig-zagging paths.
pub fn step_variance(path: &[&[f64]]) -> f64 {
    if path.len() < 2 {
        return 0.0;
    }
    let steps: Vec<Vec<f64>> = path
        .windows(2)
        .map(|w| w[1].iter().zip(w[0]).map(|(a, b)| a - b).collect())
        .collect();
    let dim = steps[0].len();
    let n = steps.len() as f64;
    let mean: Vec<f64> = (0..dim).map(|c| steps.iter().map(|s| s[c]).sum::<f64>() / n).collect();
    steps
        .iter()
        .map(|s| s.iter().zip(&mean).map(|(a, m)| (a - m) * (a - m)).sum::<f64>())
        .sum::<f64>()
        / n
}

pub fn run_trajectories(config: &TrajConfig) -> Result<TrajReport> {
    let (i, j, k) = config.dims;
    if config.snapshot_every == 0 {
        return Err(arg_err!("snapshot_every must be at least 1"));
    }
    if j < TRAJ_COMPONENTS {
        return Err(arg_err!("trajectory projection needs J >= {TRAJ_COMPONENTS}, got {j}"));
    }
    if config.algos.is_empty() {
        return Err(arg_err!("no algorithms selected"));
    }
    let data = make_synthetic(&mut Rng::new(derive_seed(&[config.seed, 0])), i, j, k)?;
    let (w0, h0) = random_init(&mut Rng::new(derive_seed(&[config.seed, 1])), i, j, k)?;
    let settings = SolverSettings {
        snapshot_every: Some(config.snapshot_every),
        ..config.solver.clone()
    };

    let mut raw = Vec::new();
    for &algo in &config.algos {
        let fit = fit_from(algo, &data.x_syn, w0.clone(), h0.clone(), &settings)?;
        for snap in &fit.trace.snapshots {
            for r in 0..snap.h.rows() {
                raw.push(TrajPoint {
                    algo,
                    iter: snap.iter,
                    row: r,
                    values: snap.h.row(r).to_vec(),
                });
            }
        }
    }

    let stacked = Mat::from_vec(raw.len(), j, raw.iter().flat_map(|p| p.values.iter().copied()).collect())?;
    let pca = exact_pca(&stacked, TRAJ_COMPONENTS)?;
    let coords = project_rows(&stacked, &pca)?;
    let projected: Vec<TrajPoint> = raw
        .iter()
        .enumerate()
        .map(|(n, p)| TrajPoint {
            values: coords.row(n).to_vec(),
            ..p.clone()
        })
        .collect();

    let mut paths: BTreeMap<(Algorithm, usize), Vec<(usize, &[f64])>> = BTreeMap::new();
    for p in &projected {
        paths.entry((p.algo, p.row)).or_default().push((p.iter, &p.values));
    }
    let mut per_algo: BTreeMap<Algorithm, Vec<f64>> = BTreeMap::new();
    for ((algo, _), mut path) in paths {
        path.sort_by_key(|&(it, _)| it);
        let pts: Vec<&[f64]> = path.into_iter().map(|(_, v)| v).collect();
        per_algo.entry(algo).or_default().push(step_variance(&pts));
    }
    let step_variance = per_algo
        .into_iter()
        .map(|(a, v)| (a, v.iter().sum::<f64>() / v.len() as f64))
        .collect();

    Ok(TrajReport {
        raw,
        projected,
        pca,
        step_variance,
    })
}

impl TrajReport {
    /// Writes `traj.csv`, `traj_projected.csv`, `traj_ratios.csv` and
    /// `traj_smoothness.csv` into `dir`.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        write_points(&dir.join("traj.csv"), &self.raw, "v")?;
        write_points(&dir.join("traj_projected.csv"), &self.projected, "pc")?;

        let mut w = csv::Writer::from_path(dir.join("traj_ratios.csv"))?;
        w.write_record(["component", "explained_variance", "ratio"])?;
        for (c, (ev, r)) in self
            .pca
            .explained_variance
            .iter()
            .zip(&self.pca.explained_variance_ratio)
            .enumerate()
        {
            w.write_record([format!("pc{}", c + 1), format!("{ev:.17e}"), format!("{r:.17e}")])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("traj_smoothness.csv"))?;
        w.write_record(["algo", "step_variance"])?;
        for (a, v) in &self.step_variance {
            w.write_record([a.to_string(), format!("{v:.17e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn write_points(path: &Path, points: &[TrajPoint], prefix: &str) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let width = points.first().map_or(0, |p| p.values.len());
    let first = if prefix == "pc" { 1 } else { 0 };
    let mut header = vec!["algo".to_string(), "iter".into(), "row_index".into()];
    header.extend((0..width).map(|c| format!("{prefix}{}", c + first)));
    w.write_record(&header)?;
    for p in points {
        let mut rec = vec![p.algo.to_string(), p.iter.to_string(), p.row.to_string()];
        rec.extend(p.values.iter().map(|v| format!("{v:.17e}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
