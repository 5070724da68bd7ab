//! Repeated fits over independent synthetic datasets and initializations.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::algo::{fit_from, Algorithm, SolverSettings};
use crate::baselines::random_init;
use crate::datagen::make_synthetic;
use crate::error::{arg_err, Result};
use crate::rng::{derive_seed, name_hash, Rng};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchConfig {
    pub datasets: usize,
    pub seeds_per_dataset: usize,
    pub algos: Vec<Algorithm>,
    /// `(I, J, K)`.
    pub dims: (usize, usize, usize),
    pub master_seed: u64,
    /// Independent runs executed concurrently.
    pub parallel_runs: usize,
    pub solver: SolverSettings,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            datasets: 10,
            seeds_per_dataset: 4,
            algos: vec![
                Algorithm::Mu,
                Algorithm::Game,
                Algorithm::GameJmin,
                Algorithm::GameJmax,
            ],
            dims: (100, 20, 3),
            master_seed: 0,
            parallel_runs: 1,
            solver: SolverSettings::default(),
        }
    }
}

/// Seed of dataset `d`.
pub fn dataset_seed(master: u64, dataset: usize) -> u64 {
    derive_seed(&[master, dataset as u64])
}

/// Seed of initialization `run` for `algo` on dataset `d`.
pub fn init_seed(master: u64, dataset: usize, algo: Algorithm, run: usize) -> u64 {
    derive_seed(&[master, dataset as u64, name_hash(algo.name()), run as u64])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRun {
    pub dataset: usize,
    pub algo: Algorithm,
    pub seed: usize,
    pub final_error: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchSummary {
    pub dataset: usize,
    pub algo: Algorithm,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    /// Sorted by `(dataset, algo, seed)`.
    pub runs: Vec<BenchRun>,
    /// Sorted by `(dataset, algo)`.
    pub summary: Vec<BenchSummary>,
    pub config: BenchConfig,
}

/// Mean and population standard deviation (divides by `n`).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    if config.datasets == 0 || config.seeds_per_dataset == 0 {
        return Err(arg_err!("datasets and seeds_per_dataset must be at least 1"));
    }
    if config.algos.is_empty() {
        return Err(arg_err!("no algorithms selected"));
    }
    if config.parallel_runs == 0 {
        return Err(arg_err!("parallel_runs must be at least 1"));
    }
    let (i, j, k) = config.dims;
    let datasets: Vec<_> = (0..config.datasets)
        .map(|d| make_synthetic(&mut Rng::new(dataset_seed(config.master_seed, d)), i, j, k))
        .collect::<Result<_>>()?;

    let mut jobs = Vec::new();
    for d in 0..config.datasets {
        for &algo in &config.algos {
            for r in 0..config.seeds_per_dataset {
                jobs.push((d, algo, r));
            }
        }
    }
    jobs.sort();
    jobs.dedup();

    let run_one = |&(d, algo, r): &(usize, Algorithm, usize)| -> Result<BenchRun> {
        let x = datasets[d].x_syn.as_mat();
        let mut rng = Rng::new(init_seed(config.master_seed, d, algo, r));
        let (w0, h0) = random_init(&mut rng, i, j, k)?;
        let fit = fit_from(algo, x, w0, h0, &config.solver)?;
        Ok(BenchRun {
            dataset: d,
            algo,
            seed: r,
            final_error: fit.reconstruction_error(x)?,
            wall_ms: fit.trace.wall_ms.iter().sum(),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallel_runs)
        .build()
        .map_err(|e| arg_err!("cannot start {} workers: {e}", config.parallel_runs))?;
    let runs: Vec<BenchRun> = pool.install(|| jobs.par_iter().map(run_one).collect::<Result<_>>())?;

    Ok(BenchReport {
        summary: summarize(&runs),
        runs,
        config: config.clone(),
    })
}

/// Aggregates per-run errors into mean and sd per `(dataset, algo)`.
pub fn summarize(runs: &[BenchRun]) -> Vec<BenchSummary> {
    let mut groups: BTreeMap<(usize, Algorithm), Vec<(usize, f64)>> = BTreeMap::new();
    for r in runs {
        groups.entry((r.dataset, r.algo)).or_default().push((r.seed, r.final_error));
    }
    groups
        .into_iter()
        .map(|((dataset, algo), mut v)| {
            v.sort_by_key(|&(s, _)| s);
            let errors: Vec<f64> = v.into_iter().map(|(_, e)| e).collect();
            let (mean, sd) = mean_sd(&errors);
            BenchSummary { dataset, algo, mean, sd }
        })
        .collect()
}

impl BenchReport {
    pub fn mean(&self, dataset: usize, algo: Algorithm) -> Option<f64> {
        self.summary
            .iter()
            .find(|s| s.dataset == dataset && s.algo == algo)
            .map(|s| s.mean)
    }

    /// Writes `bench.csv` and `bench_summary.csv` into `dir`.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(dir.join("bench.csv"))?;
        w.write_record(["dataset", "algo", "seed", "final_error", "wall_ms"])?;
        for r in &self.runs {
            w.write_record([
                r.dataset.to_string(),
                r.algo.to_string(),
                r.seed.to_string(),
                format!("{:.17e}", r.final_error),
                format!("{:.3}", r.wall_ms),
            ])?;
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("bench_summary.csv"))?;
        w.write_record(["dataset", "algo", "mean", "sd"])?;
        for s in &self.summary {
            w.write_record([
                s.dataset.to_string(),
                s.algo.to_string(),
                format!("{:.17e}", s.mean),
                format!("{:.17e}", s.sd),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
