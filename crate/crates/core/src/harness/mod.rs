//! Experiment drivers: repeated benchmarks, basis trajectories and the
//! per-iteration cost model.

mod algo;
mod bench;
mod config;
mod cost;
mod traj;

pub use algo::{fit_from, Algorithm, SolverSettings};
pub use bench::{
    dataset_seed, init_seed, mean_sd, run_benchmark, summarize, BenchConfig, BenchReport,
    BenchRun, BenchSummary,
};
pub use config::KvConfig;
pub use cost::{cost_model, CostEstimate, CostTerm};
pub use traj::{run_trajectories, step_variance, TrajConfig, TrajPoint, TrajReport, TRAJ_COMPONENTS};
