use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use nnmf_game::baselines::random_init;
use nnmf_game::datagen::make_synthetic;
use nnmf_game::eigengame::{eigengame_pca, exact_pca, EigenConfig, PcaResult};
use nnmf_game::game::SelfGame;
use nnmf_game::harness::{
    cost_model, fit_from, run_benchmark, run_trajectories, Algorithm, BenchConfig, KvConfig,
    SolverSettings, TrajConfig,
};
use nnmf_game::{Error, Mat, Result, Rng};

#[derive(Parser)]
#[command(name = "nnmf-game", version, about = "Game-theoretic NNMF, baselines and EigenGame PCA")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic dataset with smooth basis rows
    Gen(GenArgs),
    /// Factorize a matrix file with one solver
    Fit(FitArgs),
    /// Repeated fits over independent datasets and initializations
    Bench(BenchArgs),
    /// Basis-row trajectories projected onto their top principal components
    Traj(TrajArgs),
    /// Principal components of a matrix file
    Pca(PcaArgs),
    /// Per-iteration cost model
    Cost(CostArgs),
}

#[derive(Args)]
struct Common {
    /// key=value file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    ridge: Option<f64>,
    /// jacobi or gauss-seidel
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    shrink: Option<f64>,
    /// Threads used inside one game fit
    #[arg(long)]
    workers: Option<usize>,
}

const SOLVER_KEYS: [&str; 7] = ["iters", "eta", "eps", "ridge", "schedule", "shrink", "workers"];

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: Common,
    /// mu, pg, nals, game, game-jmin or game-jmax
    #[arg(long)]
    algo: Option<String>,
    /// none, jmin or jmax; only with game algorithms
    #[arg(long)]
    self_game: Option<String>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    snapshot_every: Option<usize>,
    #[arg(long)]
    out_prefix: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    datasets: Option<usize>,
    #[arg(long)]
    seeds: Option<usize>,
    /// Comma-separated algorithm names
    #[arg(long)]
    algos: Option<String>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// Fits executed concurrently
    #[arg(long)]
    parallel_runs: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct TrajArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    algos: Option<String>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    snapshot_every: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct PcaArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    /// exact or eigengame
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CostArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    i: Option<u64>,
    #[arg(long)]
    j: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Flag values layered over a config file.
struct Layered {
    file: KvConfig,
}

impl Layered {
    fn load(common: &Common, known: &[&str]) -> Result<Self> {
        let file = match &common.config {
            Some(p) => KvConfig::load(p)?,
            None => KvConfig::default(),
        };
        let unknown = file.unknown_keys(known);
        if !unknown.is_empty() {
            return Err(Error::Parse(format!("unknown config keys: {}", unknown.join(", "))));
        }
        Ok(Layered { file })
    }

    fn opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.file.get(key),
        }
    }

    fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    fn required<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.opt(flag, key)?
            .ok_or_else(|| Error::Argument(format!("missing required --{}", key.replace('_', "-"))))
    }

    fn solver(&self, a: SolverArgs) -> Result<SolverSettings> {
        let d = SolverSettings::default();
        Ok(SolverSettings {
            iters: self.or(a.iters, "iters", d.iters)?,
            eta: self.or(a.eta, "eta", d.eta)?,
            eps: self.or(a.eps, "eps", d.eps)?,
            ridge: self.or(a.ridge, "ridge", d.ridge)?,
            schedule: self.or(a.schedule, "schedule", d.schedule)?,
            shrink: self.or(a.shrink, "shrink", d.shrink)?,
            workers: self.or(a.workers, "workers", d.workers)?,
            snapshot_every: None,
        })
    }
}

fn keys<'a>(own: &[&'a str]) -> Vec<&'a str> {
    own.iter().copied().chain(SOLVER_KEYS).collect()
}

fn out_dir(dir: PathBuf) -> Result<PathBuf> {
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_meta<C: Serialize>(path: &Path, command: &str, seed: u64, config: &C) -> Result<()> {
    let meta = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "master_seed": seed,
        "config": config,
    });
    std::fs::write(path, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

fn gen(a: GenArgs) -> Result<()> {
    let c = Layered::load(&a.common, &["i", "j", "k", "seed", "out_dir"])?;
    let (i, j, k) = (c.or(a.i, "i", 100)?, c.or(a.j, "j", 20)?, c.or(a.k, "k", 3)?);
    let seed = c.or(a.seed, "seed", 0)?;
    let dir = out_dir(c.or(a.out_dir, "out_dir", PathBuf::from("."))?)?;
    let data = make_synthetic(&mut Rng::new(seed), i, j, k)?;
    data.x_syn.save(&dir.join("x_syn.mat"))?;
    data.w_syn.save(&dir.join("w_syn.mat"))?;
    data.h_syn.save(&dir.join("h_syn.mat"))?;
    std::fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&data.meta())? + "\n")?;
    println!("wrote x_syn.mat w_syn.mat h_syn.mat meta.json to {}", dir.display());
    Ok(())
}

/// Resolves `--algo` together with `--self-game`.
fn resolve_algo(algo: Algorithm, self_game: Option<SelfGame>) -> Result<Algorithm> {
    match (algo.self_game(), self_game) {
        (_, None) => Ok(algo),
        (None, Some(_)) => Err(Error::Argument(format!("--self-game needs a game algorithm, got {algo}"))),
        (Some(SelfGame::None), Some(sg)) => Ok(match sg {
            SelfGame::None => Algorithm::Game,
            SelfGame::Jmin => Algorithm::GameJmin,
            SelfGame::Jmax => Algorithm::GameJmax,
        }),
        (Some(own), Some(sg)) if own == sg => Ok(algo),
        (Some(_), Some(sg)) => Err(Error::Argument(format!("--self-game {sg} conflicts with --algo {algo}"))),
    }
}

fn fit(a: FitArgs) -> Result<()> {
    let known = keys(&["algo", "self_game", "in", "k", "seed", "snapshot_every", "out_prefix"]);
    let c = Layered::load(&a.common, &known)?;
    let algo: Algorithm = c.required(a.algo, "algo")?.parse()?;
    let sg = c.opt(a.self_game, "self_game")?.map(|s| s.parse::<SelfGame>()).transpose()?;
    let algo = resolve_algo(algo, sg)?;
    let input: PathBuf = c.required(a.input, "in")?;
    let k = c.required(a.k, "k")?;
    let seed = c.or(a.seed, "seed", 0)?;
    let prefix: String = c.or(a.out_prefix, "out_prefix", "fit".to_string())?;
    let mut settings = c.solver(a.solver)?;
    settings.snapshot_every = c.opt(a.snapshot_every, "snapshot_every")?;

    let x = Mat::load(&input)?;
    let (w0, h0) = random_init(&mut Rng::new(seed), x.rows(), x.cols(), k)?;
    let f = fit_from(algo, &x, w0, h0, &settings)?;
    f.w.save(Path::new(&format!("{prefix}.W.mat")))?;
    f.h.save(Path::new(&format!("{prefix}.H.mat")))?;

    let mut w = csv::Writer::from_path(format!("{prefix}.trace.csv"))?;
    w.write_record(["iter", "error", "wall_ms"])?;
    for (t, (e, ms)) in f.trace.errors.iter().zip(&f.trace.wall_ms).enumerate() {
        w.write_record([(t + 1).to_string(), format!("{e:.17e}"), format!("{ms:.6}")])?;
    }
    w.flush()?;

    if settings.snapshot_every.is_some() {
        let mut w = csv::Writer::from_path(format!("{prefix}.traj.csv"))?;
        let mut header = vec!["iter".to_string(), "row_index".into()];
        header.extend((0..x.cols()).map(|c| format!("v{c}")));
        w.write_record(&header)?;
        for s in &f.trace.snapshots {
            for r in 0..s.h.rows() {
                let mut rec = vec![s.iter.to_string(), r.to_string()];
                rec.extend(s.h.row(r).iter().map(|v| format!("{v:.17e}")));
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
    }

    #[derive(Serialize)]
    struct FitEcho<'a> {
        algo: Algorithm,
        input: &'a Path,
        k: usize,
        seed: u64,
        solver: &'a SolverSettings,
    }
    let echo = FitEcho { algo, input: &input, k, seed, solver: &settings };
    write_meta(Path::new(&format!("{prefix}.meta.json")), "fit", seed, &echo)?;
    println!(
        "algo={algo} iters={} error={:.6e} relative_error={:.6e}",
        f.trace.len(),
        f.reconstruction_error(&x)?,
        f.relative_error(&x)?
    );
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let known = keys(&["datasets", "seeds", "algos", "i", "j", "k", "master_seed", "parallel_runs", "out_dir"]);
    let c = Layered::load(&a.common, &known)?;
    let d = BenchConfig::default();
    let algos = match c.opt(a.algos, "algos")? {
        Some(s) => Algorithm::parse_list(&s)?,
        None => d.algos,
    };
    let cfg = BenchConfig {
        datasets: c.or(a.datasets, "datasets", d.datasets)?,
        seeds_per_dataset: c.or(a.seeds, "seeds", d.seeds_per_dataset)?,
        algos,
        dims: (c.or(a.i, "i", d.dims.0)?, c.or(a.j, "j", d.dims.1)?, c.or(a.k, "k", d.dims.2)?),
        master_seed: c.or(a.master_seed, "master_seed", d.master_seed)?,
        parallel_runs: c.or(a.parallel_runs, "parallel_runs", d.parallel_runs)?,
        solver: c.solver(a.solver)?,
    };
    let dir = out_dir(c.or(a.out_dir, "out_dir", PathBuf::from("."))?)?;
    let report = run_benchmark(&cfg)?;
    report.write_csv(&dir)?;
    write_meta(&dir.join("meta.json"), "bench", cfg.master_seed, &cfg)?;
    for s in &report.summary {
        println!("dataset={} algo={} mean={:.6e} sd={:.6e}", s.dataset, s.algo, s.mean, s.sd);
    }
    Ok(())
}

fn traj(a: TrajArgs) -> Result<()> {
    let known = keys(&["algos", "i", "j", "k", "seed", "snapshot_every", "out_dir"]);
    let c = Layered::load(&a.common, &known)?;
    let d = TrajConfig::default();
    let algos = match c.opt(a.algos, "algos")? {
        Some(s) => Algorithm::parse_list(&s)?,
        None => d.algos,
    };
    let cfg = TrajConfig {
        dims: (c.or(a.i, "i", d.dims.0)?, c.or(a.j, "j", d.dims.1)?, c.or(a.k, "k", d.dims.2)?),
        snapshot_every: c.or(a.snapshot_every, "snapshot_every", d.snapshot_every)?,
        algos,
        seed: c.or(a.seed, "seed", d.seed)?,
        solver: c.solver(a.solver)?,
    };
    let dir = out_dir(c.or(a.out_dir, "out_dir", PathBuf::from("."))?)?;
    let report = run_trajectories(&cfg)?;
    report.write_csv(&dir)?;
    write_meta(&dir.join("meta.json"), "traj", cfg.seed, &cfg)?;
    let ratios: Vec<String> = report.pca.explained_variance_ratio.iter().map(|r| format!("{r:.4}")).collect();
    println!("explained_variance_ratio={}", ratios.join(","));
    for (algo, v) in &report.step_variance {
        println!("algo={algo} step_variance={v:.6e}");
    }
    Ok(())
}

fn write_ratios(path: &Path, pca: &PcaResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["component", "explained_variance", "ratio"])?;
    for (c, (ev, r)) in pca.explained_variance.iter().zip(&pca.explained_variance_ratio).enumerate() {
        w.write_record([(c + 1).to_string(), format!("{ev:.17e}"), format!("{r:.17e}")])?;
    }
    w.flush()?;
    Ok(())
}

fn pca(a: PcaArgs) -> Result<()> {
    let known = ["in", "k", "method", "alpha", "iters", "batch_size", "workers", "seed", "out_dir"];
    let c = Layered::load(&a.common, &known)?;
    let input: PathBuf = c.required(a.input, "in")?;
    let k = c.required(a.k, "k")?;
    let method: String = c.or(a.method, "method", "exact".to_string())?;
    let seed = c.or(a.seed, "seed", 0)?;
    let d = EigenConfig::default();
    let ecfg = EigenConfig {
        alpha: c.or(a.alpha, "alpha", d.alpha)?,
        t_max: c.or(a.iters, "iters", d.t_max)?,
        batch_size: c.opt(a.batch_size, "batch_size")?,
        workers: c.or(a.workers, "workers", d.workers)?,
    };
    let dir = out_dir(c.or(a.out_dir, "out_dir", PathBuf::from("."))?)?;
    let x = Mat::load(&input)?;
    let result = match method.as_str() {
        "exact" => exact_pca(&x, k)?,
        "eigengame" => eigengame_pca(&x, k, &ecfg, &mut Rng::new(seed))?,
        other => return Err(Error::Argument(format!("unknown method {other:?}; valid: exact, eigengame"))),
    };
    result.components.save(&dir.join("components.mat"))?;
    write_ratios(&dir.join("ratios.csv"), &result)?;
    let echo = json!({
        "input": input, "k": k, "method": method, "seed": seed,
        "alpha": ecfg.alpha, "iters": ecfg.t_max, "batch_size": ecfg.batch_size, "workers": ecfg.workers,
    });
    write_meta(&dir.join("meta.json"), "pca", seed, &echo)?;
    println!("wrote components.mat ratios.csv to {}", dir.display());
    Ok(())
}

fn cost(a: CostArgs) -> Result<()> {
    let c = Layered::load(&a.common, &["i", "j", "k", "out_dir"])?;
    let (i, j, k): (u64, u64, u64) = (c.or(a.i, "i", 100)?, c.or(a.j, "j", 20)?, c.or(a.k, "k", 3)?);
    if i == 0 || j == 0 || k == 0 {
        return Err(Error::Argument("dimensions must be positive".into()));
    }
    let estimates = cost_model(i, j, k);
    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(["algorithm", "term", "symbol", "value"])?;
    for e in &estimates {
        for (t, v) in e.terms.iter().zip(e.values()) {
            out.write_record([e.algorithm, t.label, &t.symbol(), &v.to_string()])?;
        }
        out.write_record([e.algorithm, "total", "", &e.total().to_string()])?;
    }
    let text = String::from_utf8(out.into_inner().map_err(|e| Error::Io(e.into_error()))?)
        .expect("csv output is utf-8");
    print!("{text}");
    if let Some(dir) = c.opt(a.out_dir, "out_dir")? {
        let dir = out_dir(dir)?;
        std::fs::write(dir.join("cost.csv"), &text)?;
        write_meta(&dir.join("meta.json"), "cost", 0, &json!({"i": i, "j": j, "k": k}))?;
    }
    Ok(())
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: kind=usage message={}", one_line(first));
            return ExitCode::from(2);
        }
    };
    let result = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Fit(a) => fit(a),
        Cmd::Bench(a) => bench(a),
        Cmd::Traj(a) => traj(a),
        Cmd::Pca(a) => pca(a),
        Cmd::Cost(a) => cost(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: kind={} message={}", e.kind(), one_line(&e.to_string()));
            ExitCode::FAILURE
        }
    }
}
