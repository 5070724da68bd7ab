use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use rayon::ThreadPool;

use super::player::{ColPlayer, RowPlayer};
use super::self_game::{SelfGame, DEFAULT_SHRINK};
use crate::baselines::{check_fit_args, check_init, random_init, Factorization, Recorder};
use crate::error::{arg_err, Error, Result};
use crate::matrix::{dot, Mat, NonNegMat};
use crate::rng::Rng;

/// Order in which players commit their moves within one round.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Schedule {
    /// Every player steps against the round-start strategies, then all commit.
    #[default]
    Jacobi,
    /// Row-major sweep over `(i, j)` pairs, committing after every pair.
    GaussSeidel,
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::Jacobi => "jacobi",
            Schedule::GaussSeidel => "gauss-seidel",
        })
    }
}

impl FromStr for Schedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jacobi" => Ok(Schedule::Jacobi),
            "gauss-seidel" | "gaussseidel" | "gs" => Ok(Schedule::GaussSeidel),
            other => Err(arg_err!("unknown schedule {other:?}; expected jacobi or gauss-seidel")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameConfig {
    pub eta: f64,
    pub t_max: usize,
    pub schedule: Schedule,
    pub self_game: SelfGame,
    pub shrink: f64,
    pub snapshot_every: Option<usize>,
    /// Threads used for the Jacobi schedule. Results do not depend on it.
    pub workers: usize,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            eta: 0.001,
            t_max: 2000,
            schedule: Schedule::Jacobi,
            self_game: SelfGame::None,
            shrink: DEFAULT_SHRINK,
            snapshot_every: None,
            workers: 1,
        }
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(arg_err!("eta must be positive, got {}", self.eta));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(arg_err!("shrink must lie in (0, 1), got {}", self.shrink));
        }
        if self.workers == 0 {
            return Err(arg_err!("workers must be at least 1"));
        }
        if self.snapshot_every == Some(0) {
            return Err(arg_err!("snapshot_every must be at least 1"));
        }
        Ok(())
    }
}

/// Runs rounds of the row/column game.
///
/// Each player holds its own strategy vector and a private copy of its row or
/// column of `X`; nothing else of the data is reachable from a player.
pub struct GameEngine {
    rows: Vec<RowPlayer>,
    cols: Vec<ColPlayer>,
    k: usize,
    config: GameConfig,
    pool: Option<ThreadPool>,
}

impl GameEngine {
    pub fn new(x: &Mat, w0: &Mat, h0: &Mat, config: GameConfig) -> Result<Self> {
        config.validate()?;
        crate::matrix::check_factor_shapes(x, w0, h0)?;
        let rows = (0..x.rows())
            .map(|i| RowPlayer::new(i, w0.row(i).to_vec(), x.row(i).to_vec()))
            .collect();
        let cols = (0..x.cols())
            .map(|j| ColPlayer::new(j, h0.col(j), x.col(j)))
            .collect();
        let pool = match (config.schedule, config.workers) {
            (Schedule::Jacobi, n) if n > 1 => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| arg_err!("cannot start {n} workers: {e}"))?,
            ),
            _ => None,
        };
        Ok(GameEngine {
            rows,
            cols,
            k: w0.cols(),
            config,
            pool,
        })
    }

    pub fn config(&self) -> &GameConfig {
        &self.config
    }

    pub fn row_players(&self) -> &[RowPlayer] {
        &self.rows
    }

    pub fn col_players(&self) -> &[ColPlayer] {
        &self.cols
    }

    /// Current `W` assembled from the row players.
    pub fn w(&self) -> Mat {
        let data = self.rows.iter().flat_map(|p| p.w.iter().copied()).collect();
        Mat::from_vec_unchecked(self.rows.len(), self.k, data)
    }

    /// Current `H` assembled from the column players.
    pub fn h(&self) -> Mat {
        let mut h = Mat::zeros(self.k, self.cols.len());
        for p in &self.cols {
            for (r, &v) in p.h.iter().enumerate() {
                h[(r, p.index)] = v;
            }
        }
        h
    }

    /// Plays one round, then the configured self-game on every column player.
    pub fn step(&mut self) -> Result<()> {
        match self.config.schedule {
            Schedule::Jacobi => self.jacobi_round()?,
            Schedule::GaussSeidel => self.gauss_seidel_round(),
        }
        let (game, shrink) = (self.config.self_game, self.config.shrink);
        if game != SelfGame::None {
            for p in &mut self.cols {
                game.apply(&mut p.h, shrink);
            }
        }
        Ok(())
    }

    fn jacobi_round(&mut self) -> Result<()> {
        let w_snap = self.w();
        let h_snap = self.h();
        let eta = self.config.eta;
        let rows = &mut self.rows;
        let cols = &mut self.cols;
        let mut play = || -> Result<()> {
            // Each player reads only the snapshots and writes only its own vector;
            // returning from join is the commit barrier.
            let (r, c) = rayon::join(
                || {
                    rows.par_iter_mut().try_for_each(|p| {
                        p.w = p.propose(&h_snap, eta)?;
                        Ok::<_, Error>(())
                    })
                },
                || {
                    cols.par_iter_mut().try_for_each(|p| {
                        p.h = p.propose(&w_snap, eta)?;
                        Ok::<_, Error>(())
                    })
                },
            );
            r.and(c)
        };
        match &self.pool {
            Some(pool) => pool.install(play),
            None => play(),
        }
    }

    fn gauss_seidel_round(&mut self) {
        let eta = self.config.eta;
        for row in &mut self.rows {
            for (j, col) in self.cols.iter_mut().enumerate() {
                let r = row.data()[j] - dot(&row.w, &col.h);
                for (w, h) in row.w.iter_mut().zip(col.h.iter_mut()) {
                    let (w_old, h_old) = (*w, *h);
                    *w = (w_old - eta * (-r * h_old)).max(0.0);
                    *h = (h_old - eta * (-r * w_old)).max(0.0);
                }
            }
        }
    }

    pub fn into_factors(self) -> (NonNegMat, NonNegMat) {
        (
            NonNegMat::from_mat_unchecked(self.w()),
            NonNegMat::from_mat_unchecked(self.h()),
        )
    }
}

/// Random strictly positive start followed by `config.t_max` rounds of play.
pub fn game_fit(x: &Mat, k: usize, config: &GameConfig, rng: &mut Rng) -> Result<Factorization> {
    config.validate()?;
    check_fit_args(x, k, config.t_max)?;
    let (w, h) = random_init(rng, x.rows(), x.cols(), k)?;
    game_fit_from(x, w, h, config)
}

pub fn game_fit_from(x: &Mat, w0: NonNegMat, h0: NonNegMat, config: &GameConfig) -> Result<Factorization> {
    check_init(x, &w0, &h0, config.t_max)?;
    let mut engine = GameEngine::new(x, &w0, &h0, config.clone())?;
    let mut rec = Recorder::new(x, &w0, &h0, config.t_max, config.snapshot_every)?
        .with_divergence_guard(format!("eta (currently {})", config.eta));
    for t in 1..=config.t_max {
        engine.step()?;
        rec.record(t, x, &engine.w(), &engine.h())?;
    }
    let (w, h) = engine.into_factors();
    Ok(Factorization {
        w,
        h,
        trace: rec.finish(),
    })
}
