use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::baselines::{
    mu_fit_from, nals_fit_from, pg_fit_from, Factorization, MuConfig, NalsConfig, PgConfig,
};
use crate::baselines::{mu::DEFAULT_EPS, nals::DEFAULT_RIDGE};
use crate::error::{arg_err, Error, Result};
use crate::game::{game_fit_from, GameConfig, Schedule, SelfGame, DEFAULT_SHRINK};
use crate::matrix::{Mat, NonNegMat};

/// A named NNMF solver as used by the experiment commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Mu,
    Pg,
    Nals,
    Game,
    GameJmin,
    GameJmax,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Mu,
        Algorithm::Pg,
        Algorithm::Nals,
        Algorithm::Game,
        Algorithm::GameJmin,
        Algorithm::GameJmax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mu => "mu",
            Algorithm::Pg => "pg",
            Algorithm::Nals => "nals",
            Algorithm::Game => "game",
            Algorithm::GameJmin => "game-jmin",
            Algorithm::GameJmax => "game-jmax",
        }
    }

    pub fn self_game(self) -> Option<SelfGame> {
        match self {
            Algorithm::Game => Some(SelfGame::None),
            Algorithm::GameJmin => Some(SelfGame::Jmin),
            Algorithm::GameJmax => Some(SelfGame::Jmax),
            _ => None,
        }
    }

    pub fn is_game(self) -> bool {
        self.self_game().is_some()
    }

    /// Parses a comma-separated list such as `mu,game,game-jmin`.
    pub fn parse_list(s: &str) -> Result<Vec<Algorithm>> {
        let algos: Vec<Algorithm> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        if algos.is_empty() {
            return Err(arg_err!("empty algorithm list"));
        }
        Ok(algos)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Algorithm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == lower)
            .ok_or_else(|| {
                let valid: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                arg_err!("unknown algorithm {s:?}; valid names: {}", valid.join(", "))
            })
    }
}

/// Solver knobs shared by the experiment commands. Each solver reads the
/// fields that apply to it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverSettings {
    pub iters: usize,
    pub eta: f64,
    pub eps: f64,
    pub ridge: f64,
    pub schedule: String,
    pub shrink: f64,
    pub workers: usize,
    pub snapshot_every: Option<usize>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            iters: 2000,
            eta: 0.001,
            eps: DEFAULT_EPS,
            ridge: DEFAULT_RIDGE,
            schedule: Schedule::Jacobi.to_string(),
            shrink: DEFAULT_SHRINK,
            workers: 1,
            snapshot_every: None,
        }
    }
}

impl SolverSettings {
    pub fn game_config(&self, self_game: SelfGame) -> Result<GameConfig> {
        let cfg = GameConfig {
            eta: self.eta,
            t_max: self.iters,
            schedule: self.schedule.parse()?,
            self_game,
            shrink: self.shrink,
            snapshot_every: self.snapshot_every,
            workers: self.workers,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs `algo` from the given starting factors.
pub fn fit_from(
    algo: Algorithm,
    x: &Mat,
    w0: NonNegMat,
    h0: NonNegMat,
    s: &SolverSettings,
) -> Result<Factorization> {
    match algo {
        Algorithm::Mu => mu_fit_from(
            x,
            w0,
            h0,
            &MuConfig {
                t_max: s.iters,
                eps: s.eps,
                snapshot_every: s.snapshot_every,
            },
        ),
        Algorithm::Pg => pg_fit_from(
            x,
            w0,
            h0,
            &PgConfig {
                eta: s.eta,
                t_max: s.iters,
                snapshot_every: s.snapshot_every,
            },
        ),
        Algorithm::Nals => nals_fit_from(
            x,
            w0,
            h0,
            &NalsConfig {
                t_max: s.iters,
                ridge: s.ridge,
                snapshot_every: s.snapshot_every,
            },
        ),
        Algorithm::Game | Algorithm::GameJmin | Algorithm::GameJmax => {
            let cfg = s.game_config(algo.self_game().unwrap_or_default())?;
            game_fit_from(x, w0, h0, &cfg)
        }
    }
}
