//! Non-negative matrix factorization as a multiplayer game.
//!
//! The crate provides:
//!
//! * [`game`]: row and column players that cooperatively reconstruct `X ~ WH`,
//!   with optional self-games on the columns of `H` and a parallel engine
//!   whose output does not depend on the number of worker threads;
//! * [`baselines`]: multiplicative updates, projected gradient and
//!   non-negative alternating least squares;
//! * [`eigengame`]: PCA as a game on the unit sphere, plus an exact Jacobi PCA;
//! * [`datagen`]: synthetic datasets with smooth non-negative bases;
//! * [`harness`]: benchmark, trajectory and cost-model experiments behind the
//!   `nnmf-game` command line tool.

pub mod baselines;
pub mod datagen;
pub mod eigengame;
pub mod error;
pub mod game;
pub mod harness;
pub mod matrix;
pub mod rng;

pub use error::{Error, Result};
pub use matrix::{clamp_nonneg, matmul, reconstruction_error, relative_error, Mat, NonNegMat};
pub use rng::{rand_uniform, Rng};
