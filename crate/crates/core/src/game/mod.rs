//! Non-negative matrix factorization played as a graphical game.
//!
//! `I` row players each own one row of `W`; `J` column players each own one
//! column of `H`. Every (row, column) pair cooperates on reconstructing the
//! single entry `X[i, j]`, so a player only ever needs its own row or column
//! of the data. Column players can additionally play a self-game (see
//! [`SelfGame`]) that nudges their vector towards a sparser pattern.

mod engine;
mod player;
mod self_game;

pub use engine::{game_fit, game_fit_from, GameConfig, GameEngine, Schedule};
pub use player::{
    col_gradient, col_player_update, pair_gradients, pair_utility, row_gradient,
    row_player_update, ColPlayer, RowPlayer,
};
pub use self_game::{argmax, self_game_jmax, self_game_jmin, SelfGame, DEFAULT_SHRINK};

use crate::matrix::{dot, Mat};

/// Mean absolute cosine similarity over all pairs of rows of `h`.
///
/// Zero rows contribute zero. Returns 0 for fewer than two rows.
pub fn basis_overlap(h: &Mat) -> f64 {
    let k = h.rows();
    if k < 2 {
        return 0.0;
    }
    let norms: Vec<f64> = (0..k).map(|r| dot(h.row(r), h.row(r)).sqrt()).collect();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 0..k {
        for b in a + 1..k {
            let denom = norms[a] * norms[b];
            if denom > 0.0 {
                total += (dot(h.row(a), h.row(b)) / denom).abs();
            }
            pairs += 1;
        }
    }
    total / pairs as f64
}
