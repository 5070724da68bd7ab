//! Row and column players and their pairwise reconstruction game.
//!
//! Row player `i` owns `W[i, :]`, column player `j` owns `H[:, j]`. When they
//! meet they share the loss `0.5 * (X[i, j] - w_i . h_j)^2`. A player's step
//! sums the pair gradients over all of its partners, which equals its slice of
//! the full-matrix gradient of `0.5 * ||X - WH||_F^2`.

use crate::error::{shape_err, Result};
use crate::matrix::{dot, Mat};

fn check_len(w: &[f64], h: &[f64]) -> Result<()> {
    if w.len() != h.len() {
        return Err(shape_err!("player vectors have lengths {} and {}", w.len(), h.len()));
    }
    Ok(())
}

/// Cooperative utility of a row/column pair: `-0.5 * (x_ij - w_i . h_j)^2`.
pub fn pair_utility(x_ij: f64, w_i: &[f64], h_j: &[f64]) -> Result<f64> {
    check_len(w_i, h_j)?;
    let r = x_ij - dot(w_i, h_j);
    Ok(-0.5 * r * r)
}

/// Descent gradients of the pair loss: `(-r h_j, -r w_i)` with `r = x_ij - w_i . h_j`.
pub fn pair_gradients(x_ij: f64, w_i: &[f64], h_j: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(w_i, h_j)?;
    let r = x_ij - dot(w_i, h_j);
    Ok((
        h_j.iter().map(|&h| -r * h).collect(),
        w_i.iter().map(|&w| -r * w).collect(),
    ))
}

/// Sum of row player `i`'s pair gradients against every column of `h` (K x J).
pub fn row_gradient(x_row: &[f64], w_i: &[f64], h: &Mat) -> Result<Vec<f64>> {
    if x_row.len() != h.cols() || w_i.len() != h.rows() {
        return Err(shape_err!(
            "row player with {} data entries and K={} against H {}x{}",
            x_row.len(),
            w_i.len(),
            h.rows(),
            h.cols()
        ));
    }
    let k = w_i.len();
    let mut grad = vec![0.0; k];
    let mut h_j = vec![0.0; k];
    for (j, &x_ij) in x_row.iter().enumerate() {
        for (p, hp) in h_j.iter_mut().enumerate() {
            *hp = h[(p, j)];
        }
        let r = x_ij - dot(w_i, &h_j);
        for (g, &hp) in grad.iter_mut().zip(&h_j) {
            *g += -r * hp;
        }
    }
    Ok(grad)
}

/// Sum of column player `j`'s pair gradients against every row of `w` (I x K).
pub fn col_gradient(x_col: &[f64], h_j: &[f64], w: &Mat) -> Result<Vec<f64>> {
    if x_col.len() != w.rows() || h_j.len() != w.cols() {
        return Err(shape_err!(
            "column player with {} data entries and K={} against W {}x{}",
            x_col.len(),
            h_j.len(),
            w.rows(),
            w.cols()
        ));
    }
    let mut grad = vec![0.0; h_j.len()];
    for (i, &x_ij) in x_col.iter().enumerate() {
        let w_i = w.row(i);
        let r = x_ij - dot(w_i, h_j);
        for (g, &wp) in grad.iter_mut().zip(w_i) {
            *g += -r * wp;
        }
    }
    Ok(grad)
}

fn projected_step(v: &[f64], grad: &[f64], eta: f64) -> Vec<f64> {
    v.iter()
        .zip(grad)
        .map(|(&a, &g)| (a - eta * g).max(0.0))
        .collect()
}

/// One projected step for row player `i`, reading only its own data row and
/// the column players' current vectors.
pub fn row_player_update(x_row: &[f64], w_i: &[f64], h: &Mat, eta: f64) -> Result<Vec<f64>> {
    let grad = row_gradient(x_row, w_i, h)?;
    Ok(projected_step(w_i, &grad, eta))
}

/// Column-player mirror of [`row_player_update`].
pub fn col_player_update(x_col: &[f64], h_j: &[f64], w: &Mat, eta: f64) -> Result<Vec<f64>> {
    let grad = col_gradient(x_col, h_j, w)?;
    Ok(projected_step(h_j, &grad, eta))
}

/// Row player: its strategy `W[i, :]` and a private copy of `X[i, :]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RowPlayer {
    pub index: usize,
    pub w: Vec<f64>,
    x_row: Vec<f64>,
}

impl RowPlayer {
    pub fn new(index: usize, w: Vec<f64>, x_row: Vec<f64>) -> Self {
        RowPlayer { index, w, x_row }
    }

    pub fn data(&self) -> &[f64] {
        &self.x_row
    }

    pub fn propose(&self, h: &Mat, eta: f64) -> Result<Vec<f64>> {
        row_player_update(&self.x_row, &self.w, h, eta)
    }
}

/// Column player: its strategy `H[:, j]` and a private copy of `X[:, j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColPlayer {
    pub index: usize,
    pub h: Vec<f64>,
    x_col: Vec<f64>,
}

impl ColPlayer {
    pub fn new(index: usize, h: Vec<f64>, x_col: Vec<f64>) -> Self {
        ColPlayer { index, h, x_col }
    }

    pub fn data(&self) -> &[f64] {
        &self.x_col
    }

    pub fn propose(&self, w: &Mat, eta: f64) -> Result<Vec<f64>> {
        col_player_update(&self.x_col, &self.h, w, eta)
    }
}
