//! PCA as a `k`-player game on the unit sphere.
//!
//! Player `i` owns a unit vector `v_i` and maximizes the variance it captures
//! minus a penalty for aligning with its parents `v_j`, `j < i`:
//!
//! ```text
//! u_i = v_i' S v_i - sum_{j<i} (v_i' S v_j)^2 / (v_j' S v_j),   S = X'X
//! ```
//!
//! Every round all players take a Riemannian ascent step against the
//! round-start vectors and renormalize.

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{arg_err, shape_err, Error, Result};
use crate::matrix::{dot, matmul, Mat};
use crate::rng::Rng;

use super::pca::{center, column_means, covariance, PcaResult};

fn mat_vec(m: &Mat, v: &[f64]) -> Vec<f64> {
    (0..m.rows()).map(|i| dot(m.row(i), v)).collect()
}

/// `m^T u` accumulated over rows of `m` in order.
fn mat_t_vec(m: &Mat, u: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.cols()];
    for (i, &ui) in u.iter().enumerate() {
        for (o, &mij) in out.iter_mut().zip(m.row(i)) {
            *o += mij * ui;
        }
    }
    out
}

/// Variance term minus the alignment penalties against `parents`.
pub fn eigen_utility(v: &[f64], parents: &[Vec<f64>], sigma: &Mat) -> Result<f64> {
    let d = v.len();
    if sigma.shape() != (d, d) || parents.iter().any(|p| p.len() != d) {
        return Err(shape_err!("utility with d={d} against {}x{} sigma", sigma.rows(), sigma.cols()));
    }
    let sv = mat_vec(sigma, v);
    let mut u = dot(v, &sv);
    for (j, p) in parents.iter().enumerate() {
        let sp = mat_vec(sigma, p);
        let denom = dot(p, &sp);
        if !(denom > 0.0) {
            return Err(Error::Degenerate(format!("parent {j} captures no variance (v_j' S v_j = {denom})")));
        }
        let cross = dot(v, &sp);
        u -= cross * cross / denom;
    }
    Ok(u)
}

/// Euclidean utility gradient computed from the data batch `xt`:
/// `2 xt' [xt v - sum_j (<xt v, xt v_j> / <xt v_j, xt v_j>) xt v_j]`.
pub fn eigen_gradient(xt: &Mat, v: &[f64], parents: &[Vec<f64>]) -> Result<Vec<f64>> {
    let d = xt.cols();
    if v.len() != d || parents.iter().any(|p| p.len() != d) {
        return Err(shape_err!("gradient with vectors of length {} against {} columns", v.len(), d));
    }
    let xv = mat_vec(xt, v);
    let mut resid = xv.clone();
    for (j, p) in parents.iter().enumerate() {
        let xp = mat_vec(xt, p);
        let denom = dot(&xp, &xp);
        if !(denom > 0.0) {
            return Err(Error::Degenerate(format!("parent {j} has zero image under the data batch")));
        }
        let coeff = dot(&xv, &xp) / denom;
        for (r, &q) in resid.iter_mut().zip(&xp) {
            *r -= coeff * q;
        }
    }
    Ok(mat_t_vec(xt, &resid).into_iter().map(|g| 2.0 * g).collect())
}

/// Projects `grad` onto the tangent space of the unit sphere at `v`.
pub fn riemannian_project(grad: &[f64], v: &[f64]) -> Vec<f64> {
    let along = dot(grad, v);
    grad.iter().zip(v).map(|(&g, &vi)| g - along * vi).collect()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Player vectors, in parent-to-child order.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenState {
    pub vectors: Vec<Vec<f64>>,
}

impl EigenState {
    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    /// Vectors stacked as rows (`k x d`).
    pub fn as_mat(&self) -> Mat {
        let d = self.vectors.first().map_or(0, Vec::len);
        Mat::from_vec_unchecked(self.k(), d, self.vectors.concat())
    }

    /// Largest `| ||v_i|| - 1 |` over all players.
    pub fn max_norm_error(&self) -> f64 {
        self.vectors
            .iter()
            .map(|v| (dot(v, v).sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenConfig {
    pub alpha: f64,
    pub t_max: usize,
    /// Rows per minibatch; `None` plays on the full data every round.
    pub batch_size: Option<usize>,
    pub workers: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig {
            alpha: 0.01,
            t_max: 2000,
            batch_size: None,
            workers: 1,
        }
    }
}

/// Simultaneous-play engine; players read the round-start vectors, then all commit.
pub struct EigenGame<'a> {
    x: &'a Mat,
    state: EigenState,
    config: EigenConfig,
    round: usize,
    pool: Option<ThreadPool>,
}

impl<'a> EigenGame<'a> {
    pub fn new(x: &'a Mat, init: EigenState, config: EigenConfig) -> Result<Self> {
        if !(config.alpha > 0.0) || !config.alpha.is_finite() {
            return Err(arg_err!("alpha must be positive, got {}", config.alpha));
        }
        if config.workers == 0 {
            return Err(arg_err!("workers must be at least 1"));
        }
        if matches!(config.batch_size, Some(0)) {
            return Err(arg_err!("batch_size must be at least 1"));
        }
        if init.k() == 0 || init.k() > x.cols() {
            return Err(arg_err!("k must lie in 1..={}, got {}", x.cols(), init.k()));
        }
        if init.vectors.iter().any(|v| v.len() != x.cols()) {
            return Err(shape_err!("initial vectors must have length {}", x.cols()));
        }
        let mut state = init;
        for v in &mut state.vectors {
            if !(normalize(v) > 0.0) {
                return Err(arg_err!("initial vectors must be non-zero"));
            }
        }
        let pool = if config.workers > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(config.workers)
                    .build()
                    .map_err(|e| arg_err!("cannot start {} workers: {e}", config.workers))?,
            )
        } else {
            None
        };
        Ok(EigenGame { x, state, config, round: 0, pool })
    }

    pub fn state(&self) -> &EigenState {
        &self.state
    }

    pub fn into_state(self) -> EigenState {
        self.state
    }

    fn batch(&self) -> Mat {
        match self.config.batch_size {
            None => self.x.clone(),
            Some(b) => {
                let n = self.x.rows();
                let start = (self.round * b) % n;
                let data = (0..b)
                    .flat_map(|r| self.x.row((start + r) % n).iter().copied())
                    .collect();
                Mat::from_vec_unchecked(b, self.x.cols(), data)
            }
        }
    }

    /// One round of simultaneous Riemannian ascent.
    pub fn step(&mut self) -> Result<()> {
        let xt = self.batch();
        let snapshot = &self.state.vectors;
        let alpha = self.config.alpha;
        let update = |i: usize| -> Result<Vec<f64>> {
            let v = &snapshot[i];
            let grad = eigen_gradient(&xt, v, &snapshot[..i])?;
            let rgrad = riemannian_project(&grad, v);
            let mut next: Vec<f64> = v.iter().zip(&rgrad).map(|(&a, &g)| a + alpha * g).collect();
            let n = normalize(&mut next);
            if !n.is_finite() || n == 0.0 {
                return Err(Error::Diverged(format!(
                    "player {i} left the sphere at round {}; reduce alpha (currently {alpha})",
                    self.round + 1
                )));
            }
            Ok(next)
        };
        let k = snapshot.len();
        let next: Result<Vec<Vec<f64>>> = match &self.pool {
            Some(pool) => pool.install(|| (0..k).into_par_iter().map(update).collect()),
            None => (0..k).map(update).collect(),
        };
        self.state.vectors = next?;
        self.round += 1;
        Ok(())
    }
}

/// Random unit vectors, each drawn from `Uniform(-1, 1)^d` and normalized.
pub fn random_sphere_init(rng: &mut Rng, k: usize, d: usize) -> EigenState {
    let vectors = (0..k)
        .map(|_| loop {
            let mut v: Vec<f64> = (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect();
            if normalize(&mut v) > 0.0 {
                break v;
            }
        })
        .collect();
    EigenState { vectors }
}

/// Plays the eigen-game on `x` as given (no centering) for `config.t_max` rounds.
pub fn eigengame_fit(x: &Mat, k: usize, config: &EigenConfig, rng: &mut Rng) -> Result<EigenState> {
    if k == 0 || k > x.cols() {
        return Err(arg_err!("k must lie in 1..={}, got {k}", x.cols()));
    }
    let init = random_sphere_init(rng, k, x.cols());
    let mut game = EigenGame::new(x, init, config.clone())?;
    for _ in 0..config.t_max {
        game.step()?;
    }
    Ok(game.into_state())
}

/// PCA through the eigen-game: centers `x`, scales by `1/sqrt(n)` so that
/// `X'X` is the covariance, plays, and reports variances along each vector.
pub fn eigengame_pca(x: &Mat, k: usize, config: &EigenConfig, rng: &mut Rng) -> Result<PcaResult> {
    let (cov, mean) = covariance(x)?;
    let scaled = center(x, &column_means(x)).scale(1.0 / (x.rows() as f64).sqrt());
    let state = eigengame_fit(&scaled, k, config, rng)?;
    let components = state.as_mat();
    let overlap = (0..k)
        .flat_map(|a| (0..a).map(move |b| (a, b)))
        .map(|(a, b)| dot(components.row(a), components.row(b)).abs())
        .fold(0.0, f64::max);
    if overlap > 1e-3 {
        log::warn!("eigen-game vectors not orthogonal after {} rounds (max |cos| {overlap:.3e}); raise iters or alpha, or lower k if it exceeds the rank of the data", config.t_max);
    }
    let sc = matmul(&components, &cov)?;
    let explained_variance: Vec<f64> = (0..k).map(|r| dot(sc.row(r), components.row(r)).max(0.0)).collect();
    let total: f64 = (0..cov.rows()).map(|i| cov[(i, i)]).sum();
    let explained_variance_ratio = explained_variance
        .iter()
        .map(|&l| if total > 0.0 { l / total } else { 0.0 })
        .collect();
    Ok(PcaResult {
        components,
        explained_variance,
        explained_variance_ratio,
        mean,
    })
}
