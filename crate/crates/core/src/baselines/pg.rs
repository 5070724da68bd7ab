//! Alternating projected gradient descent on `0.5 * ||X - WH||_F^2`.

use super::trace::{check_fit_args, check_init, random_init, Factorization, Recorder};
use crate::error::{arg_err, Result};
use crate::matrix::{check_factor_shapes, clamp_nonneg, matmul, Mat, NonNegMat};
use crate::rng::Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct PgConfig {
    pub eta: f64,
    pub t_max: usize,
    pub snapshot_every: Option<usize>,
}

impl Default for PgConfig {
    fn default() -> Self {
        PgConfig {
            eta: 0.001,
            t_max: 2000,
            snapshot_every: None,
        }
    }
}

/// `0.5 * ||X - WH||_F^2`.
pub fn half_squared_loss(x: &Mat, w: &Mat, h: &Mat) -> Result<f64> {
    let e = crate::matrix::reconstruction_error(x, w, h)?;
    Ok(0.5 * e * e)
}

/// Gradient of the half squared loss with respect to `W`: `-(X - WH) H^T`.
pub fn grad_w(x: &Mat, w: &Mat, h: &Mat) -> Result<Mat> {
    check_factor_shapes(x, w, h)?;
    let resid = x.sub(&matmul(w, h)?)?;
    Ok(matmul(&resid, &h.transpose())?.scale(-1.0))
}

/// Gradient of the half squared loss with respect to `H`: `-W^T (X - WH)`.
pub fn grad_h(x: &Mat, w: &Mat, h: &Mat) -> Result<Mat> {
    check_factor_shapes(x, w, h)?;
    let resid = x.sub(&matmul(w, h)?)?;
    Ok(matmul(&w.transpose(), &resid)?.scale(-1.0))
}

/// One alternating step: project a `W` step, then a `H` step taken at the new `W`.
pub fn pg_step(x: &Mat, w: &Mat, h: &Mat, eta: f64) -> Result<(NonNegMat, NonNegMat)> {
    let w_new = clamp_nonneg(&w.sub(&grad_w(x, w, h)?.scale(eta))?);
    let h_new = clamp_nonneg(&h.sub(&grad_h(x, &w_new, h)?.scale(eta))?);
    Ok((w_new, h_new))
}

pub fn pg_fit(x: &Mat, k: usize, config: &PgConfig, rng: &mut Rng) -> Result<Factorization> {
    check_fit_args(x, k, config.t_max)?;
    let (w, h) = random_init(rng, x.rows(), x.cols(), k)?;
    pg_fit_from(x, w, h, config)
}

pub fn pg_fit_from(x: &Mat, w0: NonNegMat, h0: NonNegMat, config: &PgConfig) -> Result<Factorization> {
    if !(config.eta > 0.0) || !config.eta.is_finite() {
        return Err(arg_err!("eta must be positive, got {}", config.eta));
    }
    check_init(x, &w0, &h0, config.t_max)?;
    let mut rec = Recorder::new(x, &w0, &h0, config.t_max, config.snapshot_every)?
        .with_divergence_guard(format!("eta (currently {})", config.eta));
    let (mut w, mut h) = (w0, h0);
    for t in 1..=config.t_max {
        (w, h) = pg_step(x, &w, &h, config.eta)?;
        rec.record(t, x, &w, &h)?;
    }
    Ok(Factorization {
        w,
        h,
        trace: rec.finish(),
    })
}
