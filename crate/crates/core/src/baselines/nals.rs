//! Non-negative alternating least squares: exact ridge-regularized solves
//! for each factor in turn, each followed by projection onto `>= 0`.

use super::trace::{check_fit_args, check_init, random_init, Factorization, Recorder};
use crate::error::{arg_err, shape_err, Error, Result};
use crate::matrix::{clamp_nonneg, matmul, Mat, NonNegMat};
use crate::rng::Rng;

pub const DEFAULT_RIDGE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct NalsConfig {
    pub t_max: usize,
    pub ridge: f64,
    pub snapshot_every: Option<usize>,
}

impl Default for NalsConfig {
    fn default() -> Self {
        NalsConfig {
            t_max: 2000,
            ridge: DEFAULT_RIDGE,
            snapshot_every: None,
        }
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
///
/// A pivot that is not above `n * eps * max_diag` is treated as singular.
pub fn cholesky(a: &Mat) -> Result<Mat> {
    let n = a.rows();
    if a.cols() != n {
        return Err(shape_err!("cholesky of non-square {}x{}", n, a.cols()));
    }
    let max_diag = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
    let tol = n as f64 * f64::EPSILON * max_diag;
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for p in 0..j {
            d -= l[(j, p)] * l[(j, p)];
        }
        if !(d > tol) {
            return Err(Error::Singular(format!(
                "normal matrix is not positive definite (pivot {d:e} at column {j}); use ridge > 0"
            )));
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for p in 0..j {
                s -= l[(i, p)] * l[(j, p)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `A X = B` for symmetric positive definite `A`.
pub fn spd_solve(a: &Mat, b: &Mat) -> Result<Mat> {
    if b.rows() != a.rows() {
        return Err(shape_err!("solve with {}x{} system and {} right-hand rows", a.rows(), a.cols(), b.rows()));
    }
    let l = cholesky(a)?;
    let n = a.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        // forward: L y = b
        for i in 0..n {
            let mut s = x[(i, c)];
            for p in 0..i {
                s -= l[(i, p)] * x[(p, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
        // backward: L^T x = y
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for p in i + 1..n {
                s -= l[(p, i)] * x[(p, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    Ok(x)
}

fn add_ridge(m: &mut Mat, ridge: f64) {
    for i in 0..m.rows() {
        m[(i, i)] += ridge;
    }
}

/// Unprojected least-squares `H = (W^T W + ridge I)^{-1} W^T X`.
pub fn solve_h(x: &Mat, w: &Mat, ridge: f64) -> Result<Mat> {
    if w.rows() != x.rows() {
        return Err(shape_err!("W has {} rows but X has {}", w.rows(), x.rows()));
    }
    let wt = w.transpose();
    let mut gram = matmul(&wt, w)?;
    add_ridge(&mut gram, ridge);
    spd_solve(&gram, &matmul(&wt, x)?)
}

/// Unprojected least-squares `W = X H^T (H H^T + ridge I)^{-1}`.
pub fn solve_w(x: &Mat, h: &Mat, ridge: f64) -> Result<Mat> {
    if h.cols() != x.cols() {
        return Err(shape_err!("H has {} columns but X has {}", h.cols(), x.cols()));
    }
    let mut gram = matmul(h, &h.transpose())?;
    add_ridge(&mut gram, ridge);
    Ok(spd_solve(&gram, &matmul(h, &x.transpose())?)?.transpose())
}

pub fn nals_step(x: &Mat, w: &Mat, ridge: f64) -> Result<(NonNegMat, NonNegMat)> {
    let h = clamp_nonneg(&solve_h(x, w, ridge)?);
    let w = clamp_nonneg(&solve_w(x, &h, ridge)?);
    Ok((w, h))
}

pub fn nals_fit(x: &Mat, k: usize, config: &NalsConfig, rng: &mut Rng) -> Result<Factorization> {
    check_fit_args(x, k, config.t_max)?;
    let (w, h) = random_init(rng, x.rows(), x.cols(), k)?;
    nals_fit_from(x, w, h, config)
}

/// Loss is recorded but not guaranteed to decrease: projection after an exact
/// solve can undo part of the improvement.
pub fn nals_fit_from(x: &Mat, w0: NonNegMat, h0: NonNegMat, config: &NalsConfig) -> Result<Factorization> {
    if !(config.ridge >= 0.0) {
        return Err(arg_err!("ridge must be non-negative, got {}", config.ridge));
    }
    check_init(x, &w0, &h0, config.t_max)?;
    let mut rec = Recorder::new(x, &w0, &h0, config.t_max, config.snapshot_every)?;
    let (mut w, mut h) = (w0, h0);
    for t in 1..=config.t_max {
        (w, h) = nals_step(x, &w, config.ridge)?;
        rec.record(t, x, &w, &h)?;
    }
    Ok(Factorization {
        w,
        h,
        trace: rec.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::make_synthetic;

    #[test]
    fn rank_one_closed_form() {
        let x = Mat::from_rows(&[[2.0], [4.0]]).unwrap();
        let w = Mat::from_rows(&[[1.0], [2.0]]).unwrap();
        let h = solve_h(&x, &w, 0.0).unwrap();
        assert!((h[(0, 0)] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_half_step_recovers_h() {
        let d = make_synthetic(&mut Rng::new(8), 30, 12, 3).unwrap();
        let h = solve_h(&d.x_syn, &d.w_syn, 0.0).unwrap();
        for (a, b) in h.as_slice().iter().zip(d.h_syn.as_slice()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        let w = solve_w(&d.x_syn, &d.h_syn, 0.0).unwrap();
        for (a, b) in w.as_slice().iter().zip(d.w_syn.as_slice()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn singular_without_ridge() {
        let x = Mat::filled(3, 2, 1.0);
        let w = Mat::from_rows(&[[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]).unwrap();
        let err = solve_h(&x, &w, 0.0).unwrap_err();
        assert!(matches!(err, Error::Singular(ref m) if m.contains("ridge")), "{err}");
        assert!(solve_h(&x, &w, 1e-10).is_ok());
    }

    #[test]
    fn spd_solve_matches_known_system() {
        let a = Mat::from_rows(&[[4.0, 2.0], [2.0, 3.0]]).unwrap();
        let b = Mat::from_rows(&[[2.0], [1.0]]).unwrap();
        let x = spd_solve(&a, &b).unwrap();
        // 4x + 2y = 2, 2x + 3y = 1  ->  x = 0.5, y = 0
        assert!((x[(0, 0)] - 0.5).abs() < 1e-15);
        assert!(x[(1, 0)].abs() < 1e-15);
    }

    #[test]
    fn fit_stays_non_negative_and_improves() {
        let d = make_synthetic(&mut Rng::new(2), 40, 15, 3).unwrap();
        let cfg = NalsConfig { t_max: 50, ..Default::default() };
        let fit = nals_fit(&d.x_syn, 3, &cfg, &mut Rng::new(9)).unwrap();
        assert!(fit.w.min() >= 0.0 && fit.h.min() >= 0.0);
        assert_eq!(fit.trace.len(), 50);
        assert!(fit.relative_error(&d.x_syn).unwrap() < 0.05);
    }
}
