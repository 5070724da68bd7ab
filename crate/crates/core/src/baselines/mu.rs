//! Lee-Seung multiplicative updates for the Frobenius objective.

use super::trace::{check_fit_args, check_init, random_init, Factorization, Recorder};
use crate::error::Result;
use crate::matrix::{check_factor_shapes, matmul, Mat, NonNegMat};
use crate::rng::Rng;

/// Floor applied to every multiplicative-update denominator.
pub const DEFAULT_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct MuConfig {
    pub t_max: usize,
    pub eps: f64,
    pub snapshot_every: Option<usize>,
}

impl Default for MuConfig {
    fn default() -> Self {
        MuConfig {
            t_max: 2000,
            eps: DEFAULT_EPS,
            snapshot_every: None,
        }
    }
}

/// One multiplicative update: `H` first using `W`, then `W` using the new `H`.
///
/// ```text
/// H' = H .* (W^T X) ./ max(W^T W H, eps)
/// W' = W .* (X H'^T) ./ max(W (H' H'^T), eps)
/// ```
pub fn mu_step(x: &Mat, w: &Mat, h: &Mat, eps: f64) -> Result<(NonNegMat, NonNegMat)> {
    check_factor_shapes(x, w, h)?;
    let wt = w.transpose();
    let h_num = matmul(&wt, x)?;
    let h_den = matmul(&matmul(&wt, w)?, h)?;
    let h_new = ratio_update(h, &h_num, &h_den, eps);

    let ht = h_new.transpose();
    let w_num = matmul(x, &ht)?;
    let w_den = matmul(w, &matmul(&h_new, &ht)?)?;
    let w_new = ratio_update(w, &w_num, &w_den, eps);

    Ok((
        NonNegMat::from_mat_unchecked(w_new),
        NonNegMat::from_mat_unchecked(h_new),
    ))
}

fn ratio_update(cur: &Mat, num: &Mat, den: &Mat, eps: f64) -> Mat {
    let data = cur
        .as_slice()
        .iter()
        .zip(num.as_slice())
        .zip(den.as_slice())
        .map(|((&c, &n), &d)| c * n / d.max(eps))
        .collect();
    Mat::from_vec_unchecked(cur.rows(), cur.cols(), data)
}

/// Random strictly positive start followed by `t_max` multiplicative updates.
pub fn mu_fit(x: &Mat, k: usize, config: &MuConfig, rng: &mut Rng) -> Result<Factorization> {
    check_fit_args(x, k, config.t_max)?;
    let (w, h) = random_init(rng, x.rows(), x.cols(), k)?;
    mu_fit_from(x, w, h, config)
}

pub fn mu_fit_from(x: &Mat, w0: NonNegMat, h0: NonNegMat, config: &MuConfig) -> Result<Factorization> {
    check_init(x, &w0, &h0, config.t_max)?;
    let mut rec = Recorder::new(x, &w0, &h0, config.t_max, config.snapshot_every)?;
    let (mut w, mut h) = (w0, h0);
    for t in 1..=config.t_max {
        (w, h) = mu_step(x, &w, &h, config.eps)?;
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
    use crate::matrix::reconstruction_error;
    use crate::rng::rand_uniform;

    fn m(rows: &[&[f64]]) -> Mat {
        Mat::from_rows(rows).unwrap()
    }

    #[test]
    fn scalar_hand_example() {
        let (w, h) = mu_step(&m(&[&[1.0]]), &m(&[&[1.0]]), &m(&[&[2.0]]), DEFAULT_EPS).unwrap();
        assert_eq!(h.as_slice(), &[1.0]);
        assert_eq!(w.as_slice(), &[1.0]);
    }

    #[test]
    fn exact_factorization_is_a_fixed_point() {
        // Dyadic entries keep every product exact.
        let w = m(&[&[1.0, 0.5], &[2.0, 1.0], &[0.25, 4.0]]);
        let h = m(&[&[1.0, 2.0, 0.5, 1.0], &[0.5, 1.0, 2.0, 0.25]]);
        let x = matmul(&w, &h).unwrap();
        let (w2, h2) = mu_step(&x, &w, &h, DEFAULT_EPS).unwrap();
        for (a, b) in w2.as_slice().iter().zip(w.as_slice()) {
            assert!((a - b).abs() <= 1e-15 * b.abs());
        }
        for (a, b) in h2.as_slice().iter().zip(h.as_slice()) {
            assert!((a - b).abs() <= 1e-15 * b.abs());
        }
    }

    #[test]
    fn step_does_not_increase_error() {
        let mut rng = Rng::new(21);
        for _ in 0..10 {
            let x = rand_uniform(&mut rng, 8, 5, 0.0, 1.0).unwrap();
            let w = rand_uniform(&mut rng, 8, 2, 0.1, 1.0).unwrap();
            let h = rand_uniform(&mut rng, 2, 5, 0.1, 1.0).unwrap();
            let before = reconstruction_error(&x, &w, &h).unwrap();
            let (w2, h2) = mu_step(&x, &w, &h, DEFAULT_EPS).unwrap();
            let after = reconstruction_error(&x, &w2, &h2).unwrap();
            assert!(after <= before + 1e-10, "{after} > {before}");
        }
    }

    #[test]
    fn single_iteration_trace() {
        let x = Mat::filled(3, 3, 1.0);
        let cfg = MuConfig { t_max: 1, ..Default::default() };
        let fit = mu_fit(&x, 2, &cfg, &mut Rng::new(0)).unwrap();
        assert_eq!(fit.trace.len(), 1);
        let cfg = MuConfig { t_max: 0, ..Default::default() };
        assert!(mu_fit(&x, 2, &cfg, &mut Rng::new(0)).is_err());
    }

    #[test]
    fn zero_denominator_is_floored() {
        // A zero column in W drives W^T W H to zero in that row.
        let x = Mat::filled(2, 2, 1.0);
        let w = m(&[&[1.0, 0.0], &[1.0, 0.0]]);
        let h = m(&[&[0.5, 0.5], &[1.0, 1.0]]);
        let (w2, h2) = mu_step(&x, &w, &h, DEFAULT_EPS).unwrap();
        assert!(w2.is_finite() && h2.is_finite());
    }
}
