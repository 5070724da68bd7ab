//! Synthetic non-negative datasets with smooth basis rows.

use serde::Serialize;

use crate::error::{arg_err, shape_err, Result};
use crate::matrix::{matmul, Mat, NonNegMat};
use crate::rng::{rand_uniform, Rng};

/// Three-tap Gaussian kernel with unit spacing and sigma = 1, normalized to sum 1.
pub fn gaussian_kernel3() -> [f64; 3] {
    let side = (-0.5f64).exp();
    let total = 1.0 + 2.0 * side;
    [side / total, 1.0 / total, side / total]
}

/// Convolves every row with a three-tap kernel, replicating edge values.
///
/// `kernel[0]` weights the left neighbour, `kernel[2]` the right one.
pub fn smooth_rows(m: &Mat, kernel: [f64; 3]) -> Result<Mat> {
    if m.cols() < 1 {
        return Err(shape_err!("cannot smooth rows of a {}x0 matrix", m.rows()));
    }
    if kernel.iter().any(|&k| !(k >= 0.0) || !k.is_finite()) {
        return Err(arg_err!("kernel weights must be finite and non-negative: {kernel:?}"));
    }
    let sum: f64 = kernel.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(arg_err!("kernel must sum to 1, sums to {sum}"));
    }
    let cols = m.cols();
    let mut out = Mat::zeros(m.rows(), cols);
    for i in 0..m.rows() {
        let src = m.row(i);
        let dst = out.row_mut(i);
        for c in 0..cols {
            let left = src[c.saturating_sub(1)];
            let right = src[(c + 1).min(cols - 1)];
            dst[c] = kernel[0] * left + kernel[1] * src[c] + kernel[2] * right;
        }
    }
    Ok(out)
}

/// Ground-truth factors and their product.
#[derive(Clone, Debug)]
pub struct SyntheticDataset {
    pub w_syn: NonNegMat,
    pub h_syn: NonNegMat,
    pub x_syn: NonNegMat,
    pub seed: u64,
    pub kernel: [f64; 3],
}

/// Metadata record written next to generated matrices.
#[derive(Clone, Debug, Serialize)]
pub struct DatasetMeta {
    pub seed: u64,
    #[serde(rename = "I")]
    pub i: usize,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub kernel: [f64; 3],
}

impl SyntheticDataset {
    pub fn meta(&self) -> DatasetMeta {
        DatasetMeta {
            seed: self.seed,
            i: self.x_syn.rows(),
            j: self.x_syn.cols(),
            k: self.w_syn.cols(),
            kernel: self.kernel,
        }
    }
}

/// Draws `W ~ U(0,1)^{I x K}`, then a raw `U(0,1)^{K x J}` basis whose rows
/// are smoothed with the default Gaussian kernel, and multiplies them.
pub fn make_synthetic(rng: &mut Rng, i: usize, j: usize, k: usize) -> Result<SyntheticDataset> {
    make_synthetic_with_kernel(rng, i, j, k, gaussian_kernel3())
}

pub fn make_synthetic_with_kernel(
    rng: &mut Rng,
    i: usize,
    j: usize,
    k: usize,
    kernel: [f64; 3],
) -> Result<SyntheticDataset> {
    if i == 0 || j == 0 || k == 0 {
        return Err(arg_err!("dataset dimensions must be positive, got I={i} J={j} K={k}"));
    }
    let seed = rng.seed();
    let w = rand_uniform(rng, i, k, 0.0, 1.0)?;
    let raw_h = rand_uniform(rng, k, j, 0.0, 1.0)?;
    let h = smooth_rows(&raw_h, kernel)?;
    let x = matmul(&w, &h)?;
    Ok(SyntheticDataset {
        w_syn: NonNegMat::from_mat_unchecked(w),
        h_syn: NonNegMat::from_mat_unchecked(h),
        x_syn: NonNegMat::from_mat_unchecked(x),
        seed,
        kernel,
    })
}
