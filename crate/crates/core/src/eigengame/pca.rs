//! Exact PCA for small matrices via cyclic Jacobi rotations.

use crate::error::{arg_err, shape_err, Error, Result};
use crate::matrix::{dot, Mat};

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a symmetric matrix, sorted by decreasing eigenvalue.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as rows, matching the order of `values`.
    pub vectors: Mat,
}

/// Cyclic Jacobi eigen-decomposition. Pairs `(p, q)` are swept in
/// row-major order, so the result is deterministic.
pub fn symmetric_eigen(a: &Mat) -> Result<SymmetricEigen> {
    let n = a.rows();
    if a.cols() != n {
        return Err(shape_err!("eigen-decomposition of non-square {}x{}", n, a.cols()));
    }
    for i in 0..n {
        for j in 0..i {
            let (x, y) = (a[(i, j)], a[(j, i)]);
            if (x - y).abs() > 1e-12 * x.abs().max(y.abs()).max(1.0) {
                return Err(arg_err!("matrix is not symmetric at ({i}, {j}): {x} vs {y}"));
            }
        }
    }
    let mut m = a.clone();
    let mut v = Mat::identity(n);
    let scale = a.frobenius_norm();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off.sqrt() <= f64::EPSILON * scale * 1e-3 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[(b, b)].total_cmp(&m[(a, a)]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (r, &i) in order.iter().enumerate() {
        let mut col = v.col(i);
        canonical_sign(&mut col);
        vectors.row_mut(r).copy_from_slice(&col);
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Flips `v` so that its largest-magnitude entry (lowest index on ties) is positive.
fn canonical_sign(v: &mut [f64]) {
    let pivot = (0..v.len()).reduce(|b, i| if v[i].abs() > v[b].abs() { i } else { b });
    if let Some(p) = pivot {
        if v[p] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Singular values of `x` in decreasing order, by one-sided (Hestenes) Jacobi.
///
/// Works on columns directly, so small singular values keep high relative
/// accuracy instead of being squared away as in an eigen-solve of `X^T X`.
pub fn singular_values(x: &Mat) -> Result<Vec<f64>> {
    let x = if x.rows() < x.cols() { x.transpose() } else { x.clone() };
    let d = x.cols();
    let mut cols: Vec<Vec<f64>> = (0..d).map(|j| x.col(j)).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in p + 1..d {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let (lo, hi) = cols.split_at_mut(q);
                for (a, b) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (up, uq) = (*a, *b);
                    *a = c * up - s * uq;
                    *b = s * up + c * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| dot(c, c).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Top principal directions of a data matrix (observations in rows).
#[derive(Clone, Debug)]
pub struct PcaResult {
    /// `k x d`, one unit-norm component per row.
    pub components: Mat,
    pub explained_variance: Vec<f64>,
    pub explained_variance_ratio: Vec<f64>,
    /// Column means subtracted before projection.
    pub mean: Vec<f64>,
}

pub fn column_means(x: &Mat) -> Vec<f64> {
    let n = x.rows() as f64;
    (0..x.cols())
        .map(|j| (0..x.rows()).map(|i| x[(i, j)]).sum::<f64>() / n)
        .collect()
}

pub fn center(x: &Mat, mean: &[f64]) -> Mat {
    let mut c = x.clone();
    for i in 0..c.rows() {
        for (v, m) in c.row_mut(i).iter_mut().zip(mean) {
            *v -= m;
        }
    }
    c
}

/// Covariance `(1/n) Xc^T Xc` of the column-centered data.
pub fn covariance(x: &Mat) -> Result<(Mat, Vec<f64>)> {
    if x.rows() < 2 {
        return Err(Error::Degenerate(format!("PCA needs at least 2 observations, got {}", x.rows())));
    }
    let mean = column_means(x);
    let xc = center(x, &mean);
    let cov = crate::matrix::matmul(&xc.transpose(), &xc)?.scale(1.0 / x.rows() as f64);
    Ok((cov, mean))
}

/// Mean-centered PCA from the Jacobi eigen-decomposition of the covariance.
pub fn exact_pca(x: &Mat, k: usize) -> Result<PcaResult> {
    if k == 0 || k > x.cols() {
        return Err(arg_err!("k must lie in 1..={}, got {k}", x.cols()));
    }
    let (cov, mean) = covariance(x)?;
    let eig = symmetric_eigen(&cov)?;
    let values: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = values.iter().sum();
    let explained_variance = values[..k].to_vec();
    let explained_variance_ratio = explained_variance
        .iter()
        .map(|&l| if total > 0.0 { l / total } else { 0.0 })
        .collect();
    let components = Mat::from_vec_unchecked(
        k,
        x.cols(),
        eig.vectors.as_slice()[..k * x.cols()].to_vec(),
    );
    Ok(PcaResult {
        components,
        explained_variance,
        explained_variance_ratio,
        mean,
    })
}

/// Coordinates of every row of `m` in the PCA basis, after centering.
pub fn project_rows(m: &Mat, pca: &PcaResult) -> Result<Mat> {
    let d = pca.components.cols();
    if m.cols() != d {
        return Err(shape_err!("rows of length {} projected onto {}-dimensional components", m.cols(), d));
    }
    let centered = center(m, &pca.mean);
    crate::matrix::matmul(&centered, &pca.components.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::matmul;
    use crate::rng::{rand_uniform, Rng};

    #[test]
    fn diagonal_matrix_eigenpairs() {
        let a = Mat::from_rows(&[[1.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 2.0]]).unwrap();
        let e = symmetric_eigen(&a).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        assert_eq!(e.vectors.row(0), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn eigen_reconstructs_random_symmetric() {
        let mut rng = Rng::new(4);
        let b = rand_uniform(&mut rng, 6, 6, -1.0, 1.0).unwrap();
        let a = matmul(&b, &b.transpose()).unwrap();
        let e = symmetric_eigen(&a).unwrap();
        // V^T diag(l) V == A, V V^T == I
        let vt = e.vectors.transpose();
        let mut lv = e.vectors.clone();
        for r in 0..6 {
            for c in 0..6 {
                lv[(r, c)] *= e.values[r];
            }
        }
        let recon = matmul(&vt, &lv).unwrap();
        assert!(recon.sub(&a).unwrap().frobenius_norm() < 1e-12 * a.frobenius_norm());
        let gram = matmul(&e.vectors, &vt).unwrap();
        assert!(gram.sub(&Mat::identity(6)).unwrap().frobenius_norm() < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rejects_non_symmetric() {
        let a = Mat::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(symmetric_eigen(&a).is_err());
    }

    #[test]
    fn singular_values_of_known_matrix() {
        let x = Mat::from_rows(&[[3.0, 0.0], [0.0, -4.0], [0.0, 0.0]]).unwrap();
        let sv = singular_values(&x).unwrap();
        assert!((sv[0] - 4.0).abs() < 1e-15 && (sv[1] - 3.0).abs() < 1e-15);
        let wide = singular_values(&x.transpose()).unwrap();
        assert_eq!(sv, wide);
    }

    #[test]
    fn rank_one_data_has_single_component() {
        let dir = [0.6, 0.8];
        let rows: Vec<[f64; 2]> = (0..7).map(|t| [t as f64 * dir[0], t as f64 * dir[1]]).collect();
        let x = Mat::from_rows(&rows).unwrap();
        let p = exact_pca(&x, 2).unwrap();
        assert!((p.explained_variance_ratio[0] - 1.0).abs() < 1e-12);
        assert!(p.explained_variance_ratio[1].abs() < 1e-12);
        assert!((p.components[(0, 0)] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn diag_two_one_covariance() {
        // Points (+-sqrt2, 0) and (0, +-1): covariance is diag(1, 0.5).
        let s = 2f64.sqrt();
        let x = Mat::from_rows(&[[s, 0.0], [-s, 0.0], [0.0, 1.0], [0.0, -1.0]]).unwrap();
        let p = exact_pca(&x, 2).unwrap();
        assert!((p.explained_variance[0] - 1.0).abs() < 1e-14);
        assert!((p.explained_variance[1] - 0.5).abs() < 1e-14);
        let ratio_sum: f64 = p.explained_variance_ratio.iter().sum();
        assert!(ratio_sum <= 1.0 + 1e-10);
    }

    #[test]
    fn projection_centering_and_completeness() {
        let x = rand_uniform(&mut Rng::new(12), 15, 4, 0.0, 3.0).unwrap();
        let p = exact_pca(&x, 4).unwrap();
        let mean_row = Mat::from_vec(1, 4, p.mean.clone()).unwrap();
        let origin = project_rows(&mean_row, &p).unwrap();
        assert!(origin.as_slice().iter().all(|v| v.abs() < 1e-12));

        let comp_plus_mean = Mat::from_vec(
            1,
            4,
            p.components.row(1).iter().zip(&p.mean).map(|(a, b)| a + b).collect(),
        )
        .unwrap();
        let coords = project_rows(&comp_plus_mean, &p).unwrap();
        for (c, &v) in coords.as_slice().iter().enumerate() {
            let want = if c == 1 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-12);
        }

        let z = project_rows(&x, &p).unwrap();
        let back = matmul(&z, &p.components).unwrap();
        let back = center(&back, &p.mean.iter().map(|m| -m).collect::<Vec<_>>());
        assert!(back.sub(&x).unwrap().frobenius_norm() < 1e-10);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(exact_pca(&Mat::zeros(1, 3), 1), Err(Error::Degenerate(_))));
        assert!(exact_pca(&Mat::zeros(4, 3), 4).is_err());
        assert!(project_rows(&Mat::zeros(2, 2), &exact_pca(&Mat::filled(3, 3, 1.0), 1).unwrap()).is_err());
    }
}
