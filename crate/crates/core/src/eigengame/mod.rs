//! EigenGame PCA and the exact Jacobi-based PCA it is checked against.

mod game;
mod pca;

pub use game::{
    eigen_gradient, eigen_utility, eigengame_fit, eigengame_pca, random_sphere_init,
    riemannian_project, EigenConfig, EigenGame, EigenState,
};
pub use pca::{
    center, column_means, covariance, exact_pca, project_rows, singular_values, symmetric_eigen,
    PcaResult, SymmetricEigen,
};
