//! Classical NNMF solvers: multiplicative updates, projected gradient and
//! non-negative alternating least squares. All run for a fixed iteration
//! budget and record a [`FitTrace`].

pub mod mu;
pub mod nals;
pub mod pg;
mod trace;

pub use mu::{mu_fit, mu_fit_from, mu_step, MuConfig};
pub use nals::{nals_fit, nals_fit_from, NalsConfig};
pub use pg::{grad_h, grad_w, half_squared_loss, pg_fit, pg_fit_from, pg_step, PgConfig};
pub use trace::{random_init, Factorization, FitTrace, Snapshot, DIVERGENCE_FACTOR, INIT_HI, INIT_LO};

pub(crate) use trace::{check_fit_args, check_init, Recorder};
