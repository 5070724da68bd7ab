use std::time::Instant;

use crate::error::{arg_err, Error, Result};
use crate::matrix::{check_factor_shapes, reconstruction_error, Mat, NonNegMat};
use crate::rng::{rand_uniform, Rng};

/// Lower end of the strictly positive initialization range.
pub const INIT_LO: f64 = 0.01;
/// Upper end of the strictly positive initialization range.
pub const INIT_HI: f64 = 1.01;

/// A loss that grows past this multiple of the starting loss counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// Copy of `H` taken at iteration `iter` (0 = initialization).
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub iter: usize,
    pub h: Mat,
}

/// Per-iteration record of a fit. `errors[t - 1]` is `||X - WH||_F` after iteration `t`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FitTrace {
    pub errors: Vec<f64>,
    pub wall_ms: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
}

impl FitTrace {
    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn final_error(&self) -> Option<f64> {
        self.errors.last().copied()
    }
}

/// Non-negative factors `W` (I x K) and `H` (K x J) with the trace that produced them.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub w: NonNegMat,
    pub h: NonNegMat,
    pub trace: FitTrace,
}

impl Factorization {
    pub fn reconstruction_error(&self, x: &Mat) -> Result<f64> {
        reconstruction_error(x, &self.w, &self.h)
    }

    pub fn relative_error(&self, x: &Mat) -> Result<f64> {
        crate::matrix::relative_error(x, &self.w, &self.h)
    }
}

/// Draws `W` then `H` from `Uniform(0.01, 1.01)`.
pub fn random_init(rng: &mut Rng, i: usize, j: usize, k: usize) -> Result<(NonNegMat, NonNegMat)> {
    let w = rand_uniform(rng, i, k, INIT_LO, INIT_HI)?;
    let h = rand_uniform(rng, k, j, INIT_LO, INIT_HI)?;
    Ok((NonNegMat::from_mat_unchecked(w), NonNegMat::from_mat_unchecked(h)))
}

pub(crate) fn check_fit_args(x: &Mat, k: usize, t_max: usize) -> Result<()> {
    if k == 0 {
        return Err(arg_err!("rank k must be at least 1"));
    }
    if t_max == 0 {
        return Err(arg_err!("t_max must be at least 1"));
    }
    if x.rows() == 0 || x.cols() == 0 {
        return Err(arg_err!("data matrix is empty ({}x{})", x.rows(), x.cols()));
    }
    if x.min() < 0.0 {
        return Err(arg_err!("data matrix has negative entries (min {})", x.min()));
    }
    if k > x.rows().min(x.cols()) {
        log::warn!(
            "rank {k} exceeds min(I, J) = {}; fitting an over-complete factorization",
            x.rows().min(x.cols())
        );
    }
    Ok(())
}

pub(crate) fn check_init(x: &Mat, w: &Mat, h: &Mat, t_max: usize) -> Result<()> {
    check_factor_shapes(x, w, h)?;
    check_fit_args(x, w.cols(), t_max)
}

/// Accumulates a [`FitTrace`] while a solver runs.
pub(crate) struct Recorder {
    trace: FitTrace,
    snapshot_every: Option<usize>,
    t_max: usize,
    initial_error: f64,
    last: Instant,
    divergence_hint: Option<String>,
}

impl Recorder {
    pub(crate) fn new(x: &Mat, w: &Mat, h: &Mat, t_max: usize, snapshot_every: Option<usize>) -> Result<Self> {
        if snapshot_every == Some(0) {
            return Err(arg_err!("snapshot_every must be at least 1"));
        }
        let mut trace = FitTrace {
            errors: Vec::with_capacity(t_max),
            wall_ms: Vec::with_capacity(t_max),
            snapshots: Vec::new(),
        };
        if snapshot_every.is_some() {
            trace.snapshots.push(Snapshot { iter: 0, h: h.clone() });
        }
        Ok(Recorder {
            trace,
            snapshot_every,
            t_max,
            initial_error: reconstruction_error(x, w, h)?,
            last: Instant::now(),
            divergence_hint: None,
        })
    }

    /// Enables the divergence guard; `hint` names the step size in the error.
    pub(crate) fn with_divergence_guard(mut self, hint: String) -> Self {
        self.divergence_hint = Some(hint);
        self
    }

    pub(crate) fn record(&mut self, iter: usize, x: &Mat, w: &Mat, h: &Mat) -> Result<()> {
        let err = reconstruction_error(x, w, h)?;
        let now = Instant::now();
        self.trace.errors.push(err);
        self.trace
            .wall_ms
            .push(now.duration_since(self.last).as_secs_f64() * 1e3);
        self.last = now;
        if let Some(every) = self.snapshot_every {
            if iter % every == 0 || iter == self.t_max {
                self.trace.snapshots.push(Snapshot { iter, h: h.clone() });
            }
        }
        if let Some(hint) = &self.divergence_hint {
            let limit = DIVERGENCE_FACTOR * self.initial_error.max(f64::MIN_POSITIVE);
            if !err.is_finite() || err > limit {
                return Err(Error::Diverged(format!(
                    "error {err:e} at iteration {iter} exceeds {DIVERGENCE_FACTOR:e} x initial {:e}; reduce {hint}",
                    self.initial_error
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn finish(self) -> FitTrace {
        self.trace
    }
}
