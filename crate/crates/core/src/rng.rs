//! Seeded random streams.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, and
//! uniform reals are built from the top 53 bits of each `u64` draw. Both
//! steps are fixed, so a seed names the same stream forever.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{arg_err, Result};
use crate::matrix::Mat;

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    /// Uniform draw in `[lo, hi)`. Caller guarantees `lo < hi`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let v = lo + (hi - lo) * self.next_f64();
        // lo + span * u can round up to hi when the span is wide.
        if v >= hi {
            hi.next_down()
        } else {
            v
        }
    }
}

/// `rows x cols` matrix of i.i.d. `Uniform[lo, hi)` draws, filled row-major.
pub fn rand_uniform(rng: &mut Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> Result<Mat> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(arg_err!("uniform range requires finite lo < hi, got [{lo}, {hi})"));
    }
    let data = (0..rows * cols).map(|_| rng.uniform(lo, hi)).collect();
    Ok(Mat::from_vec_unchecked(rows, cols, data))
}

/// SplitMix64 finalizer (Steele, Lea, Flood 2014 constants).
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a path of integers, e.g. `(master, dataset, algo, run)`.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(parts.len() as u64), |acc, &p| mix64(acc ^ mix64(p)))
}

/// 64-bit FNV-1a of a string; used to turn algorithm names into seed components.
pub fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}
