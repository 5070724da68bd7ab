//! Self-games played by each column player on its own vector.

use std::fmt;
use std::str::FromStr;

use crate::error::{arg_err, Error};

/// Default multiplier applied by a self-game instead of zeroing an entry.
pub const DEFAULT_SHRINK: f64 = 0.99;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum SelfGame {
    #[default]
    None,
    /// Shrink the smallest entry.
    Jmin,
    /// Shrink every entry except the largest.
    Jmax,
}

impl SelfGame {
    pub fn apply(self, h_j: &mut [f64], shrink: f64) {
        match self {
            SelfGame::None => {}
            SelfGame::Jmin => jmin_in_place(h_j, shrink),
            SelfGame::Jmax => jmax_in_place(h_j, shrink),
        }
    }
}

impl fmt::Display for SelfGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelfGame::None => "none",
            SelfGame::Jmin => "jmin",
            SelfGame::Jmax => "jmax",
        })
    }
}

impl FromStr for SelfGame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(SelfGame::None),
            "jmin" | "j-min" => Ok(SelfGame::Jmin),
            "jmax" | "j-max" => Ok(SelfGame::Jmax),
            other => Err(arg_err!("unknown self-game {other:?}; expected none, jmin or jmax")),
        }
    }
}

/// Index of the smallest entry; ties go to the lowest index.
fn argmin(v: &[f64]) -> Option<usize> {
    (0..v.len()).reduce(|best, i| if v[i] < v[best] { i } else { best })
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(v: &[f64]) -> Option<usize> {
    (0..v.len()).reduce(|best, i| if v[i] > v[best] { i } else { best })
}

fn jmin_in_place(h: &mut [f64], shrink: f64) {
    if let Some(i) = argmin(h) {
        h[i] *= shrink;
    }
}

fn jmax_in_place(h: &mut [f64], shrink: f64) {
    if let Some(keep) = argmax(h) {
        for (i, v) in h.iter_mut().enumerate() {
            if i != keep {
                *v *= shrink;
            }
        }
    }
}

/// Multiplies the smallest entry of `h_j` by `shrink`.
pub fn self_game_jmin(h_j: &[f64], shrink: f64) -> Vec<f64> {
    let mut out = h_j.to_vec();
    jmin_in_place(&mut out, shrink);
    out
}

/// Multiplies every entry of `h_j` except the largest by `shrink`.
pub fn self_game_jmax(h_j: &[f64], shrink: f64) -> Vec<f64> {
    let mut out = h_j.to_vec();
    jmax_in_place(&mut out, shrink);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jmin_examples() {
        assert_eq!(self_game_jmin(&[0.5, 0.2, 0.9], 0.99), vec![0.5, 0.2 * 0.99, 0.9]);
        assert_eq!(self_game_jmin(&[0.3, 0.3, 0.3], 0.99), vec![0.3 * 0.99, 0.3, 0.3]);
        assert_eq!(self_game_jmin(&[0.4], 0.99), vec![0.4 * 0.99]);
        assert!((self_game_jmin(&[0.5, 0.2, 0.9], 0.99)[1] - 0.198).abs() < 1e-15);
    }

    #[test]
    fn jmax_examples() {
        assert_eq!(self_game_jmax(&[0.5, 0.2, 0.9], 0.99), vec![0.5 * 0.99, 0.2 * 0.99, 0.9]);
        assert_eq!(self_game_jmax(&[0.4], 0.99), vec![0.4]);
        assert_eq!(self_game_jmax(&[0.0, 0.0, 0.0], 0.99), vec![0.0, 0.0, 0.0]);
        assert_eq!(self_game_jmax(&[0.7, 0.7], 0.5), vec![0.7, 0.35]);
    }

    #[test]
    fn empty_vector_is_a_no_op() {
        assert!(self_game_jmin(&[], 0.99).is_empty());
        assert!(self_game_jmax(&[], 0.99).is_empty());
    }

    #[test]
    fn parse_and_display() {
        for g in [SelfGame::None, SelfGame::Jmin, SelfGame::Jmax] {
            assert_eq!(g.to_string().parse::<SelfGame>().unwrap(), g);
        }
        assert_eq!("J-MAX".parse::<SelfGame>().unwrap(), SelfGame::Jmax);
        assert!("jmid".parse::<SelfGame>().is_err());
    }
}
