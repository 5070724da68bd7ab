//! Per-iteration floating point operation counts, up to constant factors.
//!
//! Multiplying an `a x b` matrix by a `b x c` matrix is counted as `a b c`.

use serde::Serialize;

/// One term `coefficient * I^i * J^j * K^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CostTerm {
    pub label: &'static str,
    pub coefficient: u64,
    pub i_pow: u32,
    pub j_pow: u32,
    pub k_pow: u32,
}

impl CostTerm {
    const fn new(label: &'static str, i_pow: u32, j_pow: u32, k_pow: u32) -> Self {
        CostTerm {
            label,
            coefficient: 1,
            i_pow,
            j_pow,
            k_pow,
        }
    }

    pub fn symbol(&self) -> String {
        let mut s = String::new();
        if self.coefficient != 1 {
            s += &self.coefficient.to_string();
        }
        for (name, p) in [("I", self.i_pow), ("J", self.j_pow), ("K", self.k_pow)] {
            match p {
                0 => {}
                1 => s += name,
                p => s += &format!("{name}^{p}"),
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }

    pub fn evaluate(&self, i: u64, j: u64, k: u64) -> u64 {
        self.coefficient * i.pow(self.i_pow) * j.pow(self.j_pow) * k.pow(self.k_pow)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CostEstimate {
    pub algorithm: &'static str,
    pub terms: Vec<CostTerm>,
    pub dims: (u64, u64, u64),
}

impl CostEstimate {
    pub fn values(&self) -> Vec<u64> {
        let (i, j, k) = self.dims;
        self.terms.iter().map(|t| t.evaluate(i, j, k)).collect()
    }

    pub fn total(&self) -> u64 {
        self.values().iter().sum()
    }

    /// Largest evaluated term and its value.
    pub fn dominant(&self) -> (&CostTerm, u64) {
        self.terms
            .iter()
            .zip(self.values())
            .reduce(|best, cur| if cur.1 > best.1 { cur } else { best })
            .expect("cost estimates always have terms")
    }
}

const MU_TERMS: [CostTerm; 10] = [
    CostTerm::new("W^T X", 1, 1, 1),
    CostTerm::new("W^T W", 1, 0, 2),
    CostTerm::new("(W^T W) H", 0, 1, 2),
    CostTerm::new("H divide", 0, 1, 1),
    CostTerm::new("H multiply", 0, 1, 1),
    CostTerm::new("X H^T", 1, 1, 1),
    CostTerm::new("H H^T", 0, 1, 2),
    CostTerm::new("W (H H^T)", 1, 0, 2),
    CostTerm::new("W divide", 1, 0, 1),
    CostTerm::new("W multiply", 1, 0, 1),
];

/// `I J` pair interactions, each `K^2 + K` per side.
const GAME_TERMS: [CostTerm; 4] = [
    CostTerm::new("pair W gradient", 1, 1, 2),
    CostTerm::new("pair W step", 1, 1, 1),
    CostTerm::new("pair H gradient", 1, 1, 2),
    CostTerm::new("pair H step", 1, 1, 1),
];

/// Cost of one multiplicative-update iteration and one round of the game.
pub fn cost_model(i: u64, j: u64, k: u64) -> Vec<CostEstimate> {
    vec![
        CostEstimate {
            algorithm: "mu",
            terms: MU_TERMS.to_vec(),
            dims: (i, j, k),
        },
        CostEstimate {
            algorithm: "game",
            terms: GAME_TERMS.to_vec(),
            dims: (i, j, k),
        },
    ]
}
