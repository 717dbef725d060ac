use serde::{Deserialize, Serialize};

use super::Alphabet;
use crate::error::{Error, Result};
use crate::linalg::Mat;

/// Absolute tolerance for all stochasticity checks. Constructions in this
/// crate use dyadic rationals, which are exact in binary floating point.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Weighted automaton over the reals:
/// weight(w) = alphaᵀ · A_{w1} · … · A_{w|w|} · beta.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Wfa {
    pub alphabet: Alphabet,
    pub dim: usize,
    pub alpha: Vec<f64>,
    /// One `dim × dim` matrix per symbol, in alphabet order.
    pub trans: Vec<Mat>,
    pub beta: Vec<f64>,
}

impl Wfa {
    pub fn new(alphabet: Alphabet, alpha: Vec<f64>, trans: Vec<Mat>, beta: Vec<f64>) -> Result<Self> {
        let dim = alpha.len();
        if beta.len() != dim || trans.len() != alphabet.len() {
            return Err(Error::ShapeMismatch("WFA vectors/matrices disagree on dim".into()));
        }
        for m in &trans {
            if m.rows != dim || m.cols != dim {
                return Err(Error::ShapeMismatch("WFA transition matrix shape".into()));
            }
        }
        Ok(Wfa { alphabet, dim, alpha, trans, beta })
    }

    pub fn weight_indices(&self, w: &[usize]) -> f64 {
        weight_with_final(&self.alpha, &self.trans, &self.beta, w)
    }

    pub fn weight(&self, w: &str) -> Result<f64> {
        Ok(self.weight_indices(&self.alphabet.parse(w)?))
    }
}

fn weight_with_final(alpha: &[f64], trans: &[Mat], fin: &[f64], w: &[usize]) -> f64 {
    let mut v = alpha.to_vec();
    for &sym in w {
        v = trans[sym].vec_mul(&v);
    }
    crate::linalg::dot(&v, fin)
}

/// Probabilistic finite automaton. Row-wise outgoing-plus-final
/// stochasticity: for every state i,
/// sum over symbols and targets of trans + final[i] = 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pfa {
    pub alphabet: Alphabet,
    pub dim: usize,
    pub alpha: Vec<f64>,
    pub trans: Vec<Mat>,
    /// Final-state weights P(q).
    pub final_weights: Vec<f64>,
    /// At most one nonzero outgoing entry per (state, symbol).
    pub deterministic: bool,
}

/// First violated constraint found by `validate`.
#[derive(Debug, Clone, PartialEq)]
pub enum PfaViolation {
    NegativeInitial { state: usize },
    InitialMass { total: f64 },
    NegativeTransition { symbol: usize, from: usize, to: usize },
    NegativeFinal { state: usize },
    RowMass { state: usize, total: f64 },
    NondeterministicRow { state: usize, symbol: usize },
}

impl std::fmt::Display for PfaViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PfaViolation::NegativeInitial { state } => write!(f, "negative initial weight at state {state}"),
            PfaViolation::InitialMass { total } => write!(f, "initial weights sum to {total}, expected 1"),
            PfaViolation::NegativeTransition { symbol, from, to } => {
                write!(f, "negative transition weight at (state {from}, symbol {symbol}) -> {to}")
            }
            PfaViolation::NegativeFinal { state } => write!(f, "negative final weight at state {state}"),
            PfaViolation::RowMass { state, total } => {
                write!(f, "outgoing-plus-final mass at state {state} is {total}, expected 1")
            }
            PfaViolation::NondeterministicRow { state, symbol } => {
                write!(f, "more than one outgoing transition at (state {state}, symbol {symbol})")
            }
        }
    }
}

impl Pfa {
    pub fn new(
        alphabet: Alphabet,
        alpha: Vec<f64>,
        trans: Vec<Mat>,
        final_weights: Vec<f64>,
        deterministic: bool,
    ) -> Result<Self> {
        let dim = alpha.len();
        if final_weights.len() != dim || trans.len() != alphabet.len() {
            return Err(Error::ShapeMismatch("PFA vectors/matrices disagree on dim".into()));
        }
        for m in &trans {
            if m.rows != dim || m.cols != dim {
                return Err(Error::ShapeMismatch("PFA transition matrix shape".into()));
            }
        }
        Ok(Pfa { alphabet, dim, alpha, trans, final_weights, deterministic })
    }

    /// Check all PFA invariants within `STOCHASTIC_TOL`; names the first
    /// violated constraint.
    pub fn validate(&self) -> std::result::Result<(), PfaViolation> {
        for (i, &a) in self.alpha.iter().enumerate() {
            if a < -STOCHASTIC_TOL {
                return Err(PfaViolation::NegativeInitial { state: i });
            }
        }
        let total: f64 = self.alpha.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(PfaViolation::InitialMass { total });
        }
        for (sym, m) in self.trans.iter().enumerate() {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    if m.at(i, j) < -STOCHASTIC_TOL {
                        return Err(PfaViolation::NegativeTransition { symbol: sym, from: i, to: j });
                    }
                }
            }
        }
        for (i, &p) in self.final_weights.iter().enumerate() {
            if p < -STOCHASTIC_TOL {
                return Err(PfaViolation::NegativeFinal { state: i });
            }
        }
        for i in 0..self.dim {
            let mut row = self.final_weights[i];
            for m in &self.trans {
                for j in 0..self.dim {
                    row += m.at(i, j);
                }
            }
            if (row - 1.0).abs() > STOCHASTIC_TOL {
                return Err(PfaViolation::RowMass { state: i, total: row });
            }
        }
        if self.deterministic {
            for i in 0..self.dim {
                for (sym, m) in self.trans.iter().enumerate() {
                    let nonzero = (0..self.dim).filter(|&j| m.at(i, j).abs() > STOCHASTIC_TOL).count();
                    if nonzero > 1 {
                        return Err(PfaViolation::NondeterministicRow { state: i, symbol: sym });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn weight_indices(&self, w: &[usize]) -> f64 {
        weight_with_final(&self.alpha, &self.trans, &self.final_weights, w)
    }

    pub fn weight(&self, w: &str) -> Result<f64> {
        Ok(self.weight_indices(&self.alphabet.parse(w)?))
    }

    /// Total mass over strings of length at most `len_bound`, by vector
    /// iteration in O(L·n²·|Σ|) rather than string enumeration.
    pub fn mass_up_to(&self, len_bound: usize) -> f64 {
        let mut v = self.alpha.clone();
        let mut mass = crate::linalg::dot(&v, &self.final_weights);
        for _ in 0..len_bound {
            let mut next = vec![0.0; self.dim];
            for m in &self.trans {
                crate::linalg::add_assign(&mut next, &m.vec_mul(&v));
            }
            v = next;
            mass += crate::linalg::dot(&v, &self.final_weights);
        }
        mass
    }

    /// The single-state DPFA on {a} with f(aⁿ) = 2^{-n-1}.
    pub fn unary_halving() -> Pfa {
        let alphabet = Alphabet::unary();
        Pfa {
            alphabet,
            dim: 1,
            alpha: vec![1.0],
            trans: vec![Mat::from_rows(vec![vec![0.5]])],
            final_weights: vec![0.5],
            deterministic: true,
        }
    }
}
