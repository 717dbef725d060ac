//! Brute-force comparison of weighted models over bounded supports.

use crate::automata::{Alphabet, Dfa, Pfa, Wfa};
use crate::error::{Error, Result};
use crate::rnn::RnnModel;

/// Anything that assigns a real weight to every word. Recognizers score
/// 1 for accepted strings and 0 otherwise.
pub trait Weighted {
    fn alphabet(&self) -> &Alphabet;
    fn weight_of(&self, w: &[usize]) -> Result<f64>;
}

impl Weighted for Pfa {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn weight_of(&self, w: &[usize]) -> Result<f64> {
        Ok(self.weight_indices(w))
    }
}

impl Weighted for Wfa {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn weight_of(&self, w: &[usize]) -> Result<f64> {
        Ok(self.weight_indices(w))
    }
}

impl Weighted for Dfa {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn weight_of(&self, w: &[usize]) -> Result<f64> {
        Ok(self.run_indices(w) as u8 as f64)
    }
}

impl Weighted for RnnModel {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn weight_of(&self, w: &[usize]) -> Result<f64> {
        if self.is_lm() {
            self.lm_weight_indices(w)
        } else {
            Ok(self.classify_indices(w)?.0 as u8 as f64)
        }
    }
}

const SUPPORT_CAP: u64 = 10_000_000;

fn check_same_alphabet(a: &dyn Weighted, b: &dyn Weighted) -> Result<()> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::AlphabetMismatch(
            a.alphabet().symbols().to_vec(),
            b.alphabet().symbols().to_vec(),
        ));
    }
    Ok(())
}

fn check_support_guard(alphabet: &Alphabet, depth: usize) -> Result<()> {
    let mut total: u64 = 0;
    for len in 0..=depth {
        let words = (alphabet.len() as u64)
            .checked_pow(len as u32)
            .filter(|&w| w <= SUPPORT_CAP && total + w <= SUPPORT_CAP)
            .ok_or(Error::SupportGuard { depth, cap: SUPPORT_CAP })?;
        total += words;
    }
    Ok(())
}

/// Max of |a(w) − b(w)| over Σ^{≤ n_max}, with the shortest-then-
/// lexicographically-least witness attaining it. Identical models yield
/// (0, "").
pub fn dist_inf_finite(
    a: &dyn Weighted,
    b: &dyn Weighted,
    n_max: usize,
) -> Result<(f64, String)> {
    check_same_alphabet(a, b)?;
    let alphabet = a.alphabet();
    check_support_guard(alphabet, n_max)?;
    let mut best = f64::NEG_INFINITY;
    let mut witness = Vec::new();
    for len in 0..=n_max {
        for w in alphabet.words_of_len(len) {
            let gap = (a.weight_of(&w)? - b.weight_of(&w)?).abs();
            if gap > best {
                best = gap;
                witness = w;
            }
        }
    }
    Ok((best, alphabet.render(&witness)))
}

/// Outcome of the bounded Tchebychev-distance enumeration.
#[derive(Debug, Clone, PartialEq)]
pub enum TchebychevVerdict {
    /// First string (length-lexicographic order) with |a(w) − b(w)| > c.
    Yes(String),
    /// Both cumulative masses reached 1 − c with every gap within c.
    No,
    /// Enumeration budget exhausted before either condition triggered.
    Inconclusive,
}

/// Decides d∞(a, b) > c for consistent models by enumerating strings until
/// both residual masses drop below c. Consistency of the inputs cannot be
/// checked mechanically, hence the cap and the inconclusive verdict.
pub fn tchebychev_enumerate(
    a: &dyn Weighted,
    b: &dyn Weighted,
    c: f64,
    cap: usize,
) -> Result<TchebychevVerdict> {
    if c <= 0.0 {
        return Err(Error::InvalidParameter("threshold must be positive".into()));
    }
    check_same_alphabet(a, b)?;
    let alphabet = a.alphabet();
    let mut seen = 0usize;
    let mut mass_a = 0.0;
    let mut mass_b = 0.0;
    for len in 0.. {
        for w in alphabet.words_of_len(len) {
            if seen == cap {
                return Ok(TchebychevVerdict::Inconclusive);
            }
            seen += 1;
            let wa = a.weight_of(&w)?;
            let wb = b.weight_of(&w)?;
            if (wa - wb).abs() > c {
                return Ok(TchebychevVerdict::Yes(alphabet.render(&w)));
            }
            mass_a += wa;
            mass_b += wb;
            if mass_a >= 1.0 - c && mass_b >= 1.0 - c {
                return Ok(TchebychevVerdict::No);
            }
        }
    }
    unreachable!()
}

#[derive(Debug, Clone, PartialEq)]
pub enum EqOutcome {
    Equal,
    Counterexample(String),
}

const EQ_TOL: f64 = 1e-12;

/// Weight equality over Σ^{≤ m} within 1e−12; recognizers compare their
/// boolean languages. Returns the first differing string in length-
/// lexicographic order.
pub fn eq_finite(a: &dyn Weighted, b: &dyn Weighted, m: usize) -> Result<EqOutcome> {
    check_same_alphabet(a, b)?;
    let alphabet = a.alphabet();
    check_support_guard(alphabet, m)?;
    for len in 0..=m {
        for w in alphabet.words_of_len(len) {
            if (a.weight_of(&w)? - b.weight_of(&w)?).abs() > EQ_TOL {
                return Ok(EqOutcome::Counterexample(alphabet.render(&w)));
            }
        }
    }
    Ok(EqOutcome::Equal)
}
