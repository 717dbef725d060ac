//! Exact finite-state machinery: DFA run/minimize/equivalence, Nerode
//! prefixes, weighted and probabilistic automata.

mod dfa;
pub(crate) mod json;
mod wfa;

pub use dfa::{Dfa, EquivResult};
pub use json::{dfa_from_json, dfa_to_json, pfa_from_json, pfa_to_json};
pub use wfa::{Pfa, PfaViolation, Wfa};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Ordered finite set of symbol identifiers. The end marker `$` used by
/// language models is kept out of the ordinary symbol list; it always maps
/// to index `len()` when needed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new(symbols: Vec<String>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParameter("alphabet must be nonempty".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &symbols {
            if s == "$" {
                return Err(Error::InvalidParameter(
                    "`$` is reserved for the end marker".into(),
                ));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::InvalidParameter(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// The binary alphabet {0, 1} used throughout the benchmarks.
    pub fn binary() -> Self {
        Alphabet { symbols: vec!["0".into(), "1".into()] }
    }

    /// Unary alphabet {a}.
    pub fn unary() -> Self {
        Alphabet { symbols: vec!["a".into()] }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, idx: usize) -> &str {
        &self.symbols[idx]
    }

    pub fn index_of(&self, sym: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == sym)
    }

    /// Index used for the end marker in LM heads: one past the last symbol.
    pub fn end_marker_index(&self) -> usize {
        self.symbols.len()
    }

    /// Parse a string of single-character symbols into indices.
    pub fn parse(&self, w: &str) -> Result<Vec<usize>> {
        w.chars()
            .map(|c| {
                self.index_of(&c.to_string()).ok_or_else(|| Error::UnknownSymbol {
                    symbol: c.to_string(),
                    alphabet: self.symbols.clone(),
                })
            })
            .collect()
    }

    /// Render a word of symbol indices back to a string.
    pub fn render(&self, w: &[usize]) -> String {
        w.iter().map(|&i| self.symbols[i].as_str()).collect()
    }

    /// All words of exactly length `len`, in lexicographic symbol order.
    pub fn words_of_len(&self, len: usize) -> WordIter {
        WordIter { alphabet_len: self.symbols.len(), word: vec![0; len], done: false }
    }

    /// One word drawn uniformly from the set Σ^{≤ max_len}, so longer
    /// lengths carry proportionally more mass.
    pub fn sample_word<R: rand::Rng>(&self, max_len: usize, rng: &mut R) -> Vec<usize> {
        let base = self.symbols.len() as u64;
        let mut counts = Vec::with_capacity(max_len + 1);
        let mut c = 1u64;
        let mut total = 0u64;
        for _ in 0..=max_len {
            counts.push(c);
            total += c;
            c *= base;
        }
        let mut pick = rng.gen_range(0..total);
        let mut len = 0;
        for (l, &n) in counts.iter().enumerate() {
            if pick < n {
                len = l;
                break;
            }
            pick -= n;
        }
        let mut word = vec![0usize; len];
        for slot in word.iter_mut().rev() {
            *slot = (pick % base) as usize;
            pick /= base;
        }
        word
    }
}

/// Iterator over fixed-length words in lexicographic order.
pub struct WordIter {
    alphabet_len: usize,
    word: Vec<usize>,
    done: bool,
}

impl Iterator for WordIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.word.clone();
        // increment like an odometer, most significant first
        let mut i = self.word.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.word[i] += 1;
            if self.word[i] < self.alphabet_len {
                break;
            }
            self.word[i] = 0;
        }
        Some(out)
    }
}

/// Metadata describing how a labeled sample was produced.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SampleMeta {
    pub strategy: String,
    pub support_bound: usize,
    pub seed: u64,
}

/// Multiset of (string, label) pairs. Duplicates are permitted.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledSample {
    pub alphabet: Alphabet,
    pub items: Vec<(String, bool)>,
    pub meta: SampleMeta,
}

impl LabeledSample {
    pub fn new(alphabet: Alphabet, items: Vec<(String, bool)>, meta: SampleMeta) -> Self {
        LabeledSample { alphabet, items, meta }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// One record per line: `<label 0|1><tab><string>`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (w, l) in &self.items {
            out.push(if *l { '1' } else { '0' });
            out.push('\t');
            out.push_str(w);
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(alphabet: Alphabet, text: &str) -> Result<Self> {
        let mut items = Vec::new();
        for (no, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (label, rest) = line
                .split_once('\t')
                .ok_or_else(|| Error::Parse(format!("line {}: missing tab", no + 1)))?;
            let l = match label {
                "0" => false,
                "1" => true,
                other => return Err(Error::Parse(format!("line {}: bad label {other:?}", no + 1))),
            };
            alphabet.parse(rest)?;
            items.push((rest.to_string(), l));
        }
        Ok(LabeledSample { alphabet, items, meta: SampleMeta::default() })
    }
}
