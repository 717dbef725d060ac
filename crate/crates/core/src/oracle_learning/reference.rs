use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use rand::RngCore;

use crate::automata::{Alphabet, Pfa};
use crate::error::{Error, Result};

/// A reference language model: the distribution the learner is judged
/// against. `most_probable` honors a history of already-seen strings.
pub trait ReferenceLm {
    fn alphabet(&self) -> &Alphabet;

    fn prob(&self, w: &[usize]) -> f64;

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<usize>;

    /// Up to `count` fresh strings in nonincreasing probability, all with
    /// positive probability and outside `history`. Ties break length-lex.
    fn most_probable(
        &self,
        count: usize,
        history: &HashSet<Vec<usize>>,
    ) -> Result<Vec<(Vec<usize>, f64)>>;

    /// The full support when it is finite, `None` otherwise.
    fn finite_support(&self) -> Option<&[(Vec<usize>, f64)]>;
}

/// Empirical distribution over finitely many strings.
#[derive(Debug, Clone)]
pub struct FiniteSupportReference {
    alphabet: Alphabet,
    /// Sorted by nonincreasing probability, ties length-lex.
    items: Vec<(Vec<usize>, f64)>,
}

impl FiniteSupportReference {
    pub fn new(alphabet: Alphabet, mut items: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut total = 0.0;
        for (w, p) in &items {
            if *p <= 0.0 {
                return Err(Error::InvalidParameter(
                    "support probabilities must be positive".into(),
                ));
            }
            if w.iter().any(|&s| s >= alphabet.len()) {
                return Err(Error::InvalidParameter("support word outside alphabet".into()));
            }
            if !seen.insert(w.clone()) {
                return Err(Error::InvalidParameter("duplicate support string".into()));
            }
            total += p;
        }
        if total > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "support mass {total} exceeds 1"
            )));
        }
        items.sort_by(|(wa, pa), (wb, pb)| {
            pb.partial_cmp(pa)
                .unwrap()
                .then(wa.len().cmp(&wb.len()))
                .then(wa.cmp(wb))
        });
        Ok(FiniteSupportReference { alphabet, items })
    }

    /// Uniform distribution over Σ^{≤ max_len}.
    pub fn uniform_up_to(alphabet: Alphabet, max_len: usize) -> Result<Self> {
        let mut words = Vec::new();
        for len in 0..=max_len {
            words.extend(alphabet.words_of_len(len));
        }
        let p = 1.0 / words.len() as f64;
        Self::new(alphabet, words.into_iter().map(|w| (w, p)).collect())
    }
}

impl ReferenceLm for FiniteSupportReference {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn prob(&self, w: &[usize]) -> f64 {
        self.items
            .iter()
            .find(|(u, _)| u == w)
            .map(|(_, p)| *p)
            .unwrap_or(0.0)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<usize> {
        // inverse-CDF; leftover mass (if any) falls on the last item
        let u = (rng.next_u64() as f64) / (u64::MAX as f64);
        let mut acc = 0.0;
        for (w, p) in &self.items {
            acc += p;
            if u < acc {
                return w.clone();
            }
        }
        self.items.last().expect("nonempty support").0.clone()
    }

    fn most_probable(
        &self,
        count: usize,
        history: &HashSet<Vec<usize>>,
    ) -> Result<Vec<(Vec<usize>, f64)>> {
        let fresh: Vec<(Vec<usize>, f64)> = self
            .items
            .iter()
            .filter(|(w, _)| !history.contains(w))
            .take(count)
            .cloned()
            .collect();
        if fresh.len() < count {
            return Err(Error::SupportExhausted { requested: count, available: fresh.len() });
        }
        Ok(fresh)
    }

    fn finite_support(&self) -> Option<&[(Vec<usize>, f64)]> {
        Some(&self.items)
    }
}

/// Reference model backed by a deterministic PFA.
#[derive(Debug, Clone)]
pub struct DpfaReference {
    pfa: Pfa,
    start: usize,
}

const MPS_EXPANSION_CAP: usize = 1_000_000;

impl DpfaReference {
    pub fn new(pfa: Pfa) -> Result<Self> {
        if !pfa.deterministic {
            return Err(Error::InvalidParameter(
                "most-probable-string search needs a deterministic PFA".into(),
            ));
        }
        if let Err(v) = pfa.validate() {
            return Err(Error::InvalidParameter(format!("invalid PFA: {v}")));
        }
        let start = pfa
            .alpha
            .iter()
            .position(|&a| a > 0.5)
            .ok_or_else(|| Error::InvalidParameter("DPFA needs a unit initial state".into()))?;
        Ok(DpfaReference { pfa, start })
    }

    pub fn pfa(&self) -> &Pfa {
        &self.pfa
    }

    /// Unique successor and its probability, if any.
    fn succ(&self, state: usize, sym: usize) -> Option<(usize, f64)> {
        let m = &self.pfa.trans[sym];
        (0..self.pfa.dim).find_map(|t| {
            let p = m.at(state, t);
            (p > 0.0).then_some((t, p))
        })
    }
}

/// Heap node of the best-first search: a finished string or an open prefix,
/// keyed by exact probability / remaining prefix mass.
struct Node {
    key: f64,
    word: Vec<usize>,
    /// None marks a finished string; Some(state) an open prefix.
    state: Option<usize>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap: larger key first; ties prefer finished strings, then
        // shorter, then lexicographically smaller words
        self.key
            .partial_cmp(&other.key)
            .unwrap()
            .then(other.state.is_some().cmp(&self.state.is_some()))
            .then(other.word.len().cmp(&self.word.len()))
            .then(other.word.cmp(&self.word))
    }
}

impl ReferenceLm for DpfaReference {
    fn alphabet(&self) -> &Alphabet {
        &self.pfa.alphabet
    }

    fn prob(&self, w: &[usize]) -> f64 {
        self.pfa.weight_indices(w)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<usize> {
        let mut state = self.start;
        let mut word = Vec::new();
        loop {
            let u = (rng.next_u64() as f64) / (u64::MAX as f64);
            let mut acc = self.pfa.final_weights[state];
            if u < acc {
                return word;
            }
            let mut advanced = false;
            for sym in 0..self.pfa.alphabet.len() {
                if let Some((t, p)) = self.succ(state, sym) {
                    acc += p;
                    if u < acc {
                        word.push(sym);
                        state = t;
                        advanced = true;
                        break;
                    }
                }
            }
            if !advanced {
                // numerical leftover: stop here
                return word;
            }
        }
    }

    fn most_probable(
        &self,
        count: usize,
        history: &HashSet<Vec<usize>>,
    ) -> Result<Vec<(Vec<usize>, f64)>> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return Ok(out);
        }
        let mut heap = BinaryHeap::new();
        heap.push(Node { key: 1.0, word: Vec::new(), state: Some(self.start) });
        let mut expansions = 0usize;
        while let Some(node) = heap.pop() {
            match node.state {
                None => {
                    if !history.contains(&node.word) {
                        out.push((node.word, node.key));
                        if out.len() == count {
                            return Ok(out);
                        }
                    }
                }
                Some(state) => {
                    expansions += 1;
                    if expansions > MPS_EXPANSION_CAP {
                        return Err(Error::SupportGuard {
                            depth: node.word.len(),
                            cap: MPS_EXPANSION_CAP as u64,
                        });
                    }
                    let stop = node.key * self.pfa.final_weights[state];
                    if stop > 0.0 {
                        heap.push(Node { key: stop, word: node.word.clone(), state: None });
                    }
                    for sym in 0..self.pfa.alphabet.len() {
                        if let Some((t, p)) = self.succ(state, sym) {
                            let mass = node.key * p;
                            if mass > 0.0 {
                                let mut w = node.word.clone();
                                w.push(sym);
                                heap.push(Node { key: mass, word: w, state: Some(t) });
                            }
                        }
                    }
                }
            }
        }
        Err(Error::SupportExhausted { requested: count, available: out.len() })
    }

    fn finite_support(&self) -> Option<&[(Vec<usize>, f64)]> {
        None
    }
}

#[cfg(test)]
pub(crate) fn random_dpfa(states: usize, seed: u64) -> Pfa {
    use crate::linalg::Mat;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let alphabet = Alphabet::binary();
    let k = alphabet.len();
    let mut trans: Vec<Mat> = (0..k).map(|_| Mat::zeros(states, states)).collect();
    let mut final_weights = vec![0.0; states];
    for s in 0..states {
        // positive stop mass everywhere keeps the support dense
        let mut parts: Vec<f64> = (0..=k).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = parts.iter().sum();
        for p in &mut parts {
            *p /= total;
        }
        final_weights[s] = parts[k];
        for (sym, t) in trans.iter_mut().enumerate() {
            let target = rng.gen_range(0..states);
            *t.at_mut(s, target) = parts[sym];
        }
    }
    let mut alpha = vec![0.0; states];
    alpha[0] = 1.0;
    Pfa::new(alphabet, alpha, trans, final_weights, true).unwrap()
}
