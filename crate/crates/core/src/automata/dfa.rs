use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::Alphabet;
use crate::error::{Error, Result};

/// Deterministic finite automaton with a total transition function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dfa {
    pub alphabet: Alphabet,
    pub initial: usize,
    pub accepting: Vec<bool>,
    /// `delta[state][symbol]` = successor state.
    pub delta: Vec<Vec<usize>>,
}

/// Outcome of an equivalence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivResult {
    Equivalent,
    /// A shortest distinguishing witness, lexicographically least among
    /// shortest ones.
    Counterexample(Vec<usize>),
}

impl Dfa {
    pub fn new(
        alphabet: Alphabet,
        initial: usize,
        accepting: Vec<bool>,
        delta: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = accepting.len();
        if n == 0 {
            return Err(Error::InvalidParameter("DFA needs at least one state".into()));
        }
        if initial >= n || delta.len() != n {
            return Err(Error::InvalidParameter("inconsistent DFA tables".into()));
        }
        for row in &delta {
            if row.len() != alphabet.len() || row.iter().any(|&t| t >= n) {
                return Err(Error::InvalidParameter("transition table not total".into()));
            }
        }
        Ok(Dfa { alphabet, initial, accepting, delta })
    }

    /// Single-state DFA that accepts everything or nothing.
    pub fn trivial(alphabet: Alphabet, accepting: bool) -> Self {
        let k = alphabet.len();
        Dfa { alphabet, initial: 0, accepting: vec![accepting], delta: vec![vec![0; k]] }
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    #[inline]
    pub fn step(&self, state: usize, sym: usize) -> usize {
        self.delta[state][sym]
    }

    pub fn run_indices(&self, w: &[usize]) -> bool {
        let mut q = self.initial;
        for &s in w {
            q = self.delta[q][s];
        }
        self.accepting[q]
    }

    /// Run on a rendered string; errors on symbols outside the alphabet.
    pub fn run(&self, w: &str) -> Result<bool> {
        let idx = self.alphabet.parse(w)?;
        Ok(self.run_indices(&idx))
    }

    /// Map from each reachable state to the lexicographically least shortest
    /// prefix reaching it (BFS by length, symbols in alphabet order).
    pub fn nerode_prefixes(&self) -> HashMap<usize, Vec<usize>> {
        let mut prefixes: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut queue = VecDeque::new();
        prefixes.insert(self.initial, Vec::new());
        queue.push_back(self.initial);
        while let Some(q) = queue.pop_front() {
            let base = prefixes[&q].clone();
            for sym in 0..self.alphabet.len() {
                let t = self.delta[q][sym];
                if !prefixes.contains_key(&t) {
                    let mut p = base.clone();
                    p.push(sym);
                    prefixes.insert(t, p);
                    queue.push_back(t);
                }
            }
        }
        prefixes
    }

    fn reachable_states(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        seen[self.initial] = true;
        queue.push_back(self.initial);
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for sym in 0..self.alphabet.len() {
                let t = self.delta[q][sym];
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Language-equivalent minimal DFA (reachable states, Moore partition
    /// refinement). Minimality is the contract, not the algorithm.
    pub fn minimize(&self) -> Dfa {
        let reach = self.reachable_states();
        let mut idx_of = vec![usize::MAX; self.num_states()];
        for (i, &q) in reach.iter().enumerate() {
            idx_of[q] = i;
        }
        let n = reach.len();
        let k = self.alphabet.len();

        // class[i] for reachable state i, seeded by acceptance
        let mut class: Vec<usize> = reach.iter().map(|&q| self.accepting[q] as usize).collect();
        loop {
            let mut sig_to_class: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![0usize; n];
            for i in 0..n {
                let q = reach[i];
                let sig: Vec<usize> = (0..k).map(|s| class[idx_of[self.delta[q][s]]]).collect();
                let m = sig_to_class.len();
                let c = *sig_to_class.entry((class[i], sig)).or_insert(m);
                next[i] = c;
            }
            if next == class {
                break;
            }
            class = next;
        }

        let num_classes = class.iter().max().unwrap() + 1;
        // relabel classes by BFS order from the initial class for determinism
        let mut repr = vec![usize::MAX; num_classes];
        for i in 0..n {
            if repr[class[i]] == usize::MAX {
                repr[class[i]] = reach[i];
            }
        }
        let mut relabel = vec![usize::MAX; num_classes];
        let mut order = Vec::new();
        let init_class = class[idx_of[self.initial]];
        relabel[init_class] = 0;
        order.push(init_class);
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            let q = repr[c];
            for sym in 0..k {
                let tc = class[idx_of[self.delta[q][sym]]];
                if relabel[tc] == usize::MAX {
                    relabel[tc] = order.len();
                    order.push(tc);
                }
            }
        }

        let mut accepting = vec![false; num_classes];
        let mut delta = vec![vec![0usize; k]; num_classes];
        for &c in &order {
            let q = repr[c];
            accepting[relabel[c]] = self.accepting[q];
            for sym in 0..k {
                delta[relabel[c]][sym] = relabel[class[idx_of[self.delta[q][sym]]]];
            }
        }
        Dfa { alphabet: self.alphabet.clone(), initial: 0, accepting, delta }
    }

    /// Product-automaton BFS. Returns the shortest distinguishing witness,
    /// lexicographically least among shortest, or `Equivalent`.
    pub fn equiv(&self, other: &Dfa) -> Result<EquivResult> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(
                self.alphabet.symbols().to_vec(),
                other.alphabet.symbols().to_vec(),
            ));
        }
        let k = self.alphabet.len();
        let nb = other.num_states();
        let mut seen = vec![false; self.num_states() * nb];
        let mut queue: VecDeque<(usize, usize, Vec<usize>)> = VecDeque::new();
        seen[self.initial * nb + other.initial] = true;
        queue.push_back((self.initial, other.initial, Vec::new()));
        while let Some((qa, qb, w)) = queue.pop_front() {
            if self.accepting[qa] != other.accepting[qb] {
                return Ok(EquivResult::Counterexample(w));
            }
            for sym in 0..k {
                let ta = self.delta[qa][sym];
                let tb = other.delta[qb][sym];
                if !seen[ta * nb + tb] {
                    seen[ta * nb + tb] = true;
                    let mut nw = w.clone();
                    nw.push(sym);
                    queue.push_back((ta, tb, nw));
                }
            }
        }
        Ok(EquivResult::Equivalent)
    }

    pub fn is_equivalent_to(&self, other: &Dfa) -> bool {
        matches!(self.equiv(other), Ok(EquivResult::Equivalent))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::tomita_dfa;

    #[test]
    fn run_tomita_examples() {
        let t1 = tomita_dfa(1).unwrap();
        assert!(t1.run("111").unwrap());
        assert!(!t1.run("0").unwrap());
        let t4 = tomita_dfa(4).unwrap();
        assert!(!t4.run("1000").unwrap());
        assert!(t4.run("1001").unwrap());
    }

    #[test]
    fn empty_string_is_initial_acceptance() {
        let t2 = tomita_dfa(2).unwrap();
        assert_eq!(t2.run("").unwrap(), t2.accepting[t2.initial]);
    }

    #[test]
    fn run_rejects_unknown_symbol() {
        let t1 = tomita_dfa(1).unwrap();
        assert!(t1.run("2").is_err());
    }

    #[test]
    fn minimize_is_fixed_point_on_minimal() {
        let t2 = tomita_dfa(2).unwrap();
        let m = t2.minimize();
        assert_eq!(m.num_states(), t2.num_states());
        assert!(m.is_equivalent_to(&t2));
    }

    #[test]
    fn minimize_merges_indistinguishable_states() {
        // "contains a 1" written wastefully with 4 states: 2 and 3 are both
        // accepting sinks, and 0 and 1 behave identically
        let a = Alphabet::binary();
        let d = Dfa::new(
            a,
            0,
            vec![false, false, true, true],
            vec![vec![1, 2], vec![1, 3], vec![2, 2], vec![3, 3]],
        )
        .unwrap();
        let m = d.minimize();
        assert_eq!(m.num_states(), 2);
        assert!(m.is_equivalent_to(&d));
        assert!(m.run("010").unwrap());
        assert!(!m.run("000").unwrap());
    }

    #[test]
    fn tomita7_minimal_size_is_5() {
        let t7 = tomita_dfa(7).unwrap();
        assert_eq!(t7.minimize().num_states(), 5);
    }

    #[test]
    fn equiv_reflexive_and_counterexample() {
        let t1 = tomita_dfa(1).unwrap();
        let t2 = tomita_dfa(2).unwrap();
        assert_eq!(t1.equiv(&t1).unwrap(), EquivResult::Equivalent);
        assert_eq!(t1.equiv(&t1.minimize()).unwrap(), EquivResult::Equivalent);
        // "1" is in 1* but not in (10)*
        match t1.equiv(&t2).unwrap() {
            EquivResult::Counterexample(w) => assert_eq!(t1.alphabet.render(&w), "1"),
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn nerode_prefixes_examples() {
        let a = Alphabet::binary();
        let one = Dfa::trivial(a, true);
        let p = one.nerode_prefixes();
        assert_eq!(p.len(), 1);
        assert_eq!(p[&0], Vec::<usize>::new());

        let t2 = tomita_dfa(2).unwrap();
        let p = t2.nerode_prefixes();
        assert_eq!(p[&t2.initial], Vec::<usize>::new());
        let after_one = t2.delta[t2.initial][1];
        assert_eq!(t2.alphabet.render(&p[&after_one]), "1");

        let t7 = tomita_dfa(7).unwrap();
        let p = t7.nerode_prefixes();
        assert_eq!(p.len(), 5);
        // prefixes are pairwise non-Nerode-equivalent
        let states: std::collections::HashSet<usize> = p
            .values()
            .map(|w| {
                let mut q = t7.initial;
                for &s in w {
                    q = t7.delta[q][s];
                }
                q
            })
            .collect();
        assert_eq!(states.len(), 5);
    }
}
