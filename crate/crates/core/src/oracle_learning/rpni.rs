use std::collections::HashMap;

use crate::automata::{Alphabet, Dfa, LabeledSample};
use crate::error::{Error, Result};

/// Prefix-tree acceptor with optional labels, folded destructively during
/// merges.
#[derive(Clone)]
struct Pta {
    label: Vec<Option<bool>>,
    /// children[state][symbol]
    children: Vec<Vec<Option<usize>>>,
}

impl Pta {
    fn build(alphabet: &Alphabet, items: &[(Vec<usize>, bool)]) -> Result<Pta> {
        let k = alphabet.len();
        let mut pta = Pta { label: vec![None], children: vec![vec![None; k]] };
        for (w, l) in items {
            let mut q = 0usize;
            for &sym in w {
                q = match pta.children[q][sym] {
                    Some(t) => t,
                    None => {
                        let t = pta.label.len();
                        pta.label.push(None);
                        pta.children.push(vec![None; k]);
                        pta.children[q][sym] = Some(t);
                        t
                    }
                };
            }
            match pta.label[q] {
                None => pta.label[q] = Some(*l),
                Some(prev) if prev != *l => {
                    return Err(Error::ContradictoryLabels(alphabet.render(w)))
                }
                _ => {}
            }
        }
        Ok(pta)
    }
}

/// Working copy used by a single merge attempt: states map through a union
/// find, labels and children are patched as subtrees fold together.
struct Fold {
    parent: Vec<usize>,
    label: Vec<Option<bool>>,
    children: Vec<Vec<Option<usize>>>,
}

impl Fold {
    fn find(&mut self, mut q: usize) -> usize {
        while self.parent[q] != q {
            self.parent[q] = self.parent[self.parent[q]];
            q = self.parent[q];
        }
        q
    }

    /// Merge the classes of `a` and `b`; `a` survives. Fails on a label
    /// clash anywhere in the folded subtrees.
    fn merge(&mut self, a: usize, b: usize) -> bool {
        let a = self.find(a);
        let b = self.find(b);
        if a == b {
            return true;
        }
        match (self.label[a], self.label[b]) {
            (Some(x), Some(y)) if x != y => return false,
            (None, Some(y)) => self.label[a] = Some(y),
            _ => {}
        }
        self.parent[b] = a;
        for sym in 0..self.children[a].len() {
            match (self.children[a][sym], self.children[b][sym]) {
                (Some(ca), Some(cb)) => {
                    if !self.merge(ca, cb) {
                        return false;
                    }
                }
                (None, Some(cb)) => self.children[a][sym] = Some(cb),
                _ => {}
            }
        }
        true
    }
}

/// Classic red-blue RPNI. The output is total (missing transitions fall
/// into a rejecting sink), minimized, and consistent with every input item.
pub fn rpni(sample: &LabeledSample) -> Result<Dfa> {
    let alphabet = &sample.alphabet;
    let k = alphabet.len();
    if sample.is_empty() {
        return Ok(Dfa::trivial(alphabet.clone(), false));
    }
    let mut items = Vec::with_capacity(sample.len());
    for (w, l) in &sample.items {
        items.push((alphabet.parse(w)?, *l));
    }
    let pta = Pta::build(alphabet, &items)?;

    let mut fold = Fold {
        parent: (0..pta.label.len()).collect(),
        label: pta.label.clone(),
        children: pta.children.clone(),
    };
    let mut red: Vec<usize> = vec![0];
    loop {
        // first blue state in BFS order off the red core
        let mut blue = None;
        'outer: for &r in &red {
            let rr = fold.find(r);
            for sym in 0..k {
                if let Some(c) = fold.children[rr][sym] {
                    let c = fold.find(c);
                    if !red.contains(&c) {
                        blue = Some(c);
                        break 'outer;
                    }
                }
            }
        }
        let Some(b) = blue else { break };
        let mut merged = false;
        for &r in &red {
            // trial merge on a scratch copy; commit only on success
            let mut trial = Fold {
                parent: fold.parent.clone(),
                label: fold.label.clone(),
                children: fold.children.clone(),
            };
            if trial.merge(r, b) {
                fold = trial;
                merged = true;
                break;
            }
        }
        if !merged {
            red.push(b);
        }
    }

    // project the folded tree onto the red states, completing with a sink
    let mut index: HashMap<usize, usize> = HashMap::new();
    for (i, &r) in red.iter().enumerate() {
        index.insert(fold.find(r), i);
    }
    let n = red.len();
    let sink = n; // only materialized when some transition is missing
    let mut accepting: Vec<bool> = Vec::with_capacity(n + 1);
    let mut delta: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
    let mut used_sink = false;
    for &r in &red {
        let rr = fold.find(r);
        accepting.push(fold.label[rr] == Some(true));
        let mut row = Vec::with_capacity(k);
        for sym in 0..k {
            match fold.children[rr][sym] {
                Some(c) => {
                    let c = fold.find(c);
                    row.push(*index.get(&c).expect("children of red states are red"));
                }
                None => {
                    used_sink = true;
                    row.push(sink);
                }
            }
        }
        delta.push(row);
    }
    if used_sink {
        accepting.push(false);
        delta.push(vec![sink; k]);
    }
    let dfa = Dfa::new(alphabet.clone(), 0, accepting, delta)?;
    Ok(dfa.minimize())
}

/// Characteristic-style sample of a DFA: every string of Σ^{≤ max_len} with
/// its true label. Test helper, also used by SRM fixtures.
#[cfg(test)]
pub(crate) fn exhaustive_sample(dfa: &Dfa, max_len: usize) -> LabeledSample {
    let mut items = Vec::new();
    for len in 0..=max_len {
        for w in dfa.alphabet.words_of_len(len) {
            items.push((dfa.alphabet.render(&w), dfa.run_indices(&w)));
        }
    }
    LabeledSample::new(dfa.alphabet.clone(), items, Default::default())
}
