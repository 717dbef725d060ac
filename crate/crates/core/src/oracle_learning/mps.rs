use std::collections::HashSet;

use crate::automata::{Dfa, LabeledSample};
use crate::error::Result;

use super::reference::ReferenceLm;
use super::rpni::rpni;

/// Up to `count` most probable strings of the reference model, excluding
/// `history`, with exact probabilities in nonincreasing order.
pub fn most_probable_strings(
    lm: &dyn ReferenceLm,
    count: usize,
    history: &HashSet<Vec<usize>>,
) -> Result<Vec<(Vec<usize>, f64)>> {
    lm.most_probable(count, history)
}

#[derive(Debug, Clone)]
pub struct MpsResult {
    pub dfa: Dfa,
    /// Labeled top-probability strings fed to the state-merging step.
    pub sample: LabeledSample,
    /// Total reference mass of the queried strings. The true risk of the
    /// returned DFA is at most 1 − covered_mass.
    pub covered_mass: f64,
}

/// Query the `n_queries` most probable strings, label each through the
/// membership oracle and return a consistent DFA built by RPNI.
pub fn learn_mps(
    lm: &dyn ReferenceLm,
    membership: &dyn Fn(&[usize]) -> bool,
    n_queries: usize,
) -> Result<MpsResult> {
    let top = most_probable_strings(lm, n_queries, &HashSet::new())?;
    let alphabet = lm.alphabet().clone();
    let mut covered_mass = 0.0;
    let mut items = Vec::with_capacity(top.len());
    for (w, p) in &top {
        covered_mass += p;
        items.push((alphabet.render(w), membership(w)));
    }
    let sample = LabeledSample::new(alphabet, items, Default::default());
    let dfa = rpni(&sample)?;
    Ok(MpsResult { dfa, sample, covered_mass })
}
