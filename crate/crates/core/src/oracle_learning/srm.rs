use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Dfa, LabeledSample};
use crate::error::{Error, Result};

use super::rpni::rpni;

/// Size beyond which the |A|^{|A||Σ|}·2^{|A|} table enumeration is skipped.
const ENUM_CANDIDATE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LearnerConfig {
    /// Universal constant of the penalty term.
    pub c: f64,
    pub delta: f64,
    pub epsilon: f64,
    /// Largest DFA size considered.
    pub size_cap: usize,
    pub seed: u64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig { c: 1.0, delta: 0.05, epsilon: 0.1, size_cap: 4, seed: 0 }
    }
}

impl LearnerConfig {
    fn validate(&self) -> Result<()> {
        if self.c <= 0.0 {
            return Err(Error::InvalidParameter("C must be positive".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) || !(self.epsilon > 0.0 && self.epsilon < 1.0)
        {
            return Err(Error::InvalidParameter("δ and ε must lie in (0, 1)".into()));
        }
        if self.size_cap == 0 {
            return Err(Error::InvalidParameter("size cap must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SrmResult {
    pub dfa: Dfa,
    /// Empirical misclassification ratio of the returned DFA.
    pub empirical_risk: f64,
    /// Penalty value of the returned DFA.
    pub penalty: f64,
    /// Model-selection trace: (size, best empirical risk seen at that size).
    pub trace: Vec<(usize, f64)>,
}

impl SrmResult {
    pub fn objective(&self) -> f64 {
        self.empirical_risk + self.penalty
    }
}

fn penalty(states: usize, sigma: usize, m: usize, c: f64) -> f64 {
    let n = states as f64;
    c * ((sigma as f64) * n * (n.ln() + 1.0) / m as f64).sqrt()
}

/// Empirical risk plus the size penalty C·√(|Σ||A|(ln|A|+1)/m).
pub fn srm_objective(dfa: &Dfa, sample: &LabeledSample, c: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut wrong = 0usize;
    for (w, l) in &sample.items {
        wrong += (dfa.run(w)? != *l) as usize;
    }
    let m = sample.len();
    Ok(wrong as f64 / m as f64 + penalty(dfa.num_states(), dfa.alphabet.len(), m, c))
}

/// Sample deduplicated to (word, label, multiplicity); errors on a string
/// carrying both labels.
fn dedupe(sample: &LabeledSample) -> Result<Vec<(Vec<usize>, bool, usize)>> {
    let mut counts: HashMap<Vec<usize>, (bool, usize)> = HashMap::new();
    let mut order: Vec<Vec<usize>> = Vec::new();
    for (w, l) in &sample.items {
        let idx = sample.alphabet.parse(w)?;
        match counts.get_mut(&idx) {
            None => {
                counts.insert(idx.clone(), (*l, 1));
                order.push(idx);
            }
            Some((prev, n)) => {
                if *prev != *l {
                    return Err(Error::ContradictoryLabels(w.clone()));
                }
                *n += 1;
            }
        }
    }
    Ok(order
        .into_iter()
        .map(|w| {
            let (l, n) = counts[&w];
            (w, l, n)
        })
        .collect())
}

fn risk_on(dfa: &Dfa, deduped: &[(Vec<usize>, bool, usize)], m: usize) -> f64 {
    let wrong: usize = deduped
        .iter()
        .filter(|(w, l, _)| dfa.run_indices(w) != *l)
        .map(|(_, _, n)| n)
        .sum();
    wrong as f64 / m as f64
}

fn candidate_count(states: usize, sigma: usize) -> Option<u64> {
    let mut total: u64 = 1;
    for _ in 0..states * sigma {
        total = total.checked_mul(states as u64)?;
        if total > ENUM_CANDIDATE_CAP {
            return None;
        }
    }
    total = total.checked_mul(1u64.checked_shl(states as u32)?)?;
    (total <= ENUM_CANDIDATE_CAP).then_some(total)
}

/// Visit every complete DFA with `states` states over `alphabet`, initial
/// state 0 (initial-state choice is a relabeling, so 0 loses no language).
pub(crate) fn enumerate_dfas(
    alphabet: &Alphabet,
    states: usize,
    mut visit: impl FnMut(&Dfa),
) {
    let k = alphabet.len();
    let cells = states * k;
    let mut table = vec![0usize; cells];
    loop {
        let delta: Vec<Vec<usize>> =
            (0..states).map(|q| table[q * k..(q + 1) * k].to_vec()).collect();
        for acc_bits in 0..(1u64 << states) {
            let accepting: Vec<bool> =
                (0..states).map(|q| acc_bits >> q & 1 == 1).collect();
            let dfa = Dfa {
                alphabet: alphabet.clone(),
                initial: 0,
                accepting,
                delta: delta.clone(),
            };
            visit(&dfa);
        }
        // odometer over the transition table
        let mut i = cells;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            table[i] += 1;
            if table[i] < states {
                break;
            }
            table[i] = 0;
        }
    }
}

/// Structural risk minimization over DFA size 1..=cap: exhaustive table
/// enumeration while the candidate count stays within bounds, the RPNI
/// automaton as the sole candidate beyond. Deterministic.
pub fn learn_srm(sample: &LabeledSample, cfg: &LearnerConfig) -> Result<SrmResult> {
    cfg.validate()?;
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let m = sample.len();
    let sigma = sample.alphabet.len();
    let deduped = dedupe(sample)?;

    let mut best: Option<(f64, Dfa, f64, f64)> = None; // objective, dfa, risk, penalty
    let mut trace: Vec<(usize, f64)> = Vec::new();
    let consider = |dfa: &Dfa, best: &mut Option<(f64, Dfa, f64, f64)>| {
        let risk = risk_on(dfa, &deduped, m);
        let pen = penalty(dfa.num_states(), sigma, m, cfg.c);
        let obj = risk + pen;
        // strict improvement keeps the smallest, earliest optimum
        if best.as_ref().map(|(b, ..)| obj < *b).unwrap_or(true) {
            *best = Some((obj, dfa.clone(), risk, pen));
        }
        risk
    };

    let mut exhausted_all = true;
    for size in 1..=cfg.size_cap {
        if candidate_count(size, sigma).is_some() {
            let mut size_best = f64::INFINITY;
            enumerate_dfas(&sample.alphabet, size, |dfa| {
                let risk = consider(dfa, &mut best);
                size_best = size_best.min(risk);
            });
            trace.push((size, size_best));
        } else {
            exhausted_all = false;
        }
    }
    if !exhausted_all {
        let folded = rpni(sample)?;
        if folded.num_states() <= cfg.size_cap {
            let risk = consider(&folded, &mut best);
            trace.push((folded.num_states(), risk));
        }
    }

    let (_, dfa, empirical_risk, pen) =
        best.ok_or_else(|| Error::InvalidParameter("no candidate DFA within the cap".into()))?;
    Ok(SrmResult { dfa, empirical_risk, penalty: pen, trace })
}
