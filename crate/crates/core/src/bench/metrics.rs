use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::automata::Dfa;
use crate::error::{Error, Result};
use crate::extraction::StateMachineOracle;

use super::runner::ExperimentRecord;

/// Aggregation key for per-configuration success rates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupKey {
    pub grammar: u8,
    pub cell: String,
    pub dim: usize,
    pub method: String,
}

/// Percentage of runs with success = true per (grammar, cell, dim, method).
pub fn success_rate(records: &[ExperimentRecord]) -> Result<HashMap<GroupKey, f64>> {
    if records.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut totals: HashMap<GroupKey, (usize, usize)> = HashMap::new();
    for r in records {
        let key = GroupKey {
            grammar: r.grammar,
            cell: r.cell.clone(),
            dim: r.dim,
            method: r.method.clone(),
        };
        let e = totals.entry(key).or_insert((0, 0));
        e.0 += r.success as usize;
        e.1 += 1;
    }
    Ok(totals
        .into_iter()
        .map(|(k, (ok, n))| (k, 100.0 * ok as f64 / n as f64))
        .collect())
}

/// Agreement fraction between the DFA and the oracle's classification on
/// uniformly sampled strings from Σ^{≤ support_len}.
pub fn gen_accuracy(
    dfa: &Dfa,
    oracle: &dyn StateMachineOracle,
    support_len: usize,
    sample_size: usize,
    seed: u64,
) -> Result<f64> {
    if sample_size == 0 {
        return Err(Error::EmptySample);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0usize;
    for _ in 0..sample_size {
        let w = dfa.alphabet.sample_word(support_len, &mut rng);
        if dfa.run_indices(&w) == oracle.classify_word(&w)? {
            agree += 1;
        }
    }
    Ok(agree as f64 / sample_size as f64)
}
