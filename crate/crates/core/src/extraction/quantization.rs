use std::collections::HashMap;
use std::time::Instant;

use crate::automata::Dfa;
use crate::error::{Error, Result};

use super::oracle::StateMachineOracle;
use super::{Extraction, ExtractionConfig, Method};

fn cell_key(embedded: &[f64], q: usize) -> Vec<u32> {
    let qf = q as f64;
    embedded
        .iter()
        .map(|&x| (x.clamp(0.0, 1.0) * qf).floor().min(qf - 1.0) as u32)
        .collect()
}

/// Quantizes the embedded state space into q^d equal boxes and promotes
/// boxes reached by a breadth-first traversal to DFA states. Each box is
/// represented by the first state vector that landed in it; transitions
/// and the acceptance label come from that representative.
pub fn extract_quantization(
    oracle: &dyn StateMachineOracle,
    cfg: &ExtractionConfig,
) -> Result<Extraction> {
    if cfg.resolution == 0 {
        return Err(Error::InvalidParameter("resolution must be positive".into()));
    }
    let start = Instant::now();
    let num_syms = oracle.alphabet().len();
    let mut membership_queries = 0usize;

    let mut cells: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut reps: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<bool> = Vec::new();
    let mut depths: Vec<usize> = Vec::new();
    let mut delta: Vec<Vec<usize>> = Vec::new();

    let init = oracle.initial();
    let intern = |raw: Vec<f64>,
                      depth: usize,
                      cells: &mut HashMap<Vec<u32>, usize>,
                      reps: &mut Vec<Vec<f64>>,
                      labels: &mut Vec<bool>,
                      depths: &mut Vec<usize>,
                      delta: &mut Vec<Vec<usize>>,
                      queries: &mut usize|
     -> Result<usize> {
        let key = cell_key(&oracle.embed(&raw)?, cfg.resolution);
        if let Some(&id) = cells.get(&key) {
            return Ok(id);
        }
        if reps.len() >= cfg.cell_cap {
            return Err(Error::StateExplosion { cap: cfg.cell_cap, partial: reps.len() });
        }
        let id = reps.len();
        *queries += 1;
        labels.push(oracle.classify(&raw)?);
        reps.push(raw);
        depths.push(depth);
        delta.push(vec![usize::MAX; num_syms]);
        cells.insert(key, id);
        Ok(id)
    };

    let root = intern(
        init,
        0,
        &mut cells,
        &mut reps,
        &mut labels,
        &mut depths,
        &mut delta,
        &mut membership_queries,
    )?;
    debug_assert_eq!(root, 0);

    let mut converged = true;
    let mut next = 0usize;
    while next < reps.len() {
        let state = next;
        next += 1;
        let depth = depths[state];
        for sym in 0..num_syms {
            let succ_raw = oracle.step(&reps[state], sym)?;
            let key = cell_key(&oracle.embed(&succ_raw)?, cfg.resolution);
            let target = match cells.get(&key) {
                Some(&id) => id,
                None if depth < cfg.max_depth => intern(
                    succ_raw,
                    depth + 1,
                    &mut cells,
                    &mut reps,
                    &mut labels,
                    &mut depths,
                    &mut delta,
                    &mut membership_queries,
                )?,
                None => {
                    // frontier cut off by the depth bound; keep the DFA total
                    converged = false;
                    state
                }
            };
            delta[state][sym] = target;
        }
    }

    let dfa = Dfa::new(oracle.alphabet().clone(), 0, labels, delta)?.minimize();
    Ok(Extraction {
        dfa,
        method: Method::Quantization,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        converged,
        membership_queries,
        equivalence_queries: 0,
        conflicts_resolved: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::tomita_dfa;
    use crate::extraction::DfaOracle;

    #[test]
    fn recovers_tomita_2_from_one_hot_embedding() {
        let target = tomita_dfa(2).unwrap();
        let oracle = DfaOracle::new(&target);
        let x = extract_quantization(&oracle, &ExtractionConfig::default()).unwrap();
        assert!(x.converged);
        assert!(x.dfa.is_equivalent_to(&target));
    }

    #[test]
    fn resolution_one_collapses_to_a_point() {
        let target = tomita_dfa(1).unwrap();
        let oracle = DfaOracle::new(&target);
        let cfg = ExtractionConfig { resolution: 1, ..ExtractionConfig::default() };
        let x = extract_quantization(&oracle, &cfg).unwrap();
        assert_eq!(x.dfa.num_states(), 1);
        // label comes from the initial state, which accepts for 1*
        assert!(x.dfa.accepting[x.dfa.initial]);
    }

    #[test]
    fn cap_aborts_with_partial_size() {
        let target = tomita_dfa(3).unwrap();
        let oracle = DfaOracle::new(&target);
        let cfg = ExtractionConfig { cell_cap: 2, ..ExtractionConfig::default() };
        match extract_quantization(&oracle, &cfg) {
            Err(Error::StateExplosion { cap: 2, partial: 2 }) => {}
            other => panic!("expected explosion, got {other:?}"),
        }
    }

    #[test]
    fn cell_count_bounded_by_box_count() {
        let target = tomita_dfa(4).unwrap();
        let oracle = DfaOracle::new(&target);
        let x = extract_quantization(&oracle, &ExtractionConfig::default()).unwrap();
        // one-hot states of a 4-state DFA occupy at most 4 distinct boxes
        assert!(x.dfa.num_states() <= 4);
        assert!(x.dfa.is_equivalent_to(&target));
    }

    #[test]
    fn output_is_minimal() {
        for id in 1..=7u8 {
            let target = tomita_dfa(id).unwrap();
            let oracle = DfaOracle::new(&target);
            let x = extract_quantization(&oracle, &ExtractionConfig::default()).unwrap();
            assert!(x.dfa.is_equivalent_to(&x.dfa.minimize()));
            assert_eq!(x.dfa.num_states(), x.dfa.minimize().num_states());
        }
    }
}
