use std::collections::HashMap;
use std::time::Instant;

use crate::automata::Dfa;
use crate::error::{Error, Result};
use crate::linalg::l2_dist;

use super::kmeans::kmeans;
use super::oracle::StateMachineOracle;
use super::{Extraction, ExtractionConfig, Method};

pub(crate) struct ClusterBuild {
    pub dfa: Dfa,
    pub membership_queries: usize,
    pub conflicts_resolved: usize,
    /// (cluster, symbol) -> target -> observation count.
    #[cfg_attr(not(test), allow(dead_code))]
    pub votes: HashMap<(usize, usize), HashMap<usize, usize>>,
}

fn nearest(centroids: &[Vec<f64>], p: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = l2_dist(c, p);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

pub(crate) fn build(
    oracle: &dyn StateMachineOracle,
    cfg: &ExtractionConfig,
) -> Result<ClusterBuild> {
    if cfg.budget < cfg.clusters {
        return Err(Error::InvalidParameter(format!(
            "budget {} below cluster count {}",
            cfg.budget, cfg.clusters
        )));
    }
    let num_syms = oracle.alphabet().len();
    let mut membership_queries = 0usize;

    // states reached by the first `budget` prefixes in BFS order
    let mut vectors: Vec<Vec<f64>> = vec![oracle.initial()];
    let mut frontier = 0usize;
    let mut frontier_depth = vec![0usize];
    while frontier < vectors.len() && vectors.len() < cfg.budget {
        let depth = frontier_depth[frontier];
        if depth >= cfg.max_depth {
            break;
        }
        for sym in 0..num_syms {
            if vectors.len() == cfg.budget {
                break;
            }
            vectors.push(oracle.step(&vectors[frontier], sym)?);
            frontier_depth.push(depth + 1);
        }
        frontier += 1;
    }

    // cluster in the box embedding when one exists (keeps the unbounded
    // LSTM memory coordinates from dominating the metric); raw otherwise
    let features: Vec<Vec<f64>> = match vectors.iter().map(|v| oracle.embed(v)).collect() {
        Ok(f) => f,
        Err(_) => vectors.clone(),
    };
    let km = kmeans(&features, cfg.clusters, cfg.seed)?;

    // cluster labels by majority vote of member classifications; tie rejects
    let mut pos = vec![0usize; cfg.clusters];
    let mut neg = vec![0usize; cfg.clusters];
    for (v, &a) in vectors.iter().zip(&km.assignment) {
        membership_queries += 1;
        if oracle.classify(v)? {
            pos[a] += 1;
        } else {
            neg[a] += 1;
        }
    }
    let accepting: Vec<bool> = (0..cfg.clusters).map(|c| pos[c] > neg[c]).collect();

    // transition votes: step every collected vector by every symbol
    let mut votes: HashMap<(usize, usize), HashMap<usize, usize>> = HashMap::new();
    for (v, &a) in vectors.iter().zip(&km.assignment) {
        for sym in 0..num_syms {
            let succ = oracle.step(v, sym)?;
            let feat = oracle.embed(&succ).unwrap_or(succ);
            let target = nearest(&km.centroids, &feat);
            *votes.entry((a, sym)).or_default().entry(target).or_insert(0) += 1;
        }
    }

    let mut conflicts_resolved = 0usize;
    let mut delta = vec![vec![0usize; num_syms]; cfg.clusters];
    for (c, row) in delta.iter_mut().enumerate() {
        for (sym, slot) in row.iter_mut().enumerate() {
            match votes.get(&(c, sym)) {
                Some(tally) => {
                    if tally.len() > 1 {
                        conflicts_resolved += 1;
                    }
                    // most frequent target; ties break to the smallest id
                    *slot = tally
                        .iter()
                        .map(|(&t, &n)| (n, std::cmp::Reverse(t)))
                        .max()
                        .map(|(_, std::cmp::Reverse(t))| t)
                        .unwrap();
                }
                // cluster with no sampled member (possible only for
                // degenerate duplicate centroids): self-loop
                None => *slot = c,
            }
        }
    }

    let initial = km.assignment[0];
    let dfa = Dfa::new(oracle.alphabet().clone(), initial, accepting, delta)?;
    Ok(ClusterBuild { dfa, membership_queries, conflicts_resolved, votes })
}

/// Clusters the state vectors visited by BFS prefixes with k-means, labels
/// each cluster by majority classification and keeps the most frequent
/// transition per (cluster, symbol).
pub fn extract_clustering(
    oracle: &dyn StateMachineOracle,
    cfg: &ExtractionConfig,
) -> Result<Extraction> {
    let start = Instant::now();
    let b = build(oracle, cfg)?;
    Ok(Extraction {
        dfa: b.dfa.minimize(),
        method: Method::Clustering,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        converged: true,
        membership_queries: b.membership_queries,
        equivalence_queries: 0,
        conflicts_resolved: b.conflicts_resolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::tomita_dfa;
    use crate::extraction::DfaOracle;

    #[test]
    fn recovers_tomita_4_with_matching_k() {
        let target = tomita_dfa(4).unwrap();
        let oracle = DfaOracle::new(&target);
        let cfg = ExtractionConfig { clusters: 4, budget: 500, ..ExtractionConfig::default() };
        let x = extract_clustering(&oracle, &cfg).unwrap();
        assert!(x.dfa.is_equivalent_to(&target));
        // one-hot corners cluster perfectly, so no transition conflicts
        assert_eq!(x.conflicts_resolved, 0);
    }

    #[test]
    fn k_one_gives_a_single_state() {
        let target = tomita_dfa(5).unwrap();
        let oracle = DfaOracle::new(&target);
        let cfg = ExtractionConfig { clusters: 1, budget: 100, ..ExtractionConfig::default() };
        let x = extract_clustering(&oracle, &cfg).unwrap();
        assert_eq!(x.dfa.num_states(), 1);
    }

    #[test]
    fn budget_below_k_rejected() {
        let target = tomita_dfa(1).unwrap();
        let oracle = DfaOracle::new(&target);
        let cfg = ExtractionConfig { clusters: 10, budget: 5, ..ExtractionConfig::default() };
        assert!(extract_clustering(&oracle, &cfg).is_err());
    }

    #[test]
    fn vote_totals_cover_all_observed_transitions() {
        let target = tomita_dfa(6).unwrap();
        let oracle = DfaOracle::new(&target);
        let cfg = ExtractionConfig { clusters: 3, budget: 200, ..ExtractionConfig::default() };
        let b = build(&oracle, &cfg).unwrap();
        let total: usize = b
            .votes
            .values()
            .map(|tally| tally.values().sum::<usize>())
            .sum();
        // every collected vector votes once per symbol
        assert_eq!(total, 200 * 2);
    }

    #[test]
    fn output_is_minimal() {
        let target = tomita_dfa(7).unwrap();
        let oracle = DfaOracle::new(&target);
        let cfg = ExtractionConfig { clusters: 5, budget: 600, ..ExtractionConfig::default() };
        let x = extract_clustering(&oracle, &cfg).unwrap();
        assert_eq!(x.dfa.num_states(), x.dfa.minimize().num_states());
        assert!(x.dfa.is_equivalent_to(&target));
    }
}
