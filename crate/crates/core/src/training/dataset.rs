use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Dfa, LabeledSample, SampleMeta};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Uniform,
    UniformUpsampled,
    PrefixQuota,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::UniformUpsampled => "uniform-upsampled",
            Strategy::PrefixQuota => "prefix-quota",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub strategy: Strategy,
    pub max_len: usize,
    pub size: usize,
    /// Minimum minority-class share after up-sampling.
    pub ratio: f64,
    /// Prefixes per reachable state (prefix-quota only).
    pub quota: usize,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn uniform(max_len: usize, size: usize, seed: u64) -> Self {
        DatasetSpec { strategy: Strategy::Uniform, max_len, size, ratio: 0.3, quota: 3, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::InvalidParameter("dataset size must be ≥ 1".into()));
        }
        if self.max_len == 0 {
            return Err(Error::InvalidParameter("max length must be ≥ 1".into()));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::InvalidParameter("ratio must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Breadth-first prefixes, `quota` per reachable DFA state.
fn bfs_prefixes(dfa: &Dfa, quota: usize) -> Vec<Vec<usize>> {
    let mut per_state: HashMap<usize, usize> = HashMap::new();
    let mut prefixes = Vec::new();
    let reachable = dfa.nerode_prefixes().len();
    let mut frontier: Vec<(usize, Vec<usize>)> = vec![(dfa.initial, vec![])];
    let depth_cap = 2 * dfa.num_states() + quota;
    for _ in 0..=depth_cap {
        for (q, w) in &frontier {
            let seen = per_state.entry(*q).or_insert(0);
            if *seen < quota {
                *seen += 1;
                prefixes.push(w.clone());
            }
        }
        if prefixes.len() == reachable * quota {
            break;
        }
        let mut next = Vec::new();
        for (q, w) in frontier {
            for sym in 0..dfa.alphabet.len() {
                let mut w2 = w.clone();
                w2.push(sym);
                next.push((dfa.step(q, sym), w2));
            }
        }
        frontier = next;
    }
    prefixes
}

/// Labeled sample per the chosen strategy. Labels always come from the
/// labeler, whatever strategy produced the strings.
pub fn gen_dataset<F: Fn(&[usize]) -> bool>(
    alphabet: &Alphabet,
    labeler: F,
    spec: &DatasetSpec,
    dfa: Option<&Dfa>,
) -> Result<LabeledSample> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut items: Vec<(String, bool)> = Vec::new();
    match spec.strategy {
        Strategy::Uniform | Strategy::UniformUpsampled => {
            for _ in 0..spec.size {
                let w = alphabet.sample_word(spec.max_len, &mut rng);
                items.push((alphabet.render(&w), labeler(&w)));
            }
            if spec.strategy == Strategy::UniformUpsampled {
                upsample_minority(&mut items, spec.ratio, &mut rng)?;
            }
        }
        Strategy::PrefixQuota => {
            let dfa = dfa.ok_or_else(|| {
                Error::InvalidParameter("prefix-quota sampling needs a target automaton".into())
            })?;
            let prefixes = bfs_prefixes(dfa, spec.quota);
            let per_prefix = spec.size.div_ceil(prefixes.len());
            let suffix_cap = 2 * dfa.num_states();
            for prefix in &prefixes {
                for i in 0..per_prefix {
                    let want = i % 2 == 0; // alternate target labels for balance
                    let mut chosen = None;
                    for _ in 0..200 {
                        let len = rng.gen_range(0..=suffix_cap);
                        let mut w = prefix.clone();
                        for _ in 0..len {
                            w.push(rng.gen_range(0..alphabet.len()));
                        }
                        if labeler(&w) == want {
                            chosen = Some(w);
                            break;
                        }
                        if chosen.is_none() {
                            chosen = Some(w); // fallback when a label is unreachable
                        }
                    }
                    let w = chosen.unwrap();
                    items.push((alphabet.render(&w), labeler(&w)));
                }
            }
            items.truncate(spec.size.max(prefixes.len()));
        }
    }
    Ok(LabeledSample::new(
        alphabet.clone(),
        items,
        SampleMeta {
            strategy: spec.strategy.name().into(),
            support_bound: spec.max_len,
            seed: spec.seed,
        },
    ))
}

fn upsample_minority<R: Rng>(
    items: &mut Vec<(String, bool)>,
    ratio: f64,
    rng: &mut R,
) -> Result<()> {
    let positives = items.iter().filter(|(_, l)| *l).count();
    let minority_label = positives * 2 <= items.len();
    let pool: Vec<(String, bool)> = items.iter().filter(|(_, l)| *l == minority_label).cloned().collect();
    if pool.is_empty() {
        return Err(Error::InvalidParameter(
            "single-class sample; the requested ratio is unsatisfiable".into(),
        ));
    }
    let mut minority = pool.len();
    while (minority as f64) < ratio * items.len() as f64 {
        items.push(pool[rng.gen_range(0..pool.len())].clone());
        minority += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::tomita_dfa;

    fn labeler_for(dfa: &Dfa) -> impl Fn(&[usize]) -> bool + '_ {
        move |w: &[usize]| dfa.run_indices(w)
    }

    #[test]
    fn uniform_respects_size_and_support() {
        let dfa = tomita_dfa(1).unwrap();
        let spec = DatasetSpec::uniform(22, 800, 7);
        let s = gen_dataset(&dfa.alphabet, labeler_for(&dfa), &spec, None).unwrap();
        assert_eq!(s.len(), 800);
        assert!(s.items.iter().all(|(w, _)| w.len() <= 22));
        // labels re-checked against the source of truth
        for (w, l) in &s.items {
            assert_eq!(*l, dfa.run(w).unwrap());
        }
    }

    #[test]
    fn size_one_is_allowed() {
        let dfa = tomita_dfa(2).unwrap();
        let spec = DatasetSpec::uniform(5, 1, 1);
        let s = gen_dataset(&dfa.alphabet, labeler_for(&dfa), &spec, None).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn reproducible_per_seed() {
        let dfa = tomita_dfa(4).unwrap();
        let spec = DatasetSpec::uniform(10, 200, 99);
        let a = gen_dataset(&dfa.alphabet, labeler_for(&dfa), &spec, None).unwrap();
        let b = gen_dataset(&dfa.alphabet, labeler_for(&dfa), &spec, None).unwrap();
        assert_eq!(a.items, b.items);
    }

    #[test]
    fn upsampling_reaches_the_ratio() {
        let dfa = tomita_dfa(1).unwrap(); // 1* is a thin language
        let spec = DatasetSpec {
            strategy: Strategy::UniformUpsampled,
            max_len: 6,
            size: 400,
            ratio: 0.3,
            quota: 3,
            seed: 11,
        };
        let s = gen_dataset(&dfa.alphabet, labeler_for(&dfa), &spec, None).unwrap();
        let pos = s.items.iter().filter(|(_, l)| *l).count();
        assert!(pos as f64 >= 0.3 * s.len() as f64);
        for (w, l) in &s.items {
            assert_eq!(*l, dfa.run(w).unwrap());
        }
    }

    #[test]
    fn prefix_quota_covers_every_state() {
        let dfa = tomita_dfa(7).unwrap();
        let spec = DatasetSpec {
            strategy: Strategy::PrefixQuota,
            max_len: 22,
            size: 600,
            ratio: 0.3,
            quota: 3,
            seed: 13,
        };
        let prefixes = bfs_prefixes(&dfa, 3);
        assert_eq!(prefixes.len(), 15); // 5 states × quota 3
        // prefixes reach pairwise-distinct states in groups of the quota
        let mut states: Vec<usize> = prefixes
            .iter()
            .map(|p| {
                let mut q = dfa.initial;
                for &sym in p {
                    q = dfa.step(q, sym);
                }
                q
            })
            .collect();
        states.sort_unstable();
        states.dedup();
        assert_eq!(states.len(), 5);

        let s = gen_dataset(&dfa.alphabet, labeler_for(&dfa), &spec, Some(&dfa)).unwrap();
        assert!(s.len() >= 15);
        // per-prefix balance where both labels are reachable
        let per_prefix = 600usize.div_ceil(15);
        for (i, prefix) in prefixes.iter().enumerate() {
            let rendered = dfa.alphabet.render(prefix);
            let group: Vec<&(String, bool)> = s.items
                [i * per_prefix..((i + 1) * per_prefix).min(s.len())]
                .iter()
                .collect();
            let pos = group.iter().filter(|(_, l)| *l).count();
            let frac = pos as f64 / group.len() as f64;
            let both_reachable = frac > 0.0 && frac < 1.0;
            if both_reachable {
                assert!((0.4..=0.6).contains(&frac), "prefix {rendered:?}: {frac}");
            }
        }
    }

    #[test]
    fn prefix_quota_needs_the_dfa() {
        let dfa = tomita_dfa(3).unwrap();
        let spec = DatasetSpec {
            strategy: Strategy::PrefixQuota,
            max_len: 10,
            size: 100,
            ratio: 0.5,
            quota: 2,
            seed: 1,
        };
        assert!(gen_dataset(&dfa.alphabet, labeler_for(&dfa), &spec, None).is_err());
    }

    #[test]
    fn invalid_specs_rejected() {
        let dfa = tomita_dfa(1).unwrap();
        for spec in [
            DatasetSpec { size: 0, ..DatasetSpec::uniform(5, 10, 0) },
            DatasetSpec { max_len: 0, ..DatasetSpec::uniform(5, 10, 0) },
            DatasetSpec { ratio: 1.0, ..DatasetSpec::uniform(5, 10, 0) },
        ] {
            assert!(gen_dataset(&dfa.alphabet, labeler_for(&dfa), &spec, None).is_err());
        }
    }
}
