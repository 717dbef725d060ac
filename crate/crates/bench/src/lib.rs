//! Shared fixtures for the criterion benches.

use fsmx_core::automata::{LabeledSample, SampleMeta};
use fsmx_core::{Alphabet, Dfa};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random total DFA over {0,1} with every state reachable.
pub fn random_dfa(size: usize, seed: u64) -> Dfa {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut delta = vec![vec![usize::MAX; 2]; size];
    for q in 1..size {
        // wire q from a free slot of an already-reachable state
        loop {
            let p = rng.gen_range(0..q);
            let s = rng.gen_range(0..2);
            if delta[p][s] == usize::MAX {
                delta[p][s] = q;
                break;
            }
        }
    }
    for row in &mut delta {
        for slot in row {
            if *slot == usize::MAX {
                *slot = rng.gen_range(0..size);
            }
        }
    }
    let accepting = (0..size).map(|_| rng.gen_bool(0.5)).collect();
    Dfa::new(Alphabet::binary(), 0, accepting, delta).expect("valid construction")
}

/// Every string of Σ^{≤ max_len} with its true label under `dfa`.
pub fn exhaustive_sample(dfa: &Dfa, max_len: usize) -> LabeledSample {
    let mut items = Vec::new();
    for len in 0..=max_len {
        for w in dfa.alphabet.words_of_len(len) {
            items.push((dfa.alphabet.render(&w), dfa.run_indices(&w)));
        }
    }
    LabeledSample::new(dfa.alphabet.clone(), items, SampleMeta::default())
}
