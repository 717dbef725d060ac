use fsmx_bench::{exhaustive_sample, random_dfa};

#[test]
fn random_dfa_is_deterministic_and_fully_reachable() {
    for seed in 0..20 {
        let a = random_dfa(8, seed);
        let b = random_dfa(8, seed);
        assert_eq!(a.delta, b.delta);
        assert_eq!(a.accepting, b.accepting);
        // the chain construction keeps every state reachable
        assert_eq!(a.nerode_prefixes().len(), 8);
        let mut seen = vec![false; 8];
        let mut stack = vec![a.initial];
        seen[a.initial] = true;
        while let Some(q) = stack.pop() {
            for &t in &a.delta[q] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        assert!(seen.iter().all(|&r| r), "seed {seed}");
    }
}

#[test]
fn exhaustive_sample_covers_the_full_support() {
    let dfa = random_dfa(5, 9);
    let sample = exhaustive_sample(&dfa, 6);
    assert_eq!(sample.len(), 2usize.pow(7) - 1);
    for (w, l) in &sample.items {
        assert_eq!(dfa.run(w).unwrap(), *l);
    }
}
