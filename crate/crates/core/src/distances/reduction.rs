//! 3-CNF satisfiability encoded as a gap between a probabilistic automaton
//! and a trivial recurrent language model. All weights are dyadic-friendly
//! rationals; arithmetic stays exact until the floating-point boundary.

use std::path::Path;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use serde_json::json;

use crate::automata::{pfa_to_json, Alphabet, Pfa};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rnn::{rnn_to_json, Activation, CellKind, Head, RnnModel};

use super::sat::SatFormula;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat_pow(base: &BigRational, exp: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

fn check_eps(eps: &BigRational) -> Result<()> {
    if *eps <= BigRational::zero() || *eps >= rat(1, 2) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} outside (0, 1/2)")));
    }
    Ok(())
}

fn parse_bits(w: &str) -> Result<Vec<bool>> {
    w.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::UnknownSymbol {
                symbol: other.to_string(),
                alphabet: vec!["0".into(), "1".into()],
            }),
        })
        .collect()
}

/// PFA whose probabilistic language is the closed form below: one chain of
/// n positions per clause, each carrying a satisfied/unsatisfied flag.
/// State layout: q0, then (clause i, position j, flag) at
/// 1 + 2(i·n + j) + flag with flag 0 = satisfied, 1 = not yet.
pub fn sat_to_pfa(f: &SatFormula, eps: &BigRational) -> Result<Pfa> {
    check_eps(eps)?;
    let (n, k) = (f.n, f.k());
    let dim = 1 + 2 * k * n;
    let idx = |i: usize, j: usize, unsat: bool| 1 + 2 * (i * n + j) + unsat as usize;

    let half_minus_eps = rat(1, 2) - eps;
    let root_edge = (BigRational::one() - eps * rat(2, 1)) / rat(2 * k as i64, 1);
    let to_f = |r: &BigRational| r.to_f64().expect("rational fits in f64");

    let mut trans = vec![Mat::zeros(dim, dim); 2];
    let mut final_weights = vec![to_f(&(eps * rat(2, 1))); dim];
    for (i, _) in f.clauses.iter().enumerate() {
        for bit in [false, true] {
            let b = bit as usize;
            // root: the first bit assigns x1 and fixes the clause flag
            *trans[b].at_mut(0, idx(i, 0, !f.bit_satisfies(i, 1, bit))) += to_f(&root_edge);
            // chain advance: bit at position j+1 assigns x_{j+2}
            for j in 0..n - 1 {
                *trans[b].at_mut(idx(i, j, false), idx(i, j + 1, false)) = to_f(&half_minus_eps);
                let next_unsat = !f.bit_satisfies(i, j + 2, bit);
                *trans[b].at_mut(idx(i, j, true), idx(i, j + 1, next_unsat)) = to_f(&half_minus_eps);
            }
            // terminal behavior past position n
            *trans[b].at_mut(idx(i, n - 1, false), idx(i, n - 1, true)) = to_f(eps);
            *trans[b].at_mut(idx(i, n - 1, true), idx(i, n - 1, true)) = to_f(&half_minus_eps);
        }
        final_weights[idx(i, n - 1, false)] = to_f(&(BigRational::one() - eps * rat(2, 1)));
    }
    let mut alpha = vec![0.0; dim];
    alpha[0] = 1.0;
    Pfa::new(Alphabet::binary(), alpha, trans, final_weights, k == 1)
}

/// N_w of the closed form: clauses satisfied by the assignment read off the
/// first n bits of w (x_{j+1} = bit j).
fn satisfied_by_prefix(f: &SatFormula, bits: &[bool]) -> usize {
    f.num_satisfied(&bits[..f.n])
}

/// Exact probabilistic language of `sat_to_pfa(f, eps)`:
/// |w| < n  → 2(1/2−ε)^{|w|}ε;
/// |w| = n  → ·[(N_w/k)(1−2ε)/(2ε) + (k−N_w)/k];
/// |w| > n  → ·[(N_{w:n}/k)(2ε)/(1−2ε) + (k−N_{w:n})/k].
pub fn closed_form_exact(f: &SatFormula, eps: &BigRational, bits: &[bool]) -> Result<BigRational> {
    check_eps(eps)?;
    let base = rat(2, 1) * eps * rat_pow(&(rat(1, 2) - eps), bits.len());
    if bits.len() < f.n {
        return Ok(base);
    }
    let nw = rat(satisfied_by_prefix(f, bits) as i64, 1);
    let k = rat(f.k() as i64, 1);
    let one_minus = BigRational::one() - eps * rat(2, 1);
    let ratio = if bits.len() == f.n {
        one_minus / (eps * rat(2, 1))
    } else {
        eps * rat(2, 1) / one_minus
    };
    Ok(base * ((&nw / &k) * ratio + (k.clone() - nw) / k))
}

pub fn closed_form(f: &SatFormula, eps: &BigRational, w: &str) -> Result<f64> {
    Ok(closed_form_exact(f, eps, &parse_bits(w)?)?.to_f64().expect("fits in f64"))
}

/// 2-state LM with zero recurrence whose per-step distribution is
/// (1/2−ε, 1/2−ε, 2ε), so every string w gets weight 2(1/2−ε)^{|w|}ε.
pub fn trivial_rnnlm(eps: f64) -> Result<RnnModel> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} outside (0, 1/2)")));
    }
    let mut m = RnnModel::zeros(CellKind::FirstOrder(Activation::Tanh), 2, Alphabet::binary(), true);
    let x = ((1.0 - 2.0 * eps) / (4.0 * eps)).log2();
    if let Head::Lm { bias, .. } = &mut m.head {
        bias[0] = x;
        bias[1] = x;
        bias[2] = 0.0;
    }
    Ok(m)
}

/// Exact weight the trivial LM assigns to any string of the given length.
pub fn trivial_lm_weight_exact(eps: &BigRational, len: usize) -> BigRational {
    rat(2, 1) * eps * rat_pow(&(rat(1, 2) - eps), len)
}

/// c_ε = 2(εs/k)(1/2−ε)^n(1−4ε)/(2ε).
fn threshold(f: &SatFormula, eps: &BigRational, s: &BigRational) -> BigRational {
    let k = rat(f.k() as i64, 1);
    rat(2, 1) * (eps * s / k) * rat_pow(&(rat(1, 2) - eps), f.n)
        * (BigRational::one() - eps * rat(4, 1))
        / (eps * rat(2, 1))
}

fn check_reduction_params(f: &SatFormula, eps: &BigRational, s: &BigRational) -> Result<()> {
    if *eps <= BigRational::zero() || *eps >= rat(1, 4) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} outside (0, 1/4)")));
    }
    let k = rat(f.k() as i64, 1);
    if *s < &k - BigRational::one() || *s >= k {
        return Err(Error::InvalidParameter(format!("s {s} outside [k-1, k)")));
    }
    Ok(())
}

/// Exact satisfiability decision through the reduction: the formula is
/// satisfiable iff max over Σ^n of |trivial LM − PFA| exceeds c_ε. The
/// per-length gap grows with the satisfied-clause count, so the sweep only
/// tracks its maximum.
pub fn decide_sat(f: &SatFormula, eps: &BigRational, s: &BigRational) -> Result<bool> {
    check_reduction_params(f, eps, s)?;
    if f.n > 24 {
        return Err(Error::SupportGuard { depth: f.n, cap: 1 << 24 });
    }
    let mut assignment = vec![false; f.n];
    let mut max_sat = 0usize;
    for bits in 0u64..(1u64 << f.n) {
        for (j, a) in assignment.iter_mut().enumerate() {
            *a = bits >> j & 1 == 1;
        }
        max_sat = max_sat.max(f.num_satisfied(&assignment));
        if max_sat == f.k() {
            break;
        }
    }
    let base = trivial_lm_weight_exact(eps, f.n);
    let gap = base * rat(max_sat as i64, f.k() as i64)
        * (BigRational::one() - eps * rat(4, 1))
        / (eps * rat(2, 1));
    Ok(gap > threshold(f, eps, s))
}

/// Everything a verifier needs: the formula, both models and the decision
/// threshold.
#[derive(Debug, Clone)]
pub struct ReductionBundle {
    pub formula: SatFormula,
    pub epsilon: BigRational,
    pub s: BigRational,
    pub c_eps: BigRational,
    pub pfa: Pfa,
    pub rnnlm: RnnModel,
}

impl ReductionBundle {
    /// Default slack s = k − 1/2, exact in binary rationals for integer k.
    pub fn new(formula: SatFormula, epsilon: BigRational, s: Option<BigRational>) -> Result<Self> {
        let s = s.unwrap_or_else(|| rat(formula.k() as i64, 1) - rat(1, 2));
        check_reduction_params(&formula, &epsilon, &s)?;
        let pfa = sat_to_pfa(&formula, &epsilon)?;
        let rnnlm = trivial_rnnlm(epsilon.to_f64().expect("fits in f64"))?;
        let c_eps = threshold(&formula, &epsilon, &s);
        Ok(ReductionBundle { formula, epsilon, s, c_eps, pfa, rnnlm })
    }

    /// Rationals rendered as `p/q` strings (or a bare integer when q = 1).
    pub fn meta_json(&self) -> serde_json::Value {
        json!({
            "epsilon": self.epsilon.to_string(),
            "s": self.s.to_string(),
            "c_eps": self.c_eps.to_string(),
            "variables": self.formula.n,
            "clauses": self.formula.k(),
        })
    }

    /// Writes pfa.json, rnn.json and meta.json into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let dump = |name: &str, v: &serde_json::Value| -> Result<()> {
            let mut text = serde_json::to_string_pretty(v)?;
            text.push('\n');
            std::fs::write(dir.join(name), text)?;
            Ok(())
        };
        dump("pfa.json", &pfa_to_json(&self.pfa))?;
        dump("rnn.json", &rnn_to_json(&self.rnnlm))?;
        dump("meta.json", &self.meta_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances::sat::tests::{contradiction, example_formula};
    use crate::distances::sat::Lit;
    use num::Signed;
    use rand::{Rng, SeedableRng};

    pub(crate) fn random_formula<R: Rng>(rng: &mut R, max_n: usize, max_k: usize) -> SatFormula {
        let n = rng.gen_range(1..=max_n);
        let k = rng.gen_range(1..=max_k);
        let clauses = (0..k)
            .map(|_| {
                [0; 3].map(|_| Lit {
                    atom: rng.gen_range(1..=n),
                    positive: rng.gen_bool(0.5),
                })
            })
            .collect();
        SatFormula::new(n, clauses).unwrap()
    }

    #[test]
    fn example_pfa_shape_and_root_edges() {
        let f = example_formula();
        let eps = rat(1, 8);
        let p = sat_to_pfa(&f, &eps).unwrap();
        assert_eq!(p.dim, 17); // 1 + 2·k·n = 1 + 2·2·4
        assert!(p.validate().is_ok());
        assert!(!p.deterministic);
        // every root edge carries 1/(2k) − ε/k = 3/16
        for b in 0..2 {
            let row: Vec<f64> = (0..p.dim).map(|j| p.trans[b].at(0, j)).filter(|&w| w != 0.0).collect();
            assert_eq!(row, vec![3.0 / 16.0; 2]);
        }
        assert_eq!(p.final_weights[0], 0.25); // 2ε
    }

    #[test]
    fn stochasticity_holds_on_random_formulas() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let f = random_formula(&mut rng, 6, 5);
            let p = sat_to_pfa(&f, &rat(1, 8)).unwrap();
            assert!(p.validate().is_ok(), "{f:?}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let f = example_formula();
        let eps = rat(1, 8);
        // short strings: 2(3/8)²(1/8) = 9/256
        assert_eq!(closed_form_exact(&f, &eps, &[false, true]).unwrap(), rat(9, 256));
        // w = 1111 satisfies both clauses: 2(3/8)⁴(1/8)·(3/4)/(1/4)
        let expected = rat(3, 4) * rat_pow(&rat(3, 8), 4);
        assert_eq!(closed_form_exact(&f, &eps, &[true; 4]).unwrap(), expected);
        // nothing satisfied at |w| = n collapses the bracket to 1
        let g = SatFormula::new(2, vec![[Lit::pos(1), Lit::pos(1), Lit::pos(2)]]).unwrap();
        assert_eq!(
            closed_form_exact(&g, &eps, &[false, false]).unwrap(),
            rat(2, 1) * rat(1, 8) * rat_pow(&rat(3, 8), 2)
        );
    }

    #[test]
    fn pfa_weight_matches_closed_form() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
        let eps = rat(1, 8);
        for _ in 0..20 {
            let f = random_formula(&mut rng, 6, 4);
            let p = sat_to_pfa(&f, &eps).unwrap();
            for len in 0..=f.n + 3 {
                for word in Alphabet::binary().words_of_len(len) {
                    let bits: Vec<bool> = word.iter().map(|&s| s == 1).collect();
                    let expected = closed_form_exact(&f, &eps, &bits).unwrap().to_f64().unwrap();
                    let got = p.weight_indices(&word);
                    assert!((got - expected).abs() < 1e-12, "{f:?} len={len}");
                }
            }
        }
    }

    #[test]
    fn trivial_lm_per_step_distribution() {
        let m = trivial_rnnlm(0.125).unwrap();
        assert!((m.lm_weight("").unwrap() - 0.25).abs() < 1e-12);
        assert!((m.lm_weight("0").unwrap() - 0.375 * 0.25).abs() < 1e-12);
        assert!((m.lm_weight("01").unwrap() - 0.375 * 0.375 * 0.25).abs() < 1e-12);
        assert!(trivial_rnnlm(0.0).is_err());
        assert!(trivial_rnnlm(0.5).is_err());
    }

    #[test]
    fn trivial_lm_mass_is_geometric() {
        let m = trivial_rnnlm(0.125).unwrap();
        let a = Alphabet::binary();
        let mut mass = 0.0;
        for len in 0..=8usize {
            for word in a.words_of_len(len) {
                mass += m.lm_weight_indices(&word).unwrap();
            }
            let expected = 1.0 - 0.75f64.powi(len as i32 + 1);
            assert!((mass - expected).abs() < 1e-12, "len={len}");
        }
    }

    #[test]
    fn decide_sat_examples() {
        let eps = rat(1, 8);
        let f = example_formula();
        let s = rat(3, 2);
        assert!(decide_sat(&f, &eps, &s).unwrap());
        assert!(!decide_sat(&contradiction(), &eps, &s).unwrap());
        let single = SatFormula::new(2, vec![[Lit::pos(1), Lit::neg(1), Lit::pos(2)]]).unwrap();
        assert!(decide_sat(&single, &eps, &rat(1, 2)).unwrap());
        assert!(decide_sat(&f, &rat(1, 4), &s).is_err());
        assert!(decide_sat(&f, &eps, &rat(2, 1)).is_err());
    }

    #[test]
    fn decide_sat_agrees_with_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for eps in [rat(1, 8), rat(1, 16)] {
            for _ in 0..20 {
                let f = random_formula(&mut rng, 10, 8);
                let s = rat(f.k() as i64, 1) - rat(1, 2);
                assert_eq!(decide_sat(&f, &eps, &s).unwrap(), f.is_satisfiable(), "{f:?}");
            }
        }
    }

    #[test]
    fn gap_shrinks_past_length_n() {
        let eps = rat(1, 8);
        for seed in 0..5u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f = random_formula(&mut rng, 6, 4);
            for len in f.n + 1..=f.n + 3 {
                for word in Alphabet::binary().words_of_len(len) {
                    let bits: Vec<bool> = word.iter().map(|&s| s == 1).collect();
                    let long = (trivial_lm_weight_exact(&eps, len)
                        - closed_form_exact(&f, &eps, &bits).unwrap())
                    .abs();
                    let short = (trivial_lm_weight_exact(&eps, f.n)
                        - closed_form_exact(&f, &eps, &bits[..f.n]).unwrap())
                    .abs();
                    assert!(long <= short, "{f:?} len={len}");
                }
            }
        }
    }

    #[test]
    fn bundle_defaults_and_meta() {
        let b = ReductionBundle::new(example_formula(), rat(1, 8), None).unwrap();
        assert_eq!(b.s, rat(3, 2));
        assert_eq!(b.c_eps, rat(3, 2) / rat(2, 1) * rat_pow(&rat(3, 8), 4) * rat(1, 2));
        let meta = b.meta_json();
        assert_eq!(meta["epsilon"], "1/8");
        assert_eq!(meta["s"], "3/2");
        assert!(ReductionBundle::new(example_formula(), rat(3, 8), None).is_err());
    }
}
