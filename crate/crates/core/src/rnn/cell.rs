use crate::error::{Error, Result};
use crate::linalg::{add_assign, Mat};

use super::model::{CellKind, CellWeights, RnnModel};

/// Hidden state of a running cell. The memory vector `c` is present iff the
/// cell is an LSTM.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenState {
    pub h: Vec<f64>,
    pub c: Option<Vec<f64>>,
}

impl HiddenState {
    pub fn plain(h: Vec<f64>) -> Self {
        HiddenState { h, c: None }
    }

    /// Flat view used by extraction oracles: `h` followed by `c` if present.
    pub fn flat(&self) -> Vec<f64> {
        let mut v = self.h.clone();
        if let Some(c) = &self.c {
            v.extend_from_slice(c);
        }
        v
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Softmax base 2: softmax₂(x)_i = 2^{x_i} / Σ_j 2^{x_j}, computed with a
/// max shift. Shift-invariant by construction.
pub fn softmax2(x: &[f64]) -> Vec<f64> {
    let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pows: Vec<f64> = x.iter().map(|&v| (v - m).exp2()).collect();
    let total: f64 = pows.iter().sum();
    pows.into_iter().map(|p| p / total).collect()
}

impl RnnModel {
    /// One cell update. Pure: the input state is untouched.
    pub fn step(&self, state: &HiddenState, sym: usize) -> Result<HiddenState> {
        if sym >= self.num_inputs() {
            return Err(Error::UnknownSymbol {
                symbol: format!("#{sym}"),
                alphabet: self.alphabet.symbols().to_vec(),
            });
        }
        if state.h.len() != self.dim {
            return Err(Error::ShapeMismatch(format!(
                "hidden state has length {}, model dim is {}",
                state.h.len(),
                self.dim
            )));
        }
        let q = &state.h;
        match (&self.kind, &self.weights) {
            (CellKind::FirstOrder(act), CellWeights::FirstOrder { w, bias, emb }) => {
                let mut pre = w.mul_vec(q);
                add_assign(&mut pre, &emb[sym]);
                add_assign(&mut pre, bias);
                Ok(HiddenState::plain(pre.into_iter().map(|x| act.apply(x)).collect()))
            }
            (CellKind::SecondOrder(act), CellWeights::SecondOrder { tensor, emb }) => {
                let eff = effective_matrix(tensor, &emb[sym]);
                let pre = eff.mul_vec(q);
                Ok(HiddenState::plain(pre.into_iter().map(|x| act.apply(x)).collect()))
            }
            (CellKind::Lstm, CellWeights::Lstm { wi, ui, wf, uf, wo, uo, wc, uc, emb }) => {
                let e = &emb[sym];
                let gate = |wq: &Mat, ue: &Mat| -> Vec<f64> {
                    let mut pre = wq.mul_vec(q);
                    add_assign(&mut pre, &ue.mul_vec(e));
                    pre.into_iter().map(sigmoid).collect()
                };
                let i = gate(wi, ui);
                let f = gate(wf, uf);
                let o = gate(wo, uo);
                let mut cand = wc.mul_vec(e);
                add_assign(&mut cand, &uc.mul_vec(q));
                let cand: Vec<f64> = cand.into_iter().map(f64::tanh).collect();
                let c_prev = state.c.as_ref().ok_or_else(|| {
                    Error::ShapeMismatch("LSTM step needs a memory vector".into())
                })?;
                let c_next: Vec<f64> = (0..self.dim)
                    .map(|k| c_prev[k] * f[k] + cand[k] * i[k])
                    .collect();
                let h_next: Vec<f64> = (0..self.dim).map(|k| o[k] * c_next[k].tanh()).collect();
                Ok(HiddenState { h: h_next, c: Some(c_next) })
            }
            (CellKind::Gru, CellWeights::Gru { wz, uz, wr, ur, w, cand_bias, emb }) => {
                let e = &emb[sym];
                let gate = |wq: &Mat, ue: &Mat| -> Vec<f64> {
                    let mut pre = wq.mul_vec(q);
                    add_assign(&mut pre, &ue.mul_vec(e));
                    pre.into_iter().map(sigmoid).collect()
                };
                let z = gate(wz, uz);
                let r = gate(wr, ur);
                let gated: Vec<f64> = (0..self.dim).map(|k| q[k] * r[k]).collect();
                let mut cand = w.mul_vec(&gated);
                add_assign(&mut cand, &cand_bias[sym]);
                let cand: Vec<f64> = cand.into_iter().map(f64::tanh).collect();
                let h_next: Vec<f64> = (0..self.dim)
                    .map(|k| (1.0 - z[k]) * cand[k] + z[k] * q[k])
                    .collect();
                Ok(HiddenState::plain(h_next))
            }
            _ => Err(Error::ShapeMismatch("cell kind and weights disagree".into())),
        }
    }
}

/// Σ_k b[k] · tensor[k], the per-symbol recurrent matrix of a second-order
/// cell.
pub fn effective_matrix(tensor: &[Mat], b: &[f64]) -> Mat {
    let (rows, cols) = (tensor[0].rows, tensor[0].cols);
    let mut eff = Mat::zeros(rows, cols);
    for (t, &bk) in tensor.iter().zip(b) {
        if bk == 0.0 {
            continue;
        }
        for (dst, src) in eff.data.iter_mut().zip(&t.data) {
            *dst += bk * src;
        }
    }
    eff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Alphabet;
    use crate::rnn::model::{Activation, Head};

    #[test]
    fn softmax2_examples() {
        let p = softmax2(&[0.0, 0.0, 0.0]);
        for v in &p {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        let p = softmax2(&[1.0, 0.0]);
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-15);
        let x = 1.5f64.log2();
        let p = softmax2(&[x, x, 0.0]);
        assert!((p[0] - 0.375).abs() < 1e-15);
        assert!((p[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn softmax2_shift_invariant_and_normalized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..5).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let c: f64 = rng.gen_range(-5.0..5.0);
            let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
            let p = softmax2(&x);
            let q = softmax2(&shifted);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (a, b) in p.iter().zip(&q) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn first_order_scalar_step() {
        let mut m = RnnModel::zeros(CellKind::FirstOrder(Activation::Tanh), 1, Alphabet::binary(), false);
        if let CellWeights::FirstOrder { w, emb, .. } = &mut m.weights {
            w.data[0] = 1.0;
            emb[0][0] = 1.0;
        }
        let s = m.step(&m.initial_state(), 0).unwrap();
        assert!((s.h[0] - 1.0f64.tanh()).abs() < 1e-15);
        assert!((s.h[0] - 0.761594).abs() < 1e-6);
    }

    #[test]
    fn zero_weights_give_zero_or_phi_zero() {
        let m = RnnModel::zeros(CellKind::FirstOrder(Activation::Tanh), 3, Alphabet::binary(), false);
        let s = m.step(&m.initial_state(), 1).unwrap();
        assert_eq!(s.h, vec![0.0; 3]);

        let m = RnnModel::zeros(CellKind::SecondOrder(Activation::Sigmoid), 3, Alphabet::binary(), false);
        let s = m.step(&m.initial_state(), 0).unwrap();
        assert_eq!(s.h, vec![0.5; 3]);
    }

    #[test]
    fn step_is_pure_and_deterministic() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for kind in [
            CellKind::FirstOrder(Activation::Sigmoid),
            CellKind::SecondOrder(Activation::Tanh),
            CellKind::Lstm,
            CellKind::Gru,
        ] {
            let m = RnnModel::random_init(kind, 4, Alphabet::binary(), false, 0.1, &mut rng);
            let s0 = m.initial_state();
            let a = m.step(&s0, 1).unwrap();
            let b = m.step(&s0, 1).unwrap();
            assert_eq!(a, b, "{}", kind.name());
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let m = RnnModel::zeros(CellKind::FirstOrder(Activation::Relu), 3, Alphabet::binary(), false);
        let bad = HiddenState::plain(vec![0.0; 2]);
        assert!(m.step(&bad, 0).is_err());
        let _ = Head::Recognizer { o: vec![], bias: 0.0 };
    }
}
