use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::automata::Alphabet;
use crate::error::{Error, Result};
use crate::linalg::{dot, Mat};

use super::cell::{sigmoid, softmax2, HiddenState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sigmoid,
    Tanh,
    Relu,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Sigmoid => sigmoid(x),
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
        }
    }

    /// Derivative expressed in terms of the activation value `y = φ(x)`.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Cell family. LSTM and GRU fix their internal activations (sigmoid gates,
/// tanh candidates).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellKind {
    FirstOrder(Activation),
    SecondOrder(Activation),
    Lstm,
    Gru,
}

impl CellKind {
    pub fn name(&self) -> &'static str {
        match self {
            CellKind::FirstOrder(_) => "first-order",
            CellKind::SecondOrder(_) => "second-order",
            CellKind::Lstm => "lstm",
            CellKind::Gru => "gru",
        }
    }
}

/// Output head: a single logit for recognizers, |Σ_$| logits for LMs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Head {
    Recognizer { o: Vec<f64>, bias: f64 },
    Lm { o: Mat, bias: Vec<f64> },
}

/// Per-kind weight tensors.
///
/// Embeddings for second-order, LSTM and GRU cells are one-hot over the
/// input symbols; the learned symbol-dependent parameters live in the
/// matrices applied to them (and in `cand_bias` for GRU candidates).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CellWeights {
    FirstOrder {
        /// Recurrent matrix W (d×d).
        w: Mat,
        /// Shared bias c.
        bias: Vec<f64>,
        /// Per-symbol embedding b_σ (length d).
        emb: Vec<Vec<f64>>,
    },
    SecondOrder {
        /// tensor[k] is the d×d slice W_{··k}; the effective recurrent
        /// matrix for a symbol is Σ_k b_σ[k]·tensor[k].
        tensor: Vec<Mat>,
        /// Per-symbol embedding b_σ (length L), one-hot by default.
        emb: Vec<Vec<f64>>,
    },
    Lstm {
        wi: Mat,
        ui: Mat,
        wf: Mat,
        uf: Mat,
        wo: Mat,
        uo: Mat,
        /// Candidate input matrix (d×L, applied to the embedding).
        wc: Mat,
        /// Candidate recurrent matrix (d×d).
        uc: Mat,
        emb: Vec<Vec<f64>>,
    },
    Gru {
        wz: Mat,
        uz: Mat,
        wr: Mat,
        ur: Mat,
        /// Candidate recurrent matrix (d×d), applied to q ⊗ r.
        w: Mat,
        /// Per-symbol candidate bias b_σ (length d).
        cand_bias: Vec<Vec<f64>>,
        emb: Vec<Vec<f64>>,
    },
}

/// A recurrent model: cell kind, weight tensors, initial hidden state and
/// an output head. Immutable during evaluation; all operations are pure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RnnModel {
    pub kind: CellKind,
    pub dim: usize,
    pub alphabet: Alphabet,
    pub weights: CellWeights,
    pub h0: Vec<f64>,
    pub head: Head,
}

impl RnnModel {
    /// Number of distinct input symbols: |Σ| for recognizers, |Σ_$| for LMs.
    pub fn num_inputs(&self) -> usize {
        match self.head {
            Head::Recognizer { .. } => self.alphabet.len(),
            Head::Lm { .. } => self.alphabet.len() + 1,
        }
    }

    pub fn is_lm(&self) -> bool {
        matches!(self.head, Head::Lm { .. })
    }

    pub fn end_marker(&self) -> usize {
        self.alphabet.end_marker_index()
    }

    pub fn initial_state(&self) -> HiddenState {
        HiddenState {
            h: self.h0.clone(),
            c: matches!(self.kind, CellKind::Lstm).then(|| vec![0.0; self.dim]),
        }
    }

    /// Zero-initialized model of the given kind and head.
    pub fn zeros(kind: CellKind, dim: usize, alphabet: Alphabet, lm_head: bool) -> Self {
        let num_inputs = alphabet.len() + lm_head as usize;
        let l = num_inputs;
        let one_hot = |n: usize| -> Vec<Vec<f64>> {
            (0..n)
                .map(|s| {
                    let mut v = vec![0.0; n];
                    v[s] = 1.0;
                    v
                })
                .collect()
        };
        let weights = match kind {
            CellKind::FirstOrder(_) => CellWeights::FirstOrder {
                w: Mat::zeros(dim, dim),
                bias: vec![0.0; dim],
                emb: vec![vec![0.0; dim]; l],
            },
            CellKind::SecondOrder(_) => CellWeights::SecondOrder {
                tensor: (0..l).map(|_| Mat::zeros(dim, dim)).collect(),
                emb: one_hot(l),
            },
            CellKind::Lstm => CellWeights::Lstm {
                wi: Mat::zeros(dim, dim),
                ui: Mat::zeros(dim, l),
                wf: Mat::zeros(dim, dim),
                uf: Mat::zeros(dim, l),
                wo: Mat::zeros(dim, dim),
                uo: Mat::zeros(dim, l),
                wc: Mat::zeros(dim, l),
                uc: Mat::zeros(dim, dim),
                emb: one_hot(l),
            },
            CellKind::Gru => CellWeights::Gru {
                wz: Mat::zeros(dim, dim),
                uz: Mat::zeros(dim, l),
                wr: Mat::zeros(dim, dim),
                ur: Mat::zeros(dim, l),
                w: Mat::zeros(dim, dim),
                cand_bias: vec![vec![0.0; dim]; l],
                emb: one_hot(l),
            },
        };
        let head = if lm_head {
            Head::Lm { o: Mat::zeros(l, dim), bias: vec![0.0; l] }
        } else {
            Head::Recognizer { o: vec![0.0; dim], bias: 0.0 }
        };
        // the second-order cell is purely multiplicative, so a zero start
        // state would be a fixed point of the dynamics
        let mut h0 = vec![0.0; dim];
        if matches!(kind, CellKind::SecondOrder(_)) {
            h0[0] = 1.0;
        }
        RnnModel { kind, dim, alphabet, weights, h0, head }
    }

    /// Fresh Gaussian initialization (std `std`) of all trainable weights.
    pub fn random_init<R: Rng>(kind: CellKind, dim: usize, alphabet: Alphabet, lm_head: bool, std: f64, rng: &mut R) -> Self {
        let mut m = Self::zeros(kind, dim, alphabet, lm_head);
        let normal = Normal::new(0.0, std).expect("std must be positive");
        for p in m.trainable_params_mut() {
            *p = normal.sample(rng);
        }
        m
    }

    /// Mutable references to every trainable scalar, in a fixed order.
    /// One-hot embeddings are excluded.
    pub fn trainable_params_mut(&mut self) -> Vec<&mut f64> {
        let mut out: Vec<&mut f64> = Vec::new();
        match &mut self.weights {
            CellWeights::FirstOrder { w, bias, emb } => {
                out.extend(w.data.iter_mut());
                out.extend(bias.iter_mut());
                for e in emb {
                    out.extend(e.iter_mut());
                }
            }
            CellWeights::SecondOrder { tensor, .. } => {
                for t in tensor {
                    out.extend(t.data.iter_mut());
                }
            }
            CellWeights::Lstm { wi, ui, wf, uf, wo, uo, wc, uc, .. } => {
                for m in [wi, ui, wf, uf, wo, uo, wc, uc] {
                    out.extend(m.data.iter_mut());
                }
            }
            CellWeights::Gru { wz, uz, wr, ur, w, cand_bias, .. } => {
                for m in [wz, uz, wr, ur, w] {
                    out.extend(m.data.iter_mut());
                }
                for b in cand_bias {
                    out.extend(b.iter_mut());
                }
            }
        }
        match &mut self.head {
            Head::Recognizer { o, bias } => {
                out.extend(o.iter_mut());
                out.push(bias);
            }
            Head::Lm { o, bias } => {
                out.extend(o.data.iter_mut());
                out.extend(bias.iter_mut());
            }
        }
        out
    }

    pub fn trainable_params(&self) -> Vec<f64> {
        let mut clone = self.clone();
        clone.trainable_params_mut().iter().map(|p| **p).collect()
    }

    pub fn set_trainable_params(&mut self, values: &[f64]) {
        let params = self.trainable_params_mut();
        assert_eq!(params.len(), values.len(), "parameter count mismatch");
        for (p, &v) in params.into_iter().zip(values) {
            *p = v;
        }
    }

    /// Classify a string with the recognizer head. Returns (accept,
    /// confidence). Confidence exactly 0.5 breaks the tie to reject.
    pub fn classify(&self, w: &str) -> Result<(bool, f64)> {
        let idx = self.alphabet.parse(w)?;
        self.classify_indices(&idx)
    }

    pub fn classify_indices(&self, w: &[usize]) -> Result<(bool, f64)> {
        let (o, bias) = match &self.head {
            Head::Recognizer { o, bias } => (o, *bias),
            Head::Lm { .. } => return Err(Error::WrongHead { expected: "recognizer" }),
        };
        let mut state = self.initial_state();
        for &sym in w {
            state = self.step(&state, sym)?;
        }
        let conf = sigmoid(dot(o, &state.h) + bias);
        Ok((conf > 0.5, conf))
    }

    /// Confidence of acceptance for an already-computed hidden state.
    pub fn classify_state(&self, state: &HiddenState) -> Result<(bool, f64)> {
        let (o, bias) = match &self.head {
            Head::Recognizer { o, bias } => (o, *bias),
            Head::Lm { .. } => return Err(Error::WrongHead { expected: "recognizer" }),
        };
        let conf = sigmoid(dot(o, &state.h) + bias);
        Ok((conf > 0.5, conf))
    }

    /// Language-model weight of a string: feed `$, w₁, …, w_{|w|}` and take
    /// the product of the |w|+1 softmax probabilities assigned to the next
    /// consumed symbol (w_t for t ≤ |w|, then `$`).
    pub fn lm_weight(&self, w: &str) -> Result<f64> {
        let idx = self.alphabet.parse(w)?;
        self.lm_weight_indices(&idx)
    }

    pub fn lm_weight_indices(&self, w: &[usize]) -> Result<f64> {
        let (o, bias) = match &self.head {
            Head::Lm { o, bias } => (o, bias),
            Head::Recognizer { .. } => return Err(Error::WrongHead { expected: "lm" }),
        };
        let end = self.end_marker();
        let mut state = self.initial_state();
        let mut weight = 1.0;
        for t in 0..=w.len() {
            let input = if t == 0 { end } else { w[t - 1] };
            state = self.step(&state, input)?;
            let mut logits = o.mul_vec(&state.h);
            for (l, b) in logits.iter_mut().zip(bias) {
                *l += b;
            }
            let probs = softmax2(&logits);
            let next = if t < w.len() { w[t] } else { end };
            weight *= probs[next];
        }
        Ok(weight)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_recognizer_ties_to_reject() {
        let m = RnnModel::zeros(CellKind::FirstOrder(Activation::Tanh), 4, Alphabet::binary(), false);
        let (accept, conf) = m.classify("0101").unwrap();
        assert_eq!(conf, 0.5);
        assert!(!accept);
    }

    #[test]
    fn zero_lm_is_uniform() {
        // |Σ_$| = 3, so every step contributes 1/3
        let m = RnnModel::zeros(CellKind::FirstOrder(Activation::Tanh), 4, Alphabet::binary(), true);
        for w in ["", "0", "0110"] {
            let expected = (1.0f64 / 3.0).powi(w.len() as i32 + 1);
            assert!((m.lm_weight(w).unwrap() - expected).abs() < 1e-15, "w={w:?}");
        }
    }

    #[test]
    fn head_mismatch_errors() {
        let lm = RnnModel::zeros(CellKind::Gru, 2, Alphabet::binary(), true);
        assert!(matches!(lm.classify("0"), Err(Error::WrongHead { .. })));
        let rec = RnnModel::zeros(CellKind::Gru, 2, Alphabet::binary(), false);
        assert!(matches!(rec.lm_weight("0"), Err(Error::WrongHead { .. })));
    }

    #[test]
    fn random_init_is_seed_deterministic() {
        use rand::SeedableRng;
        let mk = || {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            RnnModel::random_init(CellKind::Lstm, 3, Alphabet::binary(), false, 0.1, &mut rng)
        };
        assert_eq!(mk().trainable_params(), mk().trainable_params());
    }
}
