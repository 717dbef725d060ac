use crate::automata::{Alphabet, Dfa};
use crate::error::{Error, Result};
use crate::rnn::{Activation, CellKind, HiddenState, RnnModel};

/// A deterministic sequential machine exposed to the extractors: an initial
/// state vector, a step function and a boolean classifier. `embed` maps raw
/// state vectors into [0,1]^embed_dim for the partition-based extractors.
pub trait StateMachineOracle {
    fn alphabet(&self) -> &Alphabet;
    fn initial(&self) -> Vec<f64>;
    fn step(&self, state: &[f64], sym: usize) -> Result<Vec<f64>>;
    fn classify(&self, state: &[f64]) -> Result<bool>;
    fn embed(&self, state: &[f64]) -> Result<Vec<f64>>;
    fn embed_dim(&self) -> usize;

    fn classify_word(&self, w: &[usize]) -> Result<bool> {
        let mut s = self.initial();
        for &sym in w {
            s = self.step(&s, sym)?;
        }
        self.classify(&s)
    }
}

/// Recognizer RNN as an oracle. The raw state is the flattened hidden
/// state (h, then the LSTM memory vector when present).
pub struct RnnOracle<'a> {
    model: &'a RnnModel,
}

impl<'a> RnnOracle<'a> {
    pub fn new(model: &'a RnnModel) -> Result<Self> {
        if model.is_lm() {
            return Err(Error::WrongHead { expected: "recognizer" });
        }
        Ok(RnnOracle { model })
    }

    fn unflatten(&self, state: &[f64]) -> Result<HiddenState> {
        let d = self.model.dim;
        let expected = if matches!(self.model.kind, CellKind::Lstm) { 2 * d } else { d };
        if state.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "oracle state has length {}, expected {expected}",
                state.len()
            )));
        }
        Ok(HiddenState {
            h: state[..d].to_vec(),
            c: matches!(self.model.kind, CellKind::Lstm).then(|| state[d..].to_vec()),
        })
    }

    fn activation(&self) -> Option<Activation> {
        match self.model.kind {
            CellKind::FirstOrder(a) | CellKind::SecondOrder(a) => Some(a),
            CellKind::Lstm | CellKind::Gru => None,
        }
    }
}

impl StateMachineOracle for RnnOracle<'_> {
    fn alphabet(&self) -> &Alphabet {
        &self.model.alphabet
    }

    fn initial(&self) -> Vec<f64> {
        self.model.initial_state().flat()
    }

    fn step(&self, state: &[f64], sym: usize) -> Result<Vec<f64>> {
        Ok(self.model.step(&self.unflatten(state)?, sym)?.flat())
    }

    fn classify(&self, state: &[f64]) -> Result<bool> {
        Ok(self.model.classify_state(&self.unflatten(state)?)?.0)
    }

    /// Sigmoid coordinates are already in [0,1]; tanh-bounded coordinates
    /// (including gated-cell hidden states) are rescaled by (x+1)/2; LSTM
    /// memory coordinates pass through tanh first. Relu states are
    /// unbounded and rejected.
    fn embed(&self, state: &[f64]) -> Result<Vec<f64>> {
        let d = self.model.dim;
        match self.activation() {
            Some(Activation::Relu) => Err(Error::InvalidParameter(
                "relu hidden states are unbounded; no box embedding exists".into(),
            )),
            Some(Activation::Sigmoid) => Ok(state.to_vec()),
            Some(Activation::Tanh) => Ok(state.iter().map(|&x| (x + 1.0) / 2.0).collect()),
            None => Ok(state
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let bounded = if i < d { x } else { x.tanh() };
                    (bounded + 1.0) / 2.0
                })
                .collect()),
        }
    }

    fn embed_dim(&self) -> usize {
        if matches!(self.model.kind, CellKind::Lstm) {
            2 * self.model.dim
        } else {
            self.model.dim
        }
    }
}

/// Ground-truth oracle: a DFA with one-hot state vectors. Used to test the
/// extractors against machines whose minimal form is known.
pub struct DfaOracle<'a> {
    dfa: &'a Dfa,
}

impl<'a> DfaOracle<'a> {
    pub fn new(dfa: &'a Dfa) -> Self {
        DfaOracle { dfa }
    }

    fn current(&self, state: &[f64]) -> Result<usize> {
        state
            .iter()
            .position(|&x| x == 1.0)
            .ok_or_else(|| Error::ShapeMismatch("not a one-hot DFA state vector".into()))
    }

    fn one_hot(&self, q: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.dfa.num_states()];
        v[q] = 1.0;
        v
    }
}

impl StateMachineOracle for DfaOracle<'_> {
    fn alphabet(&self) -> &Alphabet {
        &self.dfa.alphabet
    }

    fn initial(&self) -> Vec<f64> {
        self.one_hot(self.dfa.initial)
    }

    fn step(&self, state: &[f64], sym: usize) -> Result<Vec<f64>> {
        Ok(self.one_hot(self.dfa.step(self.current(state)?, sym)))
    }

    fn classify(&self, state: &[f64]) -> Result<bool> {
        Ok(self.dfa.accepting[self.current(state)?])
    }

    fn embed(&self, state: &[f64]) -> Result<Vec<f64>> {
        Ok(state.to_vec())
    }

    fn embed_dim(&self) -> usize {
        self.dfa.num_states()
    }
}
