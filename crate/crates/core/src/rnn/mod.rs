//! RNN cells (first-order, second-order, LSTM, GRU), recognizer and
//! language-model wrappers, softmax base 2, the 4-base binary encoding and
//! Lipschitz/contractivity diagnostics.

mod cell;
mod diag;
mod encoding;
mod json;
mod model;

pub use cell::{sigmoid, softmax2, HiddenState};
pub(crate) use cell::effective_matrix;
pub use diag::{empirical_lipschitz, lipschitz_bound, LipschitzReport};
pub use encoding::enc4;
pub use json::{rnn_from_json, rnn_to_json};
pub use model::{Activation, CellKind, CellWeights, Head, RnnModel};
