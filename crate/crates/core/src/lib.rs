//! Exact finite-state machinery, desk-scale RNN training, FSM extraction,
//! SAT hardness reductions with closed-form verifiers, and oracle-based
//! learning of automata with computable sample bounds.

pub mod automata;
pub mod bench;
pub mod distances;
pub mod error;
pub mod extraction;
pub mod linalg;
pub mod oracle_learning;
pub mod rnn;
pub mod training;

pub use automata::{Alphabet, Dfa, EquivResult, LabeledSample, Pfa, Wfa};
pub use error::Error;
pub use rnn::{Activation, CellKind, RnnModel};
