//! Learning DFAs from reference language models: RPNI state merging,
//! structural risk minimization over automaton size, most-probable-string
//! queries and the attendant sample-complexity bounds.

mod bounds;
mod mps;
mod reference;
mod rpni;
mod srm;
mod zeta;

pub use bounds::{generalization_bound, generalization_bound_weighted, sample_size_bound};
pub use mps::{learn_mps, most_probable_strings, MpsResult};
pub use reference::{DpfaReference, FiniteSupportReference, ReferenceLm};
pub use rpni::rpni;
pub use srm::{learn_srm, srm_objective, LearnerConfig, SrmResult};
pub use zeta::{estimate_zeta, test_oracle};

use crate::automata::dfa_to_json;

/// Uniform run report for both learners. Fields that do not apply to a
/// method are null.
pub struct LearnerReport<'a> {
    pub method: &'a str,
    pub config: serde_json::Value,
    pub m: usize,
    pub dfa: &'a crate::automata::Dfa,
    pub empirical_risk: Option<f64>,
    pub true_risk: Option<f64>,
    pub covered_mass: Option<f64>,
    pub bound_values: serde_json::Value,
    pub seed: u64,
}

pub fn learner_report_json(r: &LearnerReport) -> serde_json::Value {
    serde_json::json!({
        "method": r.method,
        "config": r.config,
        "m": r.m,
        "returned_dfa": dfa_to_json(r.dfa),
        "L_S": r.empirical_risk,
        "L_P": r.true_risk,
        "covered_mass": r.covered_mass,
        "bound_values": r.bound_values,
        "seed": r.seed,
    })
}
