//! Hardness-reduction constructions and finite-support decision procedures
//! for comparing weighted language models.

mod compare;
mod reduction;
mod sat;

pub use compare::{
    dist_inf_finite, eq_finite, tchebychev_enumerate, EqOutcome, TchebychevVerdict, Weighted,
};
pub use reduction::{
    closed_form, closed_form_exact, decide_sat, sat_to_pfa, trivial_lm_weight_exact,
    trivial_rnnlm, ReductionBundle,
};
pub use sat::{Lit, SatFormula};
