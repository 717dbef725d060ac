//! Finite-state machine extraction from sequential black boxes: state-space
//! quantization, k-means clustering of visited states, and an adapted L*
//! with a refinable abstraction standing in for the equivalence oracle.

mod clustering;
mod kmeans;
mod lstar;
mod oracle;
mod partition;
mod quantization;

pub use clustering::extract_clustering;
pub use kmeans::{kmeans, KmeansResult};
pub use lstar::extract_lstar;
pub use oracle::{DfaOracle, RnnOracle, StateMachineOracle};
pub use partition::AbstractionPartition;
pub use quantization::extract_quantization;

use serde::{Deserialize, Serialize};

use crate::automata::{dfa_to_json, Dfa};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quantization,
    Clustering,
    Lstar,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Quantization => "quantization",
            Method::Clustering => "clustering",
            Method::Lstar => "lstar",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "quantization" => Ok(Method::Quantization),
            "clustering" => Ok(Method::Clustering),
            "lstar" => Ok(Method::Lstar),
            other => Err(crate::error::Error::InvalidParameter(format!(
                "unknown extraction method {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionConfig {
    /// Quantization: cells per dimension.
    pub resolution: usize,
    /// Clustering: number of k-means clusters.
    pub clusters: usize,
    /// Clustering: number of BFS prefixes whose states are collected.
    pub budget: usize,
    /// BFS depth bound shared by all methods.
    pub max_depth: usize,
    /// Quantization state-explosion guard.
    pub cell_cap: usize,
    /// L*: initial abstraction granularity per dimension.
    pub granularity: usize,
    /// L*: maximum number of partition refinements.
    pub refine_budget: usize,
    /// L*: maximum number of equivalence rounds.
    pub max_eq_rounds: usize,
    pub seed: u64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            resolution: 2,
            clusters: 10,
            budget: 1000,
            max_depth: 22,
            cell_cap: 100_000,
            granularity: 2,
            refine_budget: 200,
            max_eq_rounds: 200,
            seed: 0,
        }
    }
}

/// Result of one extraction run. The DFA is always minimized.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub dfa: Dfa,
    pub method: Method,
    pub runtime_ms: f64,
    pub converged: bool,
    pub membership_queries: usize,
    pub equivalence_queries: usize,
    pub conflicts_resolved: usize,
}

pub fn extract(
    oracle: &dyn StateMachineOracle,
    method: Method,
    cfg: &ExtractionConfig,
) -> Result<Extraction> {
    match method {
        Method::Quantization => extract_quantization(oracle, cfg),
        Method::Clustering => extract_clustering(oracle, cfg),
        Method::Lstar => extract_lstar(oracle, cfg),
    }
}

pub fn extraction_to_json(x: &Extraction, cfg: &ExtractionConfig) -> serde_json::Value {
    serde_json::json!({
        "dfa": dfa_to_json(&x.dfa),
        "method": x.method.name(),
        "config": serde_json::to_value(cfg).expect("config serializes"),
        "runtime_ms": x.runtime_ms,
        "converged": x.converged,
        "queries": {
            "membership": x.membership_queries,
            "equivalence": x.equivalence_queries,
        },
        "conflicts_resolved": x.conflicts_resolved,
    })
}
