use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::{extract, ExtractionConfig, Method, RnnOracle};
use crate::rnn::CellKind;
use crate::training::{gen_dataset, train, DatasetSpec, TrainConfig};

use super::metrics::gen_accuracy;
use super::tomita::tomita_dfa;

/// One row of the experiment grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub grammar: u8,
    pub cell: String,
    pub dim: usize,
    pub method: String,
    pub run: usize,
    /// Wall-clock of the extraction call only.
    pub runtime_ms: f64,
    /// Extracted DFA equivalent to the canonical grammar automaton.
    pub success: bool,
    pub gen_acc_small: f64,
    pub gen_acc_large: f64,
    /// Extracted DFA size; 0 marks a guard abort.
    pub size: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub grammars: Vec<u8>,
    /// Cell kind × hidden width combinations.
    pub cells: Vec<(CellKind, usize)>,
    /// Extraction methods in output order, each with its own configuration.
    pub methods: Vec<(Method, ExtractionConfig)>,
    /// Independent training runs per configuration.
    pub runs: usize,
    pub dataset: DatasetSpec,
    pub train: TrainConfig,
    /// Support bound used for the in-support generalization measure.
    pub support_small: usize,
    /// Strictly larger support for the second measure.
    pub support_large: usize,
    pub gen_sample_size: usize,
    pub seed: u64,
}

impl ExperimentSpec {
    fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be ≥ 1".into()));
        }
        if self.support_large <= self.support_small {
            return Err(Error::InvalidParameter(
                "the large support must exceed the small one".into(),
            ));
        }
        for &g in &self.grammars {
            tomita_dfa(g)?;
        }
        Ok(())
    }
}

/// Runs the full grid: train each cell on each grammar `runs` times, then
/// extract with every method. Guard aborts and gate failures yield records,
/// not errors.
pub fn run_benchmark(spec: &ExperimentSpec) -> Result<Vec<ExperimentRecord>> {
    spec.validate()?;
    let mut records = Vec::new();
    for &grammar in &spec.grammars {
        let target = tomita_dfa(grammar)?;
        for (cell_idx, &(kind, dim)) in spec.cells.iter().enumerate() {
            for run in 0..spec.runs {
                // decorrelate seeds across grid points
                let offset = ((grammar as u64) << 24)
                    ^ ((cell_idx as u64) << 16)
                    ^ (run as u64);
                let mut dspec = spec.dataset.clone();
                dspec.seed = spec.seed ^ offset;
                let train_set =
                    gen_dataset(&target.alphabet, |w| target.run_indices(w), &dspec, Some(&target))?;
                dspec.seed = dspec.seed.wrapping_add(1);
                let test_set =
                    gen_dataset(&target.alphabet, |w| target.run_indices(w), &dspec, Some(&target))?;
                let mut tcfg = spec.train.clone();
                tcfg.seed = spec.seed ^ offset ^ 0x5eed;
                let trained = train(kind, dim, &train_set, &test_set, &tcfg)?;
                let oracle = RnnOracle::new(&trained.model)?;
                for (method, cfg) in &spec.methods {
                    let mut cfg = cfg.clone();
                    cfg.seed = spec.seed ^ offset;
                    let record = match extract(&oracle, *method, &cfg) {
                        Ok(x) => ExperimentRecord {
                            grammar,
                            cell: kind.name().into(),
                            dim,
                            method: method.name().into(),
                            run,
                            runtime_ms: x.runtime_ms,
                            success: x.dfa.is_equivalent_to(&target),
                            gen_acc_small: gen_accuracy(
                                &x.dfa,
                                &oracle,
                                spec.support_small,
                                spec.gen_sample_size,
                                spec.seed ^ offset,
                            )?,
                            gen_acc_large: gen_accuracy(
                                &x.dfa,
                                &oracle,
                                spec.support_large,
                                spec.gen_sample_size,
                                spec.seed ^ offset,
                            )?,
                            size: x.dfa.num_states(),
                            converged: x.converged,
                        },
                        // resource guards mirror blank cells in the tables
                        Err(Error::StateExplosion { .. }) | Err(Error::SupportGuard { .. }) => {
                            ExperimentRecord {
                                grammar,
                                cell: kind.name().into(),
                                dim,
                                method: method.name().into(),
                                run,
                                runtime_ms: 0.0,
                                success: false,
                                gen_acc_small: 0.0,
                                gen_acc_large: 0.0,
                                size: 0,
                                converged: false,
                            }
                        }
                        Err(e) => return Err(e),
                    };
                    records.push(record);
                }
            }
        }
    }
    Ok(records)
}

/// CSV in record order: one row per record, methods appearing in the spec's
/// order within each run.
pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(
        "grammar,cell,dim,method,run,runtime_ms,success,gen_acc_small,gen_acc_large,size,converged\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{:.3},{},{:.6},{:.6},{},{}\n",
            r.grammar,
            r.cell,
            r.dim,
            r.method,
            r.run,
            r.runtime_ms,
            r.success,
            r.gen_acc_small,
            r.gen_acc_large,
            r.size,
            r.converged
        ));
    }
    out
}
