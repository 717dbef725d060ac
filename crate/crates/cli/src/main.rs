use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;

use fsmx_core::automata::{
    dfa_from_json, dfa_to_json, pfa_from_json, Dfa, LabeledSample, Pfa,
};
use fsmx_core::bench::{records_to_csv, run_benchmark, ExperimentSpec};
use fsmx_core::distances::{
    decide_sat, dist_inf_finite, tchebychev_enumerate, ReductionBundle, SatFormula,
    TchebychevVerdict, Weighted,
};
use fsmx_core::extraction::{
    extract, extraction_to_json, ExtractionConfig, Method, RnnOracle,
};
use fsmx_core::oracle_learning::{
    generalization_bound, generalization_bound_weighted, learn_mps, learn_srm,
    learner_report_json, sample_size_bound, DpfaReference, LearnerConfig, LearnerReport,
};
use fsmx_core::rnn::{rnn_from_json, rnn_to_json, RnnModel};
use fsmx_core::training::{gen_dataset, train, DatasetSpec, Strategy, TrainConfig};
use fsmx_core::{Activation, Alphabet, CellKind, EquivResult};

#[derive(Parser)]
#[command(name = "fsmx", version, about = "Finite-state analysis of recurrent models")]
struct Cli {
    /// Master seed; all randomness derives from it.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Output file (or directory for bundle-producing commands).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Uniform,
    UniformUpsampled,
    PrefixQuota,
}

#[derive(Clone, Copy, ValueEnum)]
enum CellArg {
    FirstOrder,
    SecondOrder,
    Lstm,
    Gru,
}

#[derive(Clone, Copy, ValueEnum)]
enum ActivationArg {
    Sigmoid,
    Tanh,
    Relu,
}

impl ActivationArg {
    fn to_core(self) -> Activation {
        match self {
            ActivationArg::Sigmoid => Activation::Sigmoid,
            ActivationArg::Tanh => Activation::Tanh,
            ActivationArg::Relu => Activation::Relu,
        }
    }
}

fn cell_kind(cell: CellArg, act: ActivationArg) -> CellKind {
    match cell {
        CellArg::FirstOrder => CellKind::FirstOrder(act.to_core()),
        CellArg::SecondOrder => CellKind::SecondOrder(act.to_core()),
        CellArg::Lstm => CellKind::Lstm,
        CellArg::Gru => CellKind::Gru,
    }
}

#[derive(Args)]
struct ExtractionFlags {
    /// Quantization cells per dimension.
    #[arg(long, default_value_t = 2)]
    resolution: usize,
    /// k-means cluster count.
    #[arg(long, default_value_t = 10)]
    clusters: usize,
    /// BFS prefix budget for clustering.
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    #[arg(long, default_value_t = 22)]
    max_depth: usize,
    /// Abstraction granularity per dimension.
    #[arg(long, default_value_t = 2)]
    granularity: usize,
    #[arg(long, default_value_t = 200)]
    refine_budget: usize,
}

impl ExtractionFlags {
    fn to_config(&self, seed: u64) -> ExtractionConfig {
        ExtractionConfig {
            resolution: self.resolution,
            clusters: self.clusters,
            budget: self.budget,
            max_depth: self.max_depth,
            granularity: self.granularity,
            refine_budget: self.refine_budget,
            seed,
            ..ExtractionConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a labeled dataset from a Tomita grammar, as TSV.
    GenData {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
        grammar: u8,
        #[arg(long, value_enum, default_value_t = StrategyArg::Uniform)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 10)]
        max_len: usize,
        #[arg(long, default_value_t = 500)]
        size: usize,
        /// Minority share enforced by up-sampling.
        #[arg(long, default_value_t = 0.3)]
        ratio: f64,
        /// Prefixes per state for prefix-quota sampling.
        #[arg(long, default_value_t = 3)]
        quota: usize,
    },
    /// Train a recurrent recognizer on TSV data; emits rnn.json.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, value_enum, default_value_t = CellArg::FirstOrder)]
        cell: CellArg,
        #[arg(long, value_enum, default_value_t = ActivationArg::Tanh)]
        activation: ActivationArg,
        #[arg(long, default_value_t = 10)]
        dim: usize,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        #[arg(long, default_value_t = 1e-2)]
        lr: f64,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        /// Symbols of the alphabet, one character each.
        #[arg(long, default_value = "01")]
        alphabet: String,
    },
    /// Extract a DFA from a trained recognizer.
    Extract {
        rnn: PathBuf,
        #[arg(long)]
        method: String,
        #[command(flatten)]
        flags: ExtractionFlags,
    },
    /// Minimize a DFA.
    Minimize { dfa: PathBuf },
    /// Check two DFAs for language equivalence.
    Equiv { a: PathBuf, b: PathBuf },
    /// Finite-support sup distance between two models (DFA, PFA or RNN).
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 12)]
        support_len: usize,
        /// Decide d∞ > cutpoint by mass enumeration instead.
        #[arg(long)]
        cutpoint: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Compile a 3-CNF formula into the PFA / trivial-LM bundle.
    ReduceSat {
        cnf: PathBuf,
        /// ε as a rational, e.g. 1/8.
        #[arg(long)]
        eps: String,
        /// Slack s in [k−1, k); default k − 1/2.
        #[arg(long)]
        slack: Option<String>,
    },
    /// Decide satisfiability through the distance threshold.
    DecideSat {
        cnf: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        slack: Option<String>,
    },
    /// Structural-risk-minimization learner over a labeled TSV sample.
    LearnSrm {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 4)]
        cap: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value = "01")]
        alphabet: String,
    },
    /// Most-probable-string learner against a DPFA reference model.
    LearnMps {
        #[arg(long)]
        pfa: PathBuf,
        /// DFA answering membership queries.
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        queries: usize,
    },
    /// Train/extract grid over Tomita grammars; emits the experiment CSV.
    Bench {
        /// Comma-separated grammar ids.
        #[arg(long, default_value = "1")]
        grammars: String,
        #[arg(long, value_enum, default_value_t = CellArg::FirstOrder)]
        cell: CellArg,
        #[arg(long, value_enum, default_value_t = ActivationArg::Tanh)]
        activation: ActivationArg,
        #[arg(long, default_value_t = 10)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long, default_value_t = 250)]
        dataset_size: usize,
        #[arg(long, default_value_t = 10)]
        max_len: usize,
        #[arg(long, default_value_t = 120)]
        epochs: usize,
    },
    /// Evaluate the sample-complexity bounds.
    Bounds {
        /// Sample size for the generalization bound.
        #[arg(long)]
        m: Option<usize>,
        /// DFA size for the generalization bound.
        #[arg(long)]
        n: Option<usize>,
        /// Target accuracy: switches to the sample-size bound.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 2)]
        sigma: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Growth-rate constant of the sample-size bound.
        #[arg(long, default_value_t = 1.0)]
        growth: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = check_thread_cap() {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// FSMX_THREADS caps worker parallelism; every worker here is sequential,
/// so the cap only needs to be a positive integer.
fn check_thread_cap() -> Result<(), String> {
    match std::env::var("FSMX_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(format!("FSMX_THREADS must be a positive integer, got {v:?}")),
        },
    }
}

type AnyError = Box<dyn std::error::Error>;

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), AnyError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read_json(path: &Path) -> Result<serde_json::Value, AnyError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn json_line(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn parse_rational(s: &str) -> Result<BigRational, AnyError> {
    BigRational::from_str(s).map_err(|e| format!("bad rational {s:?}: {e}").into())
}

fn char_alphabet(spec: &str) -> Result<Alphabet, AnyError> {
    let symbols: Vec<String> = spec.chars().map(|c| c.to_string()).collect();
    Ok(Alphabet::new(symbols)?)
}

fn load_sample(path: &Path, alphabet: Alphabet) -> Result<LabeledSample, AnyError> {
    Ok(LabeledSample::from_tsv(alphabet, &std::fs::read_to_string(path)?)?)
}

enum Model {
    Dfa(Dfa),
    Pfa(Pfa),
    Rnn(RnnModel),
}

impl Model {
    fn load(path: &Path) -> Result<Model, AnyError> {
        let v = read_json(path)?;
        let obj = v
            .as_object()
            .ok_or_else(|| format!("{}: expected a JSON object", path.display()))?;
        if obj.contains_key("final") {
            Ok(Model::Pfa(pfa_from_json(&v)?))
        } else if obj.contains_key("accepting") {
            Ok(Model::Dfa(dfa_from_json(&v)?))
        } else if obj.contains_key("kind") {
            Ok(Model::Rnn(rnn_from_json(&v)?))
        } else {
            Err(format!("{}: not a DFA, PFA or RNN artifact", path.display()).into())
        }
    }

    fn weighted(&self) -> &dyn Weighted {
        match self {
            Model::Dfa(d) => d,
            Model::Pfa(p) => p,
            Model::Rnn(r) => r,
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), AnyError> {
    let seed = cli.seed;
    let out = cli.out;
    let format = cli.format;
    match cli.cmd {
        Cmd::GenData { grammar, strategy, max_len, size, ratio, quota } => {
            let dfa = fsmx_core::bench::tomita_dfa(grammar)?;
            let spec = DatasetSpec {
                strategy: match strategy {
                    StrategyArg::Uniform => Strategy::Uniform,
                    StrategyArg::UniformUpsampled => Strategy::UniformUpsampled,
                    StrategyArg::PrefixQuota => Strategy::PrefixQuota,
                },
                max_len,
                size,
                ratio,
                quota,
                seed,
            };
            let sample =
                gen_dataset(&dfa.alphabet, |w| dfa.run_indices(w), &spec, Some(&dfa))?;
            emit(&out, &sample.to_tsv())
        }
        Cmd::Train {
            data,
            test,
            cell,
            activation,
            dim,
            epochs,
            batch_size,
            lr,
            restarts,
            alphabet,
        } => {
            let alphabet = char_alphabet(&alphabet)?;
            let train_s = load_sample(&data, alphabet.clone())?;
            let test_s = load_sample(&test, alphabet)?;
            let cfg = TrainConfig {
                lr,
                batch_size,
                epochs,
                max_restarts: restarts,
                seed,
                ..TrainConfig::default()
            };
            let t = train(cell_kind(cell, activation), dim, &train_s, &test_s, &cfg)?;
            eprintln!(
                "train accuracy {:.4}, test accuracy {:.4}, restarts {}, gate {}",
                t.train_accuracy,
                t.test_accuracy,
                t.restarts_used,
                if t.gate_passed { "passed" } else { "failed" }
            );
            emit(&out, &json_line(&rnn_to_json(&t.model)))
        }
        Cmd::Extract { rnn, method, flags } => {
            let model = rnn_from_json(&read_json(&rnn)?)?;
            let oracle = RnnOracle::new(&model)?;
            let method = Method::from_str(&method)?;
            let cfg = flags.to_config(seed);
            let x = extract(&oracle, method, &cfg)?;
            eprintln!("extraction took {:.3} ms", x.runtime_ms);
            let mut v = extraction_to_json(&x, &cfg);
            // wall clock stays on stderr so artifacts are reproducible
            v["runtime_ms"] = 0.0.into();
            emit(&out, &json_line(&v))
        }
        Cmd::Minimize { dfa } => {
            let d = dfa_from_json(&read_json(&dfa)?)?;
            emit(&out, &json_line(&dfa_to_json(&d.minimize())))
        }
        Cmd::Equiv { a, b } => {
            let da = dfa_from_json(&read_json(&a)?)?;
            let db = dfa_from_json(&read_json(&b)?)?;
            match da.equiv(&db)? {
                EquivResult::Equivalent => emit(&out, "equivalent\n"),
                EquivResult::Counterexample(w) => {
                    emit(&out, &format!("counterexample: {:?}\n", da.alphabet.render(&w)))
                }
            }
        }
        Cmd::Distance { a, b, support_len, cutpoint, cap } => {
            let ma = Model::load(&a)?;
            let mb = Model::load(&b)?;
            let v = match cutpoint {
                None => {
                    let (d, witness) = dist_inf_finite(ma.weighted(), mb.weighted(), support_len)?;
                    serde_json::json!({ "distance": d, "witness": witness })
                }
                Some(c) => {
                    let verdict = tchebychev_enumerate(ma.weighted(), mb.weighted(), c, cap)?;
                    match verdict {
                        TchebychevVerdict::Yes(w) => {
                            serde_json::json!({ "exceeds": true, "witness": w })
                        }
                        TchebychevVerdict::No => serde_json::json!({ "exceeds": false }),
                        TchebychevVerdict::Inconclusive => {
                            serde_json::json!({ "exceeds": serde_json::Value::Null })
                        }
                    }
                }
            };
            match format {
                Format::Json => emit(&out, &json_line(&v)),
                Format::Csv => {
                    let obj = v.as_object().unwrap();
                    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
                    let vals: Vec<String> = obj.values().map(ToString::to_string).collect();
                    emit(&out, &format!("{}\n{}\n", keys.join(","), vals.join(",")))
                }
            }
        }
        Cmd::ReduceSat { cnf, eps, slack } => {
            let formula = SatFormula::from_dimacs(&std::fs::read_to_string(&cnf)?)?;
            let eps = parse_rational(&eps)?;
            let slack = slack.as_deref().map(parse_rational).transpose()?;
            let bundle = ReductionBundle::new(formula, eps, slack)?;
            let dir = out.unwrap_or_else(|| PathBuf::from("."));
            bundle.write_to_dir(&dir)?;
            print!("{}", json_line(&bundle.meta_json()));
            Ok(())
        }
        Cmd::DecideSat { cnf, eps, slack } => {
            let formula = SatFormula::from_dimacs(&std::fs::read_to_string(&cnf)?)?;
            let eps = parse_rational(&eps)?;
            let k = formula.k();
            let slack = match slack {
                Some(s) => parse_rational(&s)?,
                None => {
                    BigRational::from_integer(k.into()) - BigRational::new(1.into(), 2.into())
                }
            };
            let sat = decide_sat(&formula, &eps, &slack)?;
            emit(&out, if sat { "SAT\n" } else { "UNSAT\n" })
        }
        Cmd::LearnSrm { data, cap, c, delta, eps, alphabet } => {
            let sample = load_sample(&data, char_alphabet(&alphabet)?)?;
            let cfg = LearnerConfig { c, delta, epsilon: eps, size_cap: cap, seed };
            let r = learn_srm(&sample, &cfg)?;
            let m = sample.len();
            let n = r.dfa.num_states();
            let bounds = serde_json::json!({
                "penalty": r.penalty,
                "objective": r.objective(),
                "generalization_bound": generalization_bound(m, n, delta, sample.alphabet.len(), c)?,
            });
            let report = LearnerReport {
                method: "srm",
                config: serde_json::to_value(&cfg)?,
                m,
                dfa: &r.dfa,
                empirical_risk: Some(r.empirical_risk),
                true_risk: None,
                covered_mass: None,
                bound_values: bounds,
                seed,
            };
            emit(&out, &json_line(&learner_report_json(&report)))
        }
        Cmd::LearnMps { pfa, target, queries } => {
            let lm = DpfaReference::new(pfa_from_json(&read_json(&pfa)?)?)?;
            let dfa = dfa_from_json(&read_json(&target)?)?;
            let r = learn_mps(&lm, &|w| dfa.run_indices(w), queries)?;
            let bounds = serde_json::json!({
                "risk_bound": 1.0 - r.covered_mass,
            });
            let report = LearnerReport {
                method: "mps",
                config: serde_json::json!({ "queries": queries }),
                m: queries,
                dfa: &r.dfa,
                empirical_risk: Some(0.0),
                true_risk: None,
                covered_mass: Some(r.covered_mass),
                bound_values: bounds,
                seed,
            };
            emit(&out, &json_line(&learner_report_json(&report)))
        }
        Cmd::Bench {
            grammars,
            cell,
            activation,
            dim,
            runs,
            dataset_size,
            max_len,
            epochs,
        } => {
            let grammars: Vec<u8> = grammars
                .split(',')
                .map(|g| g.trim().parse::<u8>())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("bad grammar list: {e}"))?;
            let spec = ExperimentSpec {
                grammars,
                cells: vec![(cell_kind(cell, activation), dim)],
                methods: vec![
                    (Method::Quantization, ExtractionConfig::default()),
                    (Method::Clustering, ExtractionConfig::default()),
                    (Method::Lstar, ExtractionConfig::default()),
                ],
                runs,
                dataset: DatasetSpec {
                    strategy: Strategy::UniformUpsampled,
                    max_len,
                    size: dataset_size,
                    ratio: 0.3,
                    quota: 3,
                    seed,
                },
                train: TrainConfig { epochs, seed, ..TrainConfig::default() },
                support_small: max_len,
                support_large: 2 * max_len + 2,
                gen_sample_size: 500,
                seed,
            };
            let mut records = run_benchmark(&spec)?;
            for r in &mut records {
                eprintln!(
                    "grammar {} {} run {}: {:.3} ms, success {}",
                    r.grammar, r.method, r.run, r.runtime_ms, r.success
                );
                r.runtime_ms = 0.0; // timing goes to stderr, artifacts stay stable
            }
            emit(&out, &records_to_csv(&records))
        }
        Cmd::Bounds { m, n, eps, delta, sigma, c, growth } => {
            let v = match (m, n, eps) {
                (Some(m), Some(n), None) => serde_json::json!({
                    "generalization_bound": generalization_bound(m, n, delta, sigma, c)?,
                    "generalization_bound_weighted":
                        generalization_bound_weighted(m, n, delta, sigma, c)?,
                }),
                (None, None, Some(eps)) => serde_json::json!({
                    "sample_size_bound": sample_size_bound(eps, delta, sigma, c, growth)?,
                }),
                _ => {
                    return Err(
                        "pass either --m and --n (generalization) or --eps (sample size)".into()
                    )
                }
            };
            match format {
                Format::Json => emit(&out, &json_line(&v)),
                Format::Csv => {
                    let obj = v.as_object().unwrap();
                    let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
                    let vals: Vec<String> = obj.values().map(ToString::to_string).collect();
                    emit(&out, &format!("{}\n{}\n", keys.join(","), vals.join(",")))
                }
            }
        }
    }
}
