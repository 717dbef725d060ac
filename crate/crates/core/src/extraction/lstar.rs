use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use crate::automata::Dfa;
use crate::error::Result;

use super::oracle::StateMachineOracle;
use super::partition::AbstractionPartition;
use super::{Extraction, ExtractionConfig, Method};

struct Teacher<'a> {
    oracle: &'a dyn StateMachineOracle,
    cache: HashMap<Vec<usize>, bool>,
    queries: usize,
}

impl<'a> Teacher<'a> {
    fn member(&mut self, w: &[usize]) -> Result<bool> {
        if let Some(&v) = self.cache.get(w) {
            return Ok(v);
        }
        self.queries += 1;
        let v = self.oracle.classify_word(w)?;
        self.cache.insert(w.to_vec(), v);
        Ok(v)
    }
}

struct ObservationTable {
    prefixes: Vec<Vec<usize>>,
    suffixes: Vec<Vec<usize>>,
    num_syms: usize,
}

impl ObservationTable {
    fn new(num_syms: usize) -> Self {
        ObservationTable { prefixes: vec![vec![]], suffixes: vec![vec![]], num_syms }
    }

    fn row(&self, teacher: &mut Teacher, prefix: &[usize]) -> Result<Vec<bool>> {
        self.suffixes
            .iter()
            .map(|s| {
                let mut w = prefix.to_vec();
                w.extend_from_slice(s);
                teacher.member(&w)
            })
            .collect()
    }

    fn add_prefix(&mut self, p: Vec<usize>) {
        if !self.prefixes.contains(&p) {
            self.prefixes.push(p);
        }
    }

    /// Restores closure and consistency, growing prefixes and suffixes.
    fn stabilize(&mut self, teacher: &mut Teacher) -> Result<()> {
        'outer: loop {
            let rows: Vec<Vec<bool>> = self
                .prefixes
                .iter()
                .map(|p| self.row(teacher, p))
                .collect::<Result<_>>()?;
            // closure: every one-symbol extension's row must already appear
            for p in self.prefixes.clone() {
                for sym in 0..self.num_syms {
                    let mut ext = p.clone();
                    ext.push(sym);
                    let ext_row = self.row(teacher, &ext)?;
                    if !rows.contains(&ext_row) {
                        self.add_prefix(ext);
                        continue 'outer;
                    }
                }
            }
            // consistency: equal rows must stay equal under every extension
            for i in 0..self.prefixes.len() {
                for j in i + 1..self.prefixes.len() {
                    if rows[i] != rows[j] {
                        continue;
                    }
                    for sym in 0..self.num_syms {
                        let mut a = self.prefixes[i].clone();
                        a.push(sym);
                        let mut b = self.prefixes[j].clone();
                        b.push(sym);
                        let ra = self.row(teacher, &a)?;
                        let rb = self.row(teacher, &b)?;
                        if let Some(col) = ra.iter().zip(&rb).position(|(x, y)| x != y) {
                            let mut suffix = vec![sym];
                            suffix.extend_from_slice(&self.suffixes[col]);
                            self.suffixes.push(suffix);
                            continue 'outer;
                        }
                    }
                }
            }
            return Ok(());
        }
    }

    fn hypothesis(&self, teacher: &mut Teacher, oracle: &dyn StateMachineOracle) -> Result<Dfa> {
        let mut states: Vec<Vec<bool>> = Vec::new();
        let mut index: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut reps: Vec<Vec<usize>> = Vec::new();
        for p in &self.prefixes {
            let r = self.row(teacher, p)?;
            if !index.contains_key(&r) {
                index.insert(r.clone(), states.len());
                states.push(r);
                reps.push(p.clone());
            }
        }
        let accepting: Vec<bool> = states.iter().map(|r| r[0]).collect();
        let mut delta = vec![vec![0usize; self.num_syms]; states.len()];
        for (q, rep) in reps.iter().enumerate() {
            for sym in 0..self.num_syms {
                let mut ext = rep.clone();
                ext.push(sym);
                let r = self.row(teacher, &ext)?;
                delta[q][sym] = index[&r];
            }
        }
        let initial = index[&states[0]]; // prefixes[0] is the empty word
        Dfa::new(oracle.alphabet().clone(), initial, accepting, delta)
    }
}

/// Abstraction automaton over partition cells: each cell is represented by
/// the first state vector seen inside it, and transitions follow that
/// witness through the oracle.
struct Abstraction<'a> {
    oracle: &'a dyn StateMachineOracle,
    partition: AbstractionPartition,
    witnesses: HashMap<usize, Vec<f64>>,
    labels: HashMap<usize, bool>,
}

impl<'a> Abstraction<'a> {
    fn cell_of_raw(&mut self, raw: &[f64]) -> Result<usize> {
        let e = self.oracle.embed(raw)?;
        let cell = self.partition.cell_of(&e);
        self.witnesses.entry(cell).or_insert_with(|| raw.to_vec());
        Ok(cell)
    }

    fn label(&mut self, cell: usize) -> Result<bool> {
        if let Some(&l) = self.labels.get(&cell) {
            return Ok(l);
        }
        let l = self.oracle.classify(&self.witnesses[&cell])?;
        self.labels.insert(cell, l);
        Ok(l)
    }

    fn step_cell(&mut self, cell: usize, sym: usize) -> Result<usize> {
        let succ = self.oracle.step(&self.witnesses[&cell].clone(), sym)?;
        self.cell_of_raw(&succ)
    }

    /// Forget all witnesses; cell ids changed after a refinement.
    fn reset(&mut self) {
        self.witnesses.clear();
        self.labels.clear();
    }
}

/// Breadth-first search over the product of the hypothesis and the
/// abstraction automaton; returns the shortest word (lexicographically
/// least among equals) where their classifications differ.
fn find_disagreement(hyp: &Dfa, abs: &mut Abstraction) -> Result<Option<Vec<usize>>> {
    let num_syms = hyp.alphabet.len();
    let init = abs.oracle.initial();
    let root_cell = abs.cell_of_raw(&init)?;
    let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
    let mut queue: VecDeque<(usize, usize, Vec<usize>)> = VecDeque::new();
    seen.insert((hyp.initial, root_cell), ());
    queue.push_back((hyp.initial, root_cell, vec![]));
    while let Some((q, cell, word)) = queue.pop_front() {
        if hyp.accepting[q] != abs.label(cell)? {
            return Ok(Some(word));
        }
        for sym in 0..num_syms {
            let q2 = hyp.step(q, sym);
            let c2 = abs.step_cell(cell, sym)?;
            if seen.insert((q2, c2), ()).is_none() {
                let mut w = word.clone();
                w.push(sym);
                queue.push_back((q2, c2, w));
            }
        }
    }
    Ok(None)
}

/// The abstraction disagreed with the oracle on `word`: walk the concrete
/// state trace alongside the witness-driven cell trace and split the cell
/// where they first diverge (or the final cell on a pure label clash).
/// Returns false when the offending points coincide and no split exists.
fn refine_abstraction(abs: &mut Abstraction, word: &[usize]) -> Result<bool> {
    let mut concrete = abs.oracle.initial();
    let mut cell = abs.cell_of_raw(&concrete)?;
    for &sym in word {
        let next_concrete = abs.oracle.step(&concrete, sym)?;
        let next_cell = abs.step_cell(cell, sym)?;
        if abs.cell_of_raw(&next_concrete)? != next_cell {
            let w = abs.oracle.embed(&abs.witnesses[&cell].clone())?;
            let v = abs.oracle.embed(&concrete)?;
            let split = abs.partition.refine(&w, &v).is_ok();
            abs.reset();
            return Ok(split);
        }
        concrete = next_concrete;
        cell = next_cell;
    }
    // same cell trace throughout, so the final cell mixes points with
    // different classifications
    let w = abs.oracle.embed(&abs.witnesses[&cell].clone())?;
    let v = abs.oracle.embed(&concrete)?;
    let split = abs.partition.refine(&w, &v).is_ok();
    abs.reset();
    Ok(split)
}

/// L* driven by membership queries against the oracle, with equivalence
/// queries answered exactly against the current abstraction automaton.
/// Disagreement words are adjudicated by the oracle itself: a wrong
/// hypothesis yields a counterexample, a wrong abstraction a refinement.
pub fn extract_lstar(
    oracle: &dyn StateMachineOracle,
    cfg: &ExtractionConfig,
) -> Result<Extraction> {
    let start = Instant::now();
    let mut teacher = Teacher { oracle, cache: HashMap::new(), queries: 0 };
    let mut table = ObservationTable::new(oracle.alphabet().len());
    let mut abs = Abstraction {
        oracle,
        partition: AbstractionPartition::new(oracle.embed_dim(), cfg.granularity)?,
        witnesses: HashMap::new(),
        labels: HashMap::new(),
    };

    let mut equivalence_queries = 0usize;
    let mut conflicts_resolved = 0usize;
    let mut converged = false;
    let mut hyp;
    loop {
        table.stabilize(&mut teacher)?;
        hyp = table.hypothesis(&mut teacher, oracle)?;
        if equivalence_queries >= cfg.max_eq_rounds {
            break;
        }
        equivalence_queries += 1;
        match find_disagreement(&hyp, &mut abs)? {
            None => {
                converged = true;
                break;
            }
            Some(word) => {
                let truth = teacher.member(&word)?;
                if hyp.run_indices(&word) != truth {
                    // every prefix of the counterexample joins the table
                    for cut in 1..=word.len() {
                        table.add_prefix(word[..cut].to_vec());
                    }
                } else {
                    if abs.partition.refinements() >= cfg.refine_budget
                        || !refine_abstraction(&mut abs, &word)?
                    {
                        break;
                    }
                    conflicts_resolved += 1;
                }
            }
        }
    }

    Ok(Extraction {
        dfa: hyp.minimize(),
        method: Method::Lstar,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        converged,
        membership_queries: teacher.queries,
        equivalence_queries,
        conflicts_resolved,
    })
}
