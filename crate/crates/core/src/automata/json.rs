//! JSON wire formats for automata.
//!
//! `dfa.json`: {"alphabet": [...], "states": n, "initial": i,
//!              "accepting": [...], "delta": [[state per symbol] per state]}
//! `pfa.json`: {"alphabet": [...], "dim": n, "alpha": [...], "final": [...],
//!              "trans": {symbol: row-major matrix}}
//!
//! Weights are serialized as decimal strings. Rust's shortest round-trip
//! float formatting preserves every f64 exactly.

use serde_json::{json, Map, Value};

use super::{Alphabet, Dfa, Pfa};
use crate::error::{Error, Result};
use crate::linalg::Mat;

pub fn dfa_to_json(dfa: &Dfa) -> Value {
    json!({
        "alphabet": dfa.alphabet.symbols(),
        "states": dfa.num_states(),
        "initial": dfa.initial,
        "accepting": (0..dfa.num_states()).filter(|&q| dfa.accepting[q]).collect::<Vec<_>>(),
        "delta": dfa.delta,
    })
}

pub fn dfa_from_json(v: &Value) -> Result<Dfa> {
    let alphabet = Alphabet::new(string_vec(&v["alphabet"])?)?;
    let states = v["states"]
        .as_u64()
        .ok_or_else(|| Error::Parse("dfa.json: missing states".into()))? as usize;
    let initial = v["initial"]
        .as_u64()
        .ok_or_else(|| Error::Parse("dfa.json: missing initial".into()))? as usize;
    let acc_list: Vec<usize> = v["accepting"]
        .as_array()
        .ok_or_else(|| Error::Parse("dfa.json: missing accepting".into()))?
        .iter()
        .map(|x| x.as_u64().map(|u| u as usize).ok_or_else(|| Error::Parse("dfa.json: bad accepting entry".into())))
        .collect::<Result<_>>()?;
    let mut accepting = vec![false; states];
    for q in acc_list {
        if q >= states {
            return Err(Error::Parse("dfa.json: accepting state out of range".into()));
        }
        accepting[q] = true;
    }
    let delta: Vec<Vec<usize>> = v["delta"]
        .as_array()
        .ok_or_else(|| Error::Parse("dfa.json: missing delta".into()))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("dfa.json: bad delta row".into()))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|u| u as usize)
                        .ok_or_else(|| Error::Parse("dfa.json: bad delta entry".into()))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Dfa::new(alphabet, initial, accepting, delta)
}

pub fn pfa_to_json(pfa: &Pfa) -> Value {
    let mut trans = Map::new();
    for (sym, m) in pfa.trans.iter().enumerate() {
        trans.insert(
            pfa.alphabet.symbol(sym).to_string(),
            Value::Array(m.data.iter().map(|&x| Value::String(format_f64(x))).collect()),
        );
    }
    json!({
        "alphabet": pfa.alphabet.symbols(),
        "dim": pfa.dim,
        "alpha": pfa.alpha.iter().map(|&x| format_f64(x)).collect::<Vec<_>>(),
        "final": pfa.final_weights.iter().map(|&x| format_f64(x)).collect::<Vec<_>>(),
        "deterministic": pfa.deterministic,
        "trans": Value::Object(trans),
    })
}

pub fn pfa_from_json(v: &Value) -> Result<Pfa> {
    let alphabet = Alphabet::new(string_vec(&v["alphabet"])?)?;
    let dim = v["dim"].as_u64().ok_or_else(|| Error::Parse("pfa.json: missing dim".into()))? as usize;
    let alpha = f64_vec(&v["alpha"])?;
    let final_weights = f64_vec(&v["final"])?;
    let deterministic = v["deterministic"].as_bool().unwrap_or(false);
    let trans_obj = v["trans"]
        .as_object()
        .ok_or_else(|| Error::Parse("pfa.json: missing trans".into()))?;
    let mut trans = Vec::with_capacity(alphabet.len());
    for sym in alphabet.symbols() {
        let flat = f64_vec(
            trans_obj
                .get(sym)
                .ok_or_else(|| Error::Parse(format!("pfa.json: missing trans for {sym:?}")))?,
        )?;
        if flat.len() != dim * dim {
            return Err(Error::Parse(format!("pfa.json: matrix for {sym:?} is not {dim}x{dim}")));
        }
        trans.push(Mat { rows: dim, cols: dim, data: flat });
    }
    Pfa::new(alphabet, alpha, trans, final_weights, deterministic)
}

pub fn format_f64(x: f64) -> String {
    format!("{x}")
}

pub fn parse_f64(v: &Value) -> Result<f64> {
    match v {
        Value::String(s) => s.parse::<f64>().map_err(|e| Error::Parse(format!("bad weight {s:?}: {e}"))),
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse("non-finite weight".into())),
        _ => Err(Error::Parse("weight must be a decimal string".into())),
    }
}

fn f64_vec(v: &Value) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected array of weights".into()))?
        .iter()
        .map(parse_f64)
        .collect()
}

fn string_vec(v: &Value) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("expected array of symbols".into()))?
        .iter()
        .map(|x| {
            x.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::Parse("symbol must be a string".into()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::tomita_dfa;

    #[test]
    fn dfa_round_trip() {
        let d = tomita_dfa(4).unwrap();
        let v = dfa_to_json(&d);
        let back = dfa_from_json(&v).unwrap();
        assert_eq!(back.num_states(), d.num_states());
        assert!(back.is_equivalent_to(&d));
        assert_eq!(dfa_to_json(&back), v);
    }

    #[test]
    fn pfa_round_trip_is_exact() {
        let p = Pfa::unary_halving();
        let v = pfa_to_json(&p);
        let back = pfa_from_json(&v).unwrap();
        assert_eq!(back.alpha, p.alpha);
        assert_eq!(back.final_weights, p.final_weights);
        assert_eq!(back.trans[0].data, p.trans[0].data);
        assert!(back.deterministic);
    }
}
