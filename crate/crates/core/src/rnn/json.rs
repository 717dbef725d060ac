//! `rnn.json` wire format:
//! {"kind": ..., "activation": ..., "dim": d, "alphabet": [...],
//!  "weights": named dense arrays (row-major, decimal strings),
//!  "head": "recognizer" | "lm"}

use serde_json::{json, Map, Value};

use crate::automata::json::{format_f64, parse_f64};
use crate::automata::Alphabet;
use crate::error::{Error, Result};
use crate::linalg::Mat;

use super::model::{Activation, CellKind, CellWeights, Head, RnnModel};

fn mat_json(m: &Mat) -> Value {
    Value::Array(m.data.iter().map(|&x| Value::String(format_f64(x))).collect())
}

fn vec_json(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| Value::String(format_f64(x))).collect())
}

fn vecs_json(v: &[Vec<f64>]) -> Value {
    Value::Array(v.iter().map(|row| vec_json(row)).collect())
}

pub fn rnn_to_json(m: &RnnModel) -> Value {
    let (kind, activation) = match m.kind {
        CellKind::FirstOrder(a) => ("first-order", Some(a)),
        CellKind::SecondOrder(a) => ("second-order", Some(a)),
        CellKind::Lstm => ("lstm", None),
        CellKind::Gru => ("gru", None),
    };
    let mut weights = Map::new();
    weights.insert("h0".into(), vec_json(&m.h0));
    match &m.weights {
        CellWeights::FirstOrder { w, bias, emb } => {
            weights.insert("w".into(), mat_json(w));
            weights.insert("c".into(), vec_json(bias));
            weights.insert("emb".into(), vecs_json(emb));
        }
        CellWeights::SecondOrder { tensor, emb } => {
            weights.insert("tensor".into(), Value::Array(tensor.iter().map(mat_json).collect()));
            weights.insert("emb".into(), vecs_json(emb));
        }
        CellWeights::Lstm { wi, ui, wf, uf, wo, uo, wc, uc, emb } => {
            for (name, mat) in [
                ("wi", wi),
                ("ui", ui),
                ("wf", wf),
                ("uf", uf),
                ("wo", wo),
                ("uo", uo),
                ("wc", wc),
                ("uc", uc),
            ] {
                weights.insert(name.into(), mat_json(mat));
            }
            weights.insert("emb".into(), vecs_json(emb));
        }
        CellWeights::Gru { wz, uz, wr, ur, w, cand_bias, emb } => {
            for (name, mat) in [("wz", wz), ("uz", uz), ("wr", wr), ("ur", ur), ("w", w)] {
                weights.insert(name.into(), mat_json(mat));
            }
            weights.insert("cand_bias".into(), vecs_json(cand_bias));
            weights.insert("emb".into(), vecs_json(emb));
        }
    }
    match &m.head {
        Head::Recognizer { o, bias } => {
            weights.insert("o".into(), vec_json(o));
            weights.insert("o_bias".into(), Value::String(format_f64(*bias)));
        }
        Head::Lm { o, bias } => {
            weights.insert("o".into(), mat_json(o));
            weights.insert("o_bias".into(), vec_json(bias));
        }
    }
    json!({
        "kind": kind,
        "activation": activation,
        "dim": m.dim,
        "alphabet": m.alphabet.symbols(),
        "head": if m.is_lm() { "lm" } else { "recognizer" },
        "weights": Value::Object(weights),
    })
}

fn get_f64s(w: &Map<String, Value>, name: &str) -> Result<Vec<f64>> {
    w.get(name)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("rnn.json: missing weights.{name}")))?
        .iter()
        .map(parse_f64)
        .collect()
}

fn get_mat(w: &Map<String, Value>, name: &str, rows: usize, cols: usize) -> Result<Mat> {
    let data = get_f64s(w, name)?;
    if data.len() != rows * cols {
        return Err(Error::Parse(format!(
            "rnn.json: weights.{name} has {} entries, expected {rows}x{cols}",
            data.len()
        )));
    }
    Ok(Mat { rows, cols, data })
}

fn get_vecs(w: &Map<String, Value>, name: &str) -> Result<Vec<Vec<f64>>> {
    w.get(name)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse(format!("rnn.json: missing weights.{name}")))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse(format!("rnn.json: weights.{name} rows")))?
                .iter()
                .map(parse_f64)
                .collect()
        })
        .collect()
}

pub fn rnn_from_json(v: &Value) -> Result<RnnModel> {
    let alphabet = Alphabet::new(
        v["alphabet"]
            .as_array()
            .ok_or_else(|| Error::Parse("rnn.json: missing alphabet".into()))?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| Error::Parse("symbol".into())))
            .collect::<Result<_>>()?,
    )?;
    let dim = v["dim"].as_u64().ok_or_else(|| Error::Parse("rnn.json: missing dim".into()))? as usize;
    let head_kind = v["head"].as_str().ok_or_else(|| Error::Parse("rnn.json: missing head".into()))?;
    let lm = match head_kind {
        "lm" => true,
        "recognizer" => false,
        other => return Err(Error::Parse(format!("rnn.json: unknown head {other:?}"))),
    };
    let l = alphabet.len() + lm as usize;
    let activation = || -> Result<Activation> {
        serde_json::from_value(v["activation"].clone())
            .map_err(|_| Error::Parse("rnn.json: missing or bad activation".into()))
    };
    let kind = match v["kind"].as_str() {
        Some("first-order") => CellKind::FirstOrder(activation()?),
        Some("second-order") => CellKind::SecondOrder(activation()?),
        Some("lstm") => CellKind::Lstm,
        Some("gru") => CellKind::Gru,
        other => return Err(Error::Parse(format!("rnn.json: unknown kind {other:?}"))),
    };
    let w = v["weights"]
        .as_object()
        .ok_or_else(|| Error::Parse("rnn.json: missing weights".into()))?;
    let weights = match kind {
        CellKind::FirstOrder(_) => CellWeights::FirstOrder {
            w: get_mat(w, "w", dim, dim)?,
            bias: get_f64s(w, "c")?,
            emb: get_vecs(w, "emb")?,
        },
        CellKind::SecondOrder(_) => {
            let tensor = w
                .get("tensor")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("rnn.json: missing weights.tensor".into()))?
                .iter()
                .map(|slice| {
                    let data: Vec<f64> = slice
                        .as_array()
                        .ok_or_else(|| Error::Parse("rnn.json: tensor slice".into()))?
                        .iter()
                        .map(parse_f64)
                        .collect::<Result<_>>()?;
                    if data.len() != dim * dim {
                        return Err(Error::Parse("rnn.json: tensor slice shape".into()));
                    }
                    Ok(Mat { rows: dim, cols: dim, data })
                })
                .collect::<Result<Vec<_>>>()?;
            CellWeights::SecondOrder { tensor, emb: get_vecs(w, "emb")? }
        }
        CellKind::Lstm => CellWeights::Lstm {
            wi: get_mat(w, "wi", dim, dim)?,
            ui: get_mat(w, "ui", dim, l)?,
            wf: get_mat(w, "wf", dim, dim)?,
            uf: get_mat(w, "uf", dim, l)?,
            wo: get_mat(w, "wo", dim, dim)?,
            uo: get_mat(w, "uo", dim, l)?,
            wc: get_mat(w, "wc", dim, l)?,
            uc: get_mat(w, "uc", dim, dim)?,
            emb: get_vecs(w, "emb")?,
        },
        CellKind::Gru => CellWeights::Gru {
            wz: get_mat(w, "wz", dim, dim)?,
            uz: get_mat(w, "uz", dim, l)?,
            wr: get_mat(w, "wr", dim, dim)?,
            ur: get_mat(w, "ur", dim, l)?,
            w: get_mat(w, "w", dim, dim)?,
            cand_bias: get_vecs(w, "cand_bias")?,
            emb: get_vecs(w, "emb")?,
        },
    };
    let head = if lm {
        Head::Lm { o: get_mat(w, "o", l, dim)?, bias: get_f64s(w, "o_bias")? }
    } else {
        let bias = parse_f64(
            w.get("o_bias").ok_or_else(|| Error::Parse("rnn.json: missing weights.o_bias".into()))?,
        )?;
        Head::Recognizer { o: get_f64s(w, "o")?, bias }
    };
    Ok(RnnModel { kind, dim, alphabet, weights, h0: get_f64s(w, "h0")?, head })
}
