use crate::error::{Error, Result};
use crate::linalg::{add_assign, dot, Mat};
use crate::rnn::{effective_matrix, sigmoid, CellKind, CellWeights, Head, RnnModel};

/// ln(1 + e^x) without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// grad[i][j] += u[i] * v[j]
fn outer_acc(m: &mut Mat, u: &[f64], v: &[f64]) {
    debug_assert_eq!(m.rows, u.len());
    debug_assert_eq!(m.cols, v.len());
    for (i, &ui) in u.iter().enumerate() {
        if ui == 0.0 {
            continue;
        }
        let row = &mut m.data[i * m.cols..(i + 1) * m.cols];
        for (slot, &vj) in row.iter_mut().zip(v) {
            *slot += ui * vj;
        }
    }
}

fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

struct LstmStep {
    i: Vec<f64>,
    f: Vec<f64>,
    o: Vec<f64>,
    g: Vec<f64>,
    c: Vec<f64>,
}

struct GruStep {
    z: Vec<f64>,
    r: Vec<f64>,
    g: Vec<f64>,
}

/// Mean binary cross-entropy over the batch plus its gradient with respect
/// to every trainable scalar, flattened in `trainable_params_mut` order.
pub fn loss_and_grad(model: &RnnModel, batch: &[(Vec<usize>, bool)]) -> Result<(f64, Vec<f64>)> {
    if batch.is_empty() {
        return Err(Error::EmptySample);
    }
    let (head_o, head_bias) = match &model.head {
        Head::Recognizer { o, bias } => (o, *bias),
        Head::Lm { .. } => return Err(Error::WrongHead { expected: "recognizer" }),
    };
    let d = model.dim;

    // gradients accumulate into a zeroed twin so the flattening order is the
    // model's own
    let mut gm = RnnModel::zeros(model.kind, d, model.alphabet.clone(), false);
    let mut total_loss = 0.0;

    for (word, label) in batch {
        for &sym in word {
            if sym >= model.num_inputs() {
                return Err(Error::UnknownSymbol {
                    symbol: format!("#{sym}"),
                    alphabet: model.alphabet.symbols().to_vec(),
                });
            }
        }
        let t_len = word.len();
        let y = *label as usize as f64;

        // forward with full caches
        let mut hs: Vec<Vec<f64>> = Vec::with_capacity(t_len + 1);
        hs.push(model.h0.clone());
        let mut lstm_steps: Vec<LstmStep> = Vec::new();
        let mut gru_steps: Vec<GruStep> = Vec::new();
        match (&model.kind, &model.weights) {
            (CellKind::FirstOrder(act), CellWeights::FirstOrder { w, bias, emb }) => {
                for &sym in word {
                    let mut pre = w.mul_vec(hs.last().unwrap());
                    add_assign(&mut pre, &emb[sym]);
                    add_assign(&mut pre, bias);
                    hs.push(pre.into_iter().map(|x| act.apply(x)).collect());
                }
            }
            (CellKind::SecondOrder(act), CellWeights::SecondOrder { tensor, emb }) => {
                for &sym in word {
                    let eff = effective_matrix(tensor, &emb[sym]);
                    let pre = eff.mul_vec(hs.last().unwrap());
                    hs.push(pre.into_iter().map(|x| act.apply(x)).collect());
                }
            }
            (CellKind::Lstm, CellWeights::Lstm { wi, ui, wf, uf, wo, uo, wc, uc, emb }) => {
                let mut c_prev = vec![0.0; d];
                for &sym in word {
                    let q = hs.last().unwrap().clone();
                    let e = &emb[sym];
                    let gate = |wq: &Mat, ue: &Mat| -> Vec<f64> {
                        let mut pre = wq.mul_vec(&q);
                        add_assign(&mut pre, &ue.mul_vec(e));
                        pre.into_iter().map(sigmoid).collect()
                    };
                    let i = gate(wi, ui);
                    let f = gate(wf, uf);
                    let o = gate(wo, uo);
                    let mut gpre = wc.mul_vec(e);
                    add_assign(&mut gpre, &uc.mul_vec(&q));
                    let g: Vec<f64> = gpre.into_iter().map(f64::tanh).collect();
                    let c: Vec<f64> =
                        (0..d).map(|k| c_prev[k] * f[k] + g[k] * i[k]).collect();
                    let h: Vec<f64> = (0..d).map(|k| o[k] * c[k].tanh()).collect();
                    c_prev = c.clone();
                    hs.push(h);
                    lstm_steps.push(LstmStep { i, f, o, g, c });
                }
            }
            (CellKind::Gru, CellWeights::Gru { wz, uz, wr, ur, w, cand_bias, emb }) => {
                for &sym in word {
                    let q = hs.last().unwrap().clone();
                    let e = &emb[sym];
                    let gate = |wq: &Mat, ue: &Mat| -> Vec<f64> {
                        let mut pre = wq.mul_vec(&q);
                        add_assign(&mut pre, &ue.mul_vec(e));
                        pre.into_iter().map(sigmoid).collect()
                    };
                    let z = gate(wz, uz);
                    let r = gate(wr, ur);
                    let gated = hadamard(&q, &r);
                    let mut gpre = w.mul_vec(&gated);
                    add_assign(&mut gpre, &cand_bias[sym]);
                    let g: Vec<f64> = gpre.into_iter().map(f64::tanh).collect();
                    let h: Vec<f64> =
                        (0..d).map(|k| (1.0 - z[k]) * g[k] + z[k] * q[k]).collect();
                    hs.push(h);
                    gru_steps.push(GruStep { z, r, g });
                }
            }
            _ => return Err(Error::ShapeMismatch("cell kind and weights disagree".into())),
        }

        // head: loss in logit form keeps e^z out of the picture
        let h_final = hs.last().unwrap();
        let logit = dot(head_o, h_final) + head_bias;
        total_loss += softplus(logit) - y * logit;
        let dlogit = sigmoid(logit) - y;

        {
            let Head::Recognizer { o: go, bias: gb } = &mut gm.head else { unreachable!() };
            for (slot, hv) in go.iter_mut().zip(h_final) {
                *slot += dlogit * hv;
            }
            *gb += dlogit;
        }
        let mut dh: Vec<f64> = head_o.iter().map(|&v| dlogit * v).collect();

        // backward through time
        match (&model.kind, &model.weights, &mut gm.weights) {
            (
                CellKind::FirstOrder(act),
                CellWeights::FirstOrder { w, .. },
                CellWeights::FirstOrder { w: gw, bias: gbias, emb: gemb },
            ) => {
                for t in (0..t_len).rev() {
                    let dpre: Vec<f64> = hs[t + 1]
                        .iter()
                        .zip(&dh)
                        .map(|(&h, &g)| g * act.derivative_from_output(h))
                        .collect();
                    outer_acc(gw, &dpre, &hs[t]);
                    add_assign(gbias, &dpre);
                    add_assign(&mut gemb[word[t]], &dpre);
                    dh = w.vec_mul(&dpre);
                }
            }
            (
                CellKind::SecondOrder(act),
                CellWeights::SecondOrder { tensor, emb },
                CellWeights::SecondOrder { tensor: gtensor, .. },
            ) => {
                for t in (0..t_len).rev() {
                    let dpre: Vec<f64> = hs[t + 1]
                        .iter()
                        .zip(&dh)
                        .map(|(&h, &g)| g * act.derivative_from_output(h))
                        .collect();
                    let b = &emb[word[t]];
                    for (k, &bk) in b.iter().enumerate() {
                        if bk == 0.0 {
                            continue;
                        }
                        let scaled: Vec<f64> = dpre.iter().map(|&v| bk * v).collect();
                        outer_acc(&mut gtensor[k], &scaled, &hs[t]);
                    }
                    let eff = effective_matrix(tensor, b);
                    dh = eff.vec_mul(&dpre);
                }
            }
            (
                CellKind::Lstm,
                CellWeights::Lstm { wi, wf, wo, uc, emb, .. },
                CellWeights::Lstm {
                    wi: gwi,
                    ui: gui,
                    wf: gwf,
                    uf: guf,
                    wo: gwo,
                    uo: guo,
                    wc: gwc,
                    uc: guc,
                    ..
                },
            ) => {
                let mut dc = vec![0.0; d];
                for t in (0..t_len).rev() {
                    let s = &lstm_steps[t];
                    let q = &hs[t];
                    let e = &emb[word[t]];
                    let c_prev: Vec<f64> =
                        if t == 0 { vec![0.0; d] } else { lstm_steps[t - 1].c.clone() };
                    let tc: Vec<f64> = s.c.iter().map(|&v| v.tanh()).collect();
                    let d_o: Vec<f64> = (0..d).map(|k| dh[k] * tc[k]).collect();
                    for k in 0..d {
                        dc[k] += dh[k] * s.o[k] * (1.0 - tc[k] * tc[k]);
                    }
                    let d_f: Vec<f64> = (0..d).map(|k| dc[k] * c_prev[k]).collect();
                    let d_i: Vec<f64> = (0..d).map(|k| dc[k] * s.g[k]).collect();
                    let d_g: Vec<f64> = (0..d).map(|k| dc[k] * s.i[k]).collect();
                    for k in 0..d {
                        dc[k] *= s.f[k];
                    }
                    let pre = |dv: &[f64], gate: &[f64]| -> Vec<f64> {
                        dv.iter().zip(gate).map(|(&g, &v)| g * v * (1.0 - v)).collect()
                    };
                    let dpi = pre(&d_i, &s.i);
                    let dpf = pre(&d_f, &s.f);
                    let dpo = pre(&d_o, &s.o);
                    let dpg: Vec<f64> =
                        d_g.iter().zip(&s.g).map(|(&g, &v)| g * (1.0 - v * v)).collect();
                    outer_acc(gwi, &dpi, q);
                    outer_acc(gui, &dpi, e);
                    outer_acc(gwf, &dpf, q);
                    outer_acc(guf, &dpf, e);
                    outer_acc(gwo, &dpo, q);
                    outer_acc(guo, &dpo, e);
                    outer_acc(gwc, &dpg, e);
                    outer_acc(guc, &dpg, q);
                    dh = wi.vec_mul(&dpi);
                    add_assign(&mut dh, &wf.vec_mul(&dpf));
                    add_assign(&mut dh, &wo.vec_mul(&dpo));
                    add_assign(&mut dh, &uc.vec_mul(&dpg));
                }
            }
            (
                CellKind::Gru,
                CellWeights::Gru { wz, wr, w, emb, .. },
                CellWeights::Gru {
                    wz: gwz,
                    uz: guz,
                    wr: gwr,
                    ur: gur,
                    w: gw,
                    cand_bias: gcb,
                    ..
                },
            ) => {
                for t in (0..t_len).rev() {
                    let s = &gru_steps[t];
                    let q = &hs[t];
                    let e = &emb[word[t]];
                    let d_z: Vec<f64> = (0..d).map(|k| dh[k] * (q[k] - s.g[k])).collect();
                    let d_g: Vec<f64> = (0..d).map(|k| dh[k] * (1.0 - s.z[k])).collect();
                    let mut dq: Vec<f64> = (0..d).map(|k| dh[k] * s.z[k]).collect();
                    let dpg: Vec<f64> =
                        d_g.iter().zip(&s.g).map(|(&g, &v)| g * (1.0 - v * v)).collect();
                    let gated = hadamard(q, &s.r);
                    outer_acc(gw, &dpg, &gated);
                    add_assign(&mut gcb[word[t]], &dpg);
                    let dgated = w.vec_mul(&dpg);
                    for k in 0..d {
                        dq[k] += dgated[k] * s.r[k];
                    }
                    let d_r: Vec<f64> = (0..d).map(|k| dgated[k] * q[k]).collect();
                    let dpz: Vec<f64> =
                        d_z.iter().zip(&s.z).map(|(&g, &v)| g * v * (1.0 - v)).collect();
                    let dpr: Vec<f64> =
                        d_r.iter().zip(&s.r).map(|(&g, &v)| g * v * (1.0 - v)).collect();
                    outer_acc(gwz, &dpz, q);
                    outer_acc(guz, &dpz, e);
                    outer_acc(gwr, &dpr, q);
                    outer_acc(gur, &dpr, e);
                    add_assign(&mut dq, &wz.vec_mul(&dpz));
                    add_assign(&mut dq, &wr.vec_mul(&dpr));
                    dh = dq;
                }
            }
            _ => unreachable!("kind checked during the forward pass"),
        }
    }

    let n = batch.len() as f64;
    let grad: Vec<f64> = gm.trainable_params().into_iter().map(|g| g / n).collect();
    Ok((total_loss / n, grad))
}

/// Largest absolute gap between the analytic gradient and a central
/// difference with step `eps`, over every trainable parameter.
pub fn grad_check(model: &RnnModel, batch: &[(Vec<usize>, bool)], eps: f64) -> Result<f64> {
    let (_, grad) = loss_and_grad(model, batch)?;
    let base = model.trainable_params();
    let mut worst = 0.0f64;
    for j in 0..base.len() {
        let mut probe = model.clone();
        let mut params = base.clone();
        params[j] = base[j] + eps;
        probe.set_trainable_params(&params);
        let (lp, _) = loss_and_grad(&probe, batch)?;
        params[j] = base[j] - eps;
        probe.set_trainable_params(&params);
        let (lm, _) = loss_and_grad(&probe, batch)?;
        let numeric = (lp - lm) / (2.0 * eps);
        worst = worst.max((grad[j] - numeric).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Alphabet;
    use crate::rnn::Activation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn batch() -> Vec<(Vec<usize>, bool)> {
        vec![
            (vec![], true),
            (vec![0], false),
            (vec![1, 1, 0], true),
            (vec![0, 1, 0, 1, 1], false),
        ]
    }

    #[test]
    fn loss_matches_the_classifier_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = RnnModel::random_init(
            CellKind::Gru,
            3,
            Alphabet::binary(),
            false,
            0.5,
            &mut rng,
        );
        let one = [(vec![1usize, 0, 1], true)];
        let (loss, _) = loss_and_grad(&m, &one).unwrap();
        let (_, p) = m.classify("101").unwrap();
        assert!((loss + p.ln()).abs() < 1e-12);
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for kind in [
            CellKind::FirstOrder(Activation::Tanh),
            CellKind::FirstOrder(Activation::Sigmoid),
            CellKind::FirstOrder(Activation::Relu),
            CellKind::SecondOrder(Activation::Tanh),
            CellKind::Lstm,
            CellKind::Gru,
        ] {
            let m = RnnModel::random_init(kind, 3, Alphabet::binary(), false, 0.4, &mut rng);
            let worst = grad_check(&m, &batch(), 1e-5).unwrap();
            assert!(worst < 1e-4, "{}: worst gap {worst}", kind.name());
        }
    }

    #[test]
    fn empty_batch_and_lm_head_rejected() {
        let m = RnnModel::zeros(CellKind::Lstm, 2, Alphabet::binary(), false);
        assert!(matches!(loss_and_grad(&m, &[]), Err(Error::EmptySample)));
        let lm = RnnModel::zeros(CellKind::Lstm, 2, Alphabet::binary(), true);
        assert!(matches!(
            loss_and_grad(&lm, &batch()),
            Err(Error::WrongHead { .. })
        ));
    }

    #[test]
    fn zero_model_gradient_is_symmetric_in_the_labels() {
        // p = 1/2 everywhere, so flipping every label flips the sign
        let m = RnnModel::zeros(CellKind::FirstOrder(Activation::Tanh), 3, Alphabet::binary(), false);
        let b: Vec<(Vec<usize>, bool)> = batch();
        let flipped: Vec<(Vec<usize>, bool)> =
            b.iter().map(|(w, l)| (w.clone(), !l)).collect();
        let (l1, g1) = loss_and_grad(&m, &b).unwrap();
        let (l2, g2) = loss_and_grad(&m, &flipped).unwrap();
        assert!((l1 - l2).abs() < 1e-12);
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a + b).abs() < 1e-12);
        }
    }
}
