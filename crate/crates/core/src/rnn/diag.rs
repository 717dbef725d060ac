use crate::error::{Error, Result};

use super::cell::HiddenState;
use super::model::{CellKind, CellWeights, RnnModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzReport {
    /// Frobenius norm of the recurrent matrix.
    pub bound: f64,
    /// True iff the bound is strictly below 1.
    pub contractive: bool,
}

/// ‖W‖_F of a first-order cell's recurrent matrix. With a 1-Lipschitz
/// activation this bounds the Lipschitz constant of the transition map.
pub fn lipschitz_bound(model: &RnnModel) -> Result<LipschitzReport> {
    match (&model.kind, &model.weights) {
        (CellKind::FirstOrder(_), CellWeights::FirstOrder { w, .. }) => {
            let bound = w.frobenius_norm();
            Ok(LipschitzReport { bound, contractive: bound < 1.0 })
        }
        _ => Err(Error::DiagnosticUnavailable),
    }
}

/// Max over sampled pairs of ‖step(x,σ) − step(y,σ)‖₂ / ‖x − y‖₂.
pub fn empirical_lipschitz(
    model: &RnnModel,
    pairs: &[(Vec<f64>, Vec<f64>)],
    sym: usize,
) -> Result<f64> {
    if !matches!(model.kind, CellKind::FirstOrder(_)) {
        return Err(Error::DiagnosticUnavailable);
    }
    if pairs.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut worst: f64 = 0.0;
    for (x, y) in pairs {
        let denom = crate::linalg::l2_dist(x, y);
        if denom == 0.0 {
            continue;
        }
        let fx = model.step(&HiddenState::plain(x.clone()), sym)?;
        let fy = model.step(&HiddenState::plain(y.clone()), sym)?;
        let num = crate::linalg::l2_dist(&fx.h, &fy.h);
        worst = worst.max(num / denom);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Alphabet;
    use crate::linalg::Mat;
    use crate::rnn::model::Activation;
    use rand::{Rng, SeedableRng};

    fn first_order_with_w(w: Mat, act: Activation) -> RnnModel {
        let d = w.rows;
        let mut m = RnnModel::zeros(CellKind::FirstOrder(act), d, Alphabet::binary(), false);
        if let CellWeights::FirstOrder { w: wm, .. } = &mut m.weights {
            *wm = w;
        }
        m
    }

    #[test]
    fn bound_examples() {
        let m = first_order_with_w(Mat::zeros(3, 3), Activation::Tanh);
        let r = lipschitz_bound(&m).unwrap();
        assert_eq!(r.bound, 0.0);
        assert!(r.contractive);

        let mut id = Mat::zeros(3, 3);
        for i in 0..3 {
            *id.at_mut(i, i) = 1.0;
        }
        let m = first_order_with_w(id, Activation::Relu);
        let r = lipschitz_bound(&m).unwrap();
        assert!((r.bound - 3.0f64.sqrt()).abs() < 1e-15);
        assert!(!r.contractive);

        let m = first_order_with_w(
            Mat::from_rows(vec![vec![0.3, 0.4], vec![0.0, 0.0]]),
            Activation::Sigmoid,
        );
        let r = lipschitz_bound(&m).unwrap();
        assert!((r.bound - 0.5).abs() < 1e-15);
        assert!(r.contractive);
    }

    #[test]
    fn unsupported_kinds_rejected() {
        let m = RnnModel::zeros(CellKind::Lstm, 2, Alphabet::binary(), false);
        assert!(matches!(lipschitz_bound(&m), Err(Error::DiagnosticUnavailable)));
    }

    #[test]
    fn identity_relu_in_positive_orthant_is_isometric() {
        let mut id = Mat::zeros(2, 2);
        *id.at_mut(0, 0) = 1.0;
        *id.at_mut(1, 1) = 1.0;
        let m = first_order_with_w(id, Activation::Relu);
        let pairs = vec![(vec![0.2, 0.3], vec![0.7, 0.9]), (vec![1.0, 2.0], vec![3.0, 1.0])];
        let l = empirical_lipschitz(&m, &pairs, 0).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_never_exceeds_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for act in [Activation::Relu, Activation::Tanh, Activation::Sigmoid] {
            let d = 4;
            let mut w = Mat::zeros(d, d);
            for v in &mut w.data {
                *v = rng.gen_range(-1.0..1.0);
            }
            let m = first_order_with_w(w, act);
            let bound = lipschitz_bound(&m).unwrap().bound;
            let pairs: Vec<_> = (0..1000)
                .map(|_| {
                    let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    let y: Vec<f64> = (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    (x, y)
                })
                .collect();
            let l = empirical_lipschitz(&m, &pairs, 1).unwrap();
            assert!(l <= bound + 1e-12, "{act:?}: {l} > {bound}");
        }
    }

    #[test]
    fn empty_sample_rejected() {
        let m = first_order_with_w(Mat::zeros(2, 2), Activation::Tanh);
        assert!(matches!(empirical_lipschitz(&m, &[], 0), Err(Error::EmptySample)));
    }
}
