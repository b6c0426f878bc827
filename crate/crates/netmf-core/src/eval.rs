//! Multi-label vertex classification: one-vs-rest L2-regularized logistic
//! regression fitted by L-BFGS, known-label-count top-k prediction, and
//! Micro/Macro-F1 over repeated train/test splits.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::LabelSet;

/// Sweep configuration.
#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub ratios: Vec<f64>,
    pub repeats: usize,
    pub seed: u64,
    /// L2 penalty strength on the non-intercept weights.
    pub l2: f64,
    /// Gradient-norm tolerance of the per-label fits.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            ratios: (1..=9).map(|i| i as f64 / 10.0).collect(),
            repeats: 10,
            seed: 42,
            l2: 1.0,
            tol: 1e-6,
            max_iter: 1_000,
        }
    }
}

/// Deterministic train/test split of the labeled vertices.
/// Train size is round(ratio · count).
pub fn split(labels: &LabelSet, ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::validation(format!(
            "training ratio must lie in (0, 1), got {ratio}"
        )));
    }
    let mut vertices = labels.labeled_vertices();
    let count = vertices.len();
    let train_size = (ratio * count as f64).round() as usize;
    if train_size == 0 || train_size == count {
        return Err(Error::validation(format!(
            "ratio {ratio} leaves an empty train or test side for {count} labeled vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vertices.shuffle(&mut rng);
    let test = vertices.split_off(train_size);
    Ok((vertices, test))
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// loss(w) = Σ_i ln(1 + exp(−y_i·x_iᵀw)) + (λ/2)·‖w_without_intercept‖².
/// The last coordinate of w is the unpenalized intercept; `x` already
/// carries the all-ones column.
fn logistic_value_grad(x: &DMatrix<f64>, y: &[f64], w: &DVector<f64>, l2: f64) -> (f64, DVector<f64>) {
    let margins = x * w;
    let mut loss = 0.0;
    let mut glin = DVector::<f64>::zeros(x.nrows());
    for i in 0..x.nrows() {
        let t = y[i] * margins[i];
        loss += softplus(-t);
        // d/dm ln(1+e^{-ym}) = -y·sigma(-ym)
        glin[i] = -y[i] / (1.0 + t.exp());
    }
    let mut grad = x.tr_mul(&glin);
    let d = w.len() - 1;
    for j in 0..d {
        loss += 0.5 * l2 * w[j] * w[j];
        grad[j] += l2 * w[j];
    }
    (loss, grad)
}

/// L-BFGS (memory 10) with Armijo backtracking, started at w = 0.
/// Deterministic; converges to gradient norm ≤ tol or errors with the
/// achieved norm.
fn fit_logistic(
    x: &DMatrix<f64>,
    y: &[f64],
    l2: f64,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    const MEMORY: usize = 10;
    let dim = x.ncols();
    let mut w = DVector::<f64>::zeros(dim);
    let (mut f, mut g) = logistic_value_grad(x, y, &w, l2);
    let mut s_hist: Vec<DVector<f64>> = Vec::new();
    let mut y_hist: Vec<DVector<f64>> = Vec::new();
    let mut rho_hist: Vec<f64> = Vec::new();

    for iter in 0..max_iter {
        let gnorm = g.norm();
        if gnorm <= tol {
            return Ok(w);
        }
        // two-loop recursion
        let mut q = g.clone();
        let k = s_hist.len();
        let mut alpha = vec![0.0; k];
        for i in (0..k).rev() {
            alpha[i] = rho_hist[i] * s_hist[i].dot(&q);
            q -= &y_hist[i] * alpha[i];
        }
        if let (Some(s_last), Some(y_last)) = (s_hist.last(), y_hist.last()) {
            let gamma = s_last.dot(y_last) / y_last.dot(y_last);
            q *= gamma;
        }
        for i in 0..k {
            let beta = rho_hist[i] * y_hist[i].dot(&q);
            q += &s_hist[i] * (alpha[i] - beta);
        }
        let mut p = -q;
        let mut slope = g.dot(&p);
        if slope >= 0.0 {
            // not a descent direction; fall back to steepest descent
            p = -g.clone();
            slope = -gnorm * gnorm;
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        let mut step = if iter == 0 { 1.0 / gnorm.max(1.0) } else { 1.0 };
        let mut accepted = false;
        for _ in 0..60 {
            let w_new = &w + &p * step;
            let (f_new, g_new) = logistic_value_grad(x, y, &w_new, l2);
            if f_new <= f + 1e-4 * step * slope {
                let s = &w_new - &w;
                let yv = &g_new - &g;
                let sy = s.dot(&yv);
                if sy > 1e-12 * s.norm() * yv.norm() {
                    if s_hist.len() == MEMORY {
                        s_hist.remove(0);
                        y_hist.remove(0);
                        rho_hist.remove(0);
                    }
                    rho_hist.push(1.0 / sy);
                    s_hist.push(s);
                    y_hist.push(yv);
                }
                w = w_new;
                f = f_new;
                g = g_new;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::convergence(format!(
                "logistic line search stalled at gradient norm {gnorm:.3e} (tol {tol:.1e})"
            )));
        }
    }
    Err(Error::convergence(format!(
        "logistic fit did not reach gradient norm {tol:.1e} within {max_iter} iterations \
         (achieved {:.3e})",
        g.norm()
    )))
}

/// Per-label weight vectors (including intercept); labels without a positive
/// training example are skipped and score −∞ at prediction.
#[derive(Debug, Clone)]
pub struct OneVsRestModel {
    weights: Vec<Option<DVector<f64>>>,
    dim: usize,
}

impl OneVsRestModel {
    pub fn n_labels(&self) -> usize {
        self.weights.len()
    }

    pub fn skipped_labels(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter_map(|(l, w)| w.is_none().then_some(l))
            .collect()
    }

    /// Decision scores for one feature row, −∞ for skipped labels.
    pub fn scores(&self, features: &[f64]) -> Vec<f64> {
        assert_eq!(features.len(), self.dim);
        self.weights
            .iter()
            .map(|w| match w {
                Some(w) => {
                    let mut s = w[self.dim]; // intercept
                    for (j, &x) in features.iter().enumerate() {
                        s += w[j] * x;
                    }
                    s
                }
                None => f64::NEG_INFINITY,
            })
            .collect()
    }
}

fn augmented_rows(features: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    let d = features.ncols();
    let mut x = DMatrix::<f64>::zeros(rows.len(), d + 1);
    for (i, &v) in rows.iter().enumerate() {
        for j in 0..d {
            x[(i, j)] = features[(v, j)];
        }
        x[(i, d)] = 1.0;
    }
    x
}

/// Fit one regularized logistic regression per label on the training
/// vertices. `features` is indexed by vertex id (row per vertex).
pub fn train_one_vs_rest(
    features: &DMatrix<f64>,
    labels: &LabelSet,
    train: &[usize],
    config: &EvalConfig,
) -> Result<OneVsRestModel> {
    if train.is_empty() {
        return Err(Error::validation("empty training set"));
    }
    for &v in train {
        if v >= features.nrows() {
            return Err(Error::validation(format!(
                "training vertex {v} has no embedding row"
            )));
        }
    }
    let x = augmented_rows(features, train);
    let mut weights = Vec::with_capacity(labels.n_labels());
    for l in 0..labels.n_labels() {
        let y: Vec<f64> = train
            .iter()
            .map(|v| {
                if labels.labels_of(*v).map(|s| s.contains(&l)).unwrap_or(false) {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect();
        if !y.iter().any(|&v| v > 0.0) {
            weights.push(None);
            continue;
        }
        let w = fit_logistic(&x, &y, config.l2, config.tol, config.max_iter)?;
        weights.push(Some(w));
    }
    Ok(OneVsRestModel {
        weights,
        dim: features.ncols(),
    })
}

/// Predict the k_v highest-scoring labels per vertex; ties broken by the
/// lower label index; k_v larger than the label count is clipped.
pub fn predict_topk(
    model: &OneVsRestModel,
    features: &DMatrix<f64>,
    vertices: &[usize],
    k: &[usize],
) -> Vec<BTreeSet<usize>> {
    assert_eq!(vertices.len(), k.len());
    let n_labels = model.n_labels();
    vertices
        .iter()
        .zip(k)
        .map(|(&v, &kv)| {
            let row: Vec<f64> = (0..features.ncols()).map(|j| features[(v, j)]).collect();
            let scores = model.scores(&row);
            let mut order: Vec<usize> = (0..n_labels).collect();
            order.sort_by(|&a, &b| {
                scores[b]
                    .partial_cmp(&scores[a])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            order.into_iter().take(kv.min(n_labels)).collect()
        })
        .collect()
}

/// (Micro-F1, Macro-F1), both in percent. Micro pools TP/FP/FN globally;
/// Macro is the unweighted mean over all labels, counting a label with no
/// truth and no predictions as 0.
pub fn f1_scores(
    predictions: &[BTreeSet<usize>],
    truth: &[BTreeSet<usize>],
    n_labels: usize,
) -> (f64, f64) {
    assert_eq!(predictions.len(), truth.len());
    let mut tp = vec![0u64; n_labels];
    let mut fp = vec![0u64; n_labels];
    let mut fnn = vec![0u64; n_labels];
    for (pred, tru) in predictions.iter().zip(truth) {
        for &l in pred {
            if tru.contains(&l) {
                tp[l] += 1;
            } else {
                fp[l] += 1;
            }
        }
        for &l in tru {
            if !pred.contains(&l) {
                fnn[l] += 1;
            }
        }
    }
    let (tps, fps, fns): (u64, u64, u64) = (
        tp.iter().sum(),
        fp.iter().sum(),
        fnn.iter().sum(),
    );
    let micro = if 2 * tps + fps + fns == 0 {
        0.0
    } else {
        2.0 * tps as f64 / (2 * tps + fps + fns) as f64
    };
    let mut macro_sum = 0.0;
    for l in 0..n_labels {
        let denom = 2 * tp[l] + fp[l] + fnn[l];
        if denom > 0 {
            macro_sum += 2.0 * tp[l] as f64 / denom as f64;
        }
    }
    let macro_f1 = if n_labels == 0 {
        0.0
    } else {
        macro_sum / n_labels as f64
    };
    (100.0 * micro, 100.0 * macro_f1)
}

/// Mean and std of both metrics per training ratio.
#[derive(Debug, Clone)]
pub struct EvalRow {
    pub ratio: f64,
    pub micro_mean: f64,
    pub micro_std: f64,
    pub macro_mean: f64,
    pub macro_std: f64,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    /// Labels skipped in at least one repeat for lack of positive examples.
    pub skipped_labels: BTreeSet<usize>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream seed for (ratio index, repeat index) derived from the master seed.
pub fn derive_seed(master: u64, a: u64, b: u64) -> u64 {
    splitmix64(master ^ splitmix64(a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b))
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// The full prediction protocol: for each ratio and repeat, split, fit,
/// predict with the true per-vertex label counts, and score.
pub fn evaluate(
    features: &DMatrix<f64>,
    labels: &LabelSet,
    config: &EvalConfig,
) -> Result<EvalReport> {
    if labels.is_empty() {
        return Err(Error::validation("label set is empty"));
    }
    for v in labels.labeled_vertices() {
        if v >= features.nrows() {
            return Err(Error::validation(format!(
                "labeled vertex {v} has no embedding row"
            )));
        }
    }
    if config.repeats == 0 {
        return Err(Error::validation("repeats must be at least 1"));
    }
    let mut rows = Vec::with_capacity(config.ratios.len());
    let mut skipped = BTreeSet::new();
    for (ri, &ratio) in config.ratios.iter().enumerate() {
        let mut micros = Vec::with_capacity(config.repeats);
        let mut macros = Vec::with_capacity(config.repeats);
        for rep in 0..config.repeats {
            let seed = derive_seed(config.seed, ri as u64, rep as u64);
            let (train, test) = split(labels, ratio, seed)?;
            let model = train_one_vs_rest(features, labels, &train, config)?;
            skipped.extend(model.skipped_labels());
            let truth: Vec<BTreeSet<usize>> = test
                .iter()
                .map(|v| labels.labels_of(*v).cloned().unwrap_or_default())
                .collect();
            let k: Vec<usize> = truth.iter().map(|t| t.len().max(1)).collect();
            let predictions = predict_topk(&model, features, &test, &k);
            let (micro, macro_f1) = f1_scores(&predictions, &truth, labels.n_labels());
            micros.push(micro);
            macros.push(macro_f1);
        }
        let (micro_mean, micro_std) = mean_std(&micros);
        let (macro_mean, macro_std) = mean_std(&macros);
        rows.push(EvalRow {
            ratio,
            micro_mean,
            micro_std,
            macro_mean,
            macro_std,
        });
    }
    Ok(EvalReport {
        rows,
        skipped_labels: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn toy_labels(assignments: &[(usize, &[usize])], n_labels: usize, n: usize) -> LabelSet {
        let map: BTreeMap<usize, BTreeSet<usize>> = assignments
            .iter()
            .map(|&(v, ls)| (v, ls.iter().copied().collect()))
            .collect();
        let tokens = (0..n_labels).map(|l| format!("L{l}")).collect();
        LabelSet::new(map, tokens, n).unwrap()
    }

    /// Two well-separated gaussian blobs in 2-d, one label each.
    fn blobs(per_class: usize, seed: u64) -> (DMatrix<f64>, LabelSet) {
        let noise = crate::netmf::random_embedding(2 * per_class, 2, seed);
        let mut x = DMatrix::<f64>::zeros(2 * per_class, 2);
        let mut assignments = Vec::new();
        for i in 0..2 * per_class {
            let class = i / per_class;
            let center = if class == 0 { -4.0 } else { 4.0 };
            x[(i, 0)] = center + 0.3 * noise[(i, 0)];
            x[(i, 1)] = center + 0.3 * noise[(i, 1)];
            assignments.push((i, class));
        }
        let map: BTreeMap<usize, BTreeSet<usize>> = assignments
            .into_iter()
            .map(|(v, c)| (v, BTreeSet::from([c])))
            .collect();
        let labels = LabelSet::new(map, vec!["a".into(), "b".into()], 2 * per_class).unwrap();
        (x, labels)
    }

    #[test]
    fn split_sizes_and_determinism() {
        let labels = toy_labels(
            &(0..10).map(|v| (v, &[0usize][..])).collect::<Vec<_>>(),
            1,
            10,
        );
        let (train, test) = split(&labels, 0.5, 1).unwrap();
        assert_eq!((train.len(), test.len()), (5, 5));
        let (train2, _) = split(&labels, 0.5, 1).unwrap();
        assert_eq!(train, train2);
        let (t1, t9) = split(&labels, 0.1, 2).unwrap();
        assert_eq!((t1.len(), t9.len()), (1, 9));
        assert!(split(&labels, 0.01, 3).is_err()); // rounds to empty train
    }

    #[test]
    fn separable_blobs_train_to_full_accuracy() {
        let (x, labels) = blobs(20, 7);
        let config = EvalConfig::default();
        let train: Vec<usize> = (0..40).collect();
        let model = train_one_vs_rest(&x, &labels, &train, &config).unwrap();
        let k = vec![1usize; 40];
        let preds = predict_topk(&model, &x, &train, &k);
        let truth: Vec<BTreeSet<usize>> = train
            .iter()
            .map(|v| labels.labels_of(*v).unwrap().clone())
            .collect();
        let (micro, macro_f1) = f1_scores(&preds, &truth, 2);
        assert_eq!(micro, 100.0);
        assert_eq!(macro_f1, 100.0);
    }

    #[test]
    fn degenerate_identical_features_fit_intercept() {
        let x = DMatrix::<f64>::from_element(6, 3, 0.5);
        let labels = toy_labels(
            &[(0, &[0][..]), (1, &[0][..]), (2, &[0][..]), (3, &[1][..]), (4, &[1][..]), (5, &[1][..])],
            2,
            6,
        );
        let config = EvalConfig::default();
        let model = train_one_vs_rest(&x, &labels, &(0..6).collect::<Vec<_>>(), &config).unwrap();
        // constant features: every vertex gets the same score per label
        let s0 = model.scores(&[0.5, 0.5, 0.5]);
        let s1 = model.scores(&[0.5, 0.5, 0.5]);
        assert_eq!(s0, s1);
    }

    #[test]
    fn optimizer_beats_zero_weights() {
        let (x, labels) = blobs(15, 3);
        let train: Vec<usize> = (0..30).collect();
        let aug = augmented_rows(&x, &train);
        let y: Vec<f64> = train
            .iter()
            .map(|v| if labels.labels_of(*v).unwrap().contains(&0) { 1.0 } else { -1.0 })
            .collect();
        let w = fit_logistic(&aug, &y, 1.0, 1e-6, 1_000).unwrap();
        let (loss_fit, grad) = logistic_value_grad(&aug, &y, &w, 1.0);
        let (loss_zero, _) = logistic_value_grad(&aug, &y, &DVector::zeros(3), 1.0);
        assert!(loss_fit <= loss_zero);
        assert!(grad.norm() <= 1e-6);
    }

    #[test]
    fn label_without_positives_is_skipped_and_never_predicted() {
        let (x, labels_two) = blobs(10, 11);
        // add a third label that never appears in training
        let mut map = BTreeMap::new();
        for v in 0..20 {
            map.insert(v, labels_two.labels_of(v).unwrap().clone());
        }
        let labels = LabelSet::new(
            map,
            vec!["a".into(), "b".into(), "ghost".into()],
            20,
        )
        .unwrap();
        let config = EvalConfig::default();
        let model =
            train_one_vs_rest(&x, &labels, &(0..20).collect::<Vec<_>>(), &config).unwrap();
        assert_eq!(model.skipped_labels(), vec![2]);
        let preds = predict_topk(&model, &x, &[0, 15], &[2, 2]);
        for p in preds {
            assert!(!p.contains(&2));
        }
    }

    #[test]
    fn topk_contract_and_tie_break() {
        let model = OneVsRestModel {
            // both labels score identically: w = 0 everywhere
            weights: vec![Some(DVector::zeros(3)), Some(DVector::zeros(3))],
            dim: 2,
        };
        let x = DMatrix::<f64>::zeros(1, 2);
        let preds = predict_topk(&model, &x, &[0], &[1]);
        assert_eq!(preds[0], BTreeSet::from([0])); // lower index wins the tie
        let clipped = predict_topk(&model, &x, &[0], &[5]);
        assert_eq!(clipped[0].len(), 2); // k clipped to the label count
    }

    #[test]
    fn f1_hand_case() {
        // label A: TP=1 FP=1 FN=0; label B: TP=0 FP=0 FN=1
        let predictions = vec![
            BTreeSet::from([0]),          // correct A
            BTreeSet::from([0]),          // wrong: truth B
        ];
        let truth = vec![BTreeSet::from([0]), BTreeSet::from([1])];
        let (micro, macro_f1) = f1_scores(&predictions, &truth, 2);
        assert!((micro - 50.0).abs() < 1e-12);
        assert!((macro_f1 - 100.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn f1_identity_and_empty() {
        let truth = vec![BTreeSet::from([0, 1]), BTreeSet::from([1])];
        let (micro, macro_f1) = f1_scores(&truth.clone(), &truth, 2);
        assert_eq!((micro, macro_f1), (100.0, 100.0));
        let empty = vec![BTreeSet::new(), BTreeSet::new()];
        let (micro, macro_f1) = f1_scores(&empty, &truth, 2);
        assert_eq!((micro, macro_f1), (0.0, 0.0));
    }

    #[test]
    fn micro_invariant_under_label_permutation() {
        let predictions = vec![BTreeSet::from([0, 2]), BTreeSet::from([1])];
        let truth = vec![BTreeSet::from([0]), BTreeSet::from([1, 2])];
        let (micro, _) = f1_scores(&predictions, &truth, 3);
        let perm = |s: &BTreeSet<usize>| s.iter().map(|&l| (l + 1) % 3).collect::<BTreeSet<_>>();
        let (micro_p, _) = f1_scores(
            &predictions.iter().map(perm).collect::<Vec<_>>(),
            &truth.iter().map(perm).collect::<Vec<_>>(),
            3,
        );
        assert!((micro - micro_p).abs() < 1e-12);
    }

    #[test]
    fn evaluate_is_deterministic() {
        let (x, labels) = blobs(12, 5);
        let config = EvalConfig {
            ratios: vec![0.3, 0.5],
            repeats: 3,
            ..Default::default()
        };
        let r1 = evaluate(&x, &labels, &config).unwrap();
        let r2 = evaluate(&x, &labels, &config).unwrap();
        for (a, b) in r1.rows.iter().zip(&r2.rows) {
            assert_eq!(a.micro_mean, b.micro_mean);
            assert_eq!(a.macro_std, b.macro_std);
        }
        assert!(r1.rows[0].micro_mean >= 90.0, "{}", r1.rows[0].micro_mean);
    }

    #[test]
    fn unregularized_predictions_invariant_to_feature_scaling() {
        let (x, labels) = blobs(12, 19);
        let config = EvalConfig {
            l2: 0.0,
            ..Default::default()
        };
        let train: Vec<usize> = (0..24).step_by(2).collect();
        let test: Vec<usize> = (1..24).step_by(2).collect();
        let k = vec![1usize; test.len()];
        let model = train_one_vs_rest(&x, &labels, &train, &config).unwrap();
        let preds = predict_topk(&model, &x, &test, &k);
        let scaled = &x * 37.5;
        let model_s = train_one_vs_rest(&scaled, &labels, &train, &config).unwrap();
        let preds_s = predict_topk(&model_s, &scaled, &test, &k);
        assert_eq!(preds, preds_s);
    }
}
