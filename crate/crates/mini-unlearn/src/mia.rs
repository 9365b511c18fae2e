//! Simplified membership-inference evaluation.
//!
//! The attack is a logistic classifier over three per-sample features of
//! the target model: objective value, predicted probability of the true
//! class, and absolute decision margin. It is trained deterministically by
//! full-batch gradient descent on standardized features. Reports give
//! member-prediction precision/recall separately over the unlearned and
//! retained populations, each paired against a holdout of non-members.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::objective::{per_sample_loss, LossConfig, LossKind, ParamVector};

pub const ATTACK_FEATURES: usize = 3;

/// One attack-training or evaluation point.
#[derive(Debug, Clone)]
pub struct AttackExample {
    /// (per-sample loss, confidence in the true class, |margin|)
    pub features: [f64; ATTACK_FEATURES],
    pub member: bool,
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Extracts attack features for every sample of the member and non-member
/// slices under the target model.
pub fn build_attack_set(
    model_w: &ParamVector,
    members: &Dataset,
    nonmembers: &Dataset,
    cfg: &LossConfig,
) -> Result<Vec<AttackExample>> {
    if cfg.kind != LossKind::Logistic {
        return Err(Error::UnsupportedMetric("quadratic"));
    }
    if members.is_empty() || nonmembers.is_empty() {
        return Err(Error::Config("attack slices must be non-empty".into()));
    }
    let mut out = Vec::with_capacity(members.len() + nonmembers.len());
    for (slice, member) in [(members, true), (nonmembers, false)] {
        for i in 0..slice.len() {
            out.push(AttackExample {
                features: attack_features(model_w, slice, i, cfg)?,
                member,
            });
        }
    }
    Ok(out)
}

fn attack_features(
    w: &ParamVector,
    ds: &Dataset,
    index: usize,
    cfg: &LossConfig,
) -> Result<[f64; ATTACK_FEATURES]> {
    let loss = per_sample_loss(w, ds, index, cfg)?;
    let margin = w.dot(ds.feature(index)?);
    let s = sigmoid(margin);
    let y = ds.label(index)?;
    let confidence = if y == 1.0 { s } else { 1.0 - s };
    Ok([loss, confidence, margin.abs()])
}

/// Logistic attack classifier with internal feature standardization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttackModel {
    /// [w1, w2, w3, bias] over standardized features.
    pub weights: Vec<f64>,
    pub feature_mean: [f64; ATTACK_FEATURES],
    pub feature_std: [f64; ATTACK_FEATURES],
    pub seed: u64,
}

impl AttackModel {
    fn standardized(&self, features: &[f64; ATTACK_FEATURES]) -> [f64; ATTACK_FEATURES] {
        let mut z = [0.0; ATTACK_FEATURES];
        for d in 0..ATTACK_FEATURES {
            z[d] = (features[d] - self.feature_mean[d]) / self.feature_std[d];
        }
        z
    }

    /// Probability the sample is a member.
    pub fn score(&self, features: &[f64; ATTACK_FEATURES]) -> f64 {
        let z = self.standardized(features);
        let mut t = self.weights[ATTACK_FEATURES];
        for (w, zd) in self.weights.iter().zip(&z) {
            t += w * zd;
        }
        sigmoid(t)
    }

    pub fn predict(&self, features: &[f64; ATTACK_FEATURES]) -> bool {
        self.score(features) >= 0.5
    }
}

/// Trains the attack classifier by full-batch gradient descent (300
/// steps). The seed only randomizes the tiny initialization, so training
/// is deterministic given (examples, seed).
pub fn train_attack(examples: &[AttackExample], seed: u64) -> Result<AttackModel> {
    let members = examples.iter().filter(|e| e.member).count();
    if members == 0 || members == examples.len() {
        return Err(Error::Config(
            "attack training needs both member and non-member examples".into(),
        ));
    }
    if let Some(bad) = examples
        .iter()
        .position(|e| e.features.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::Data(format!(
            "non-finite attack feature in example {bad}"
        )));
    }

    let n = examples.len() as f64;
    let mut mean = [0.0; ATTACK_FEATURES];
    let mut var = [0.0; ATTACK_FEATURES];
    for e in examples {
        for (m, f) in mean.iter_mut().zip(&e.features) {
            *m += f / n;
        }
    }
    for e in examples {
        for (v, (m, f)) in var.iter_mut().zip(mean.iter().zip(&e.features)) {
            *v += (f - m).powi(2) / n;
        }
    }
    let mut std = [0.0; ATTACK_FEATURES];
    for d in 0..ATTACK_FEATURES {
        std[d] = var[d].sqrt().max(1e-12);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = DVector::from_fn(ATTACK_FEATURES + 1, |_, _| {
        rng.random_range(-1e-3..1e-3)
    });

    // Standardized features keep the Hessian bounded by ~|z|^2/4 + l2;
    // a fixed rate of 0.5 is safely inside 1/L for these magnitudes.
    let rate = 0.5;
    let l2 = 1e-4;
    for _ in 0..300 {
        let mut grad = DVector::zeros(ATTACK_FEATURES + 1);
        for e in examples {
            let z = {
                let mut z = [0.0; ATTACK_FEATURES];
                for d in 0..ATTACK_FEATURES {
                    z[d] = (e.features[d] - mean[d]) / std[d];
                }
                z
            };
            let mut t = weights[ATTACK_FEATURES];
            for d in 0..ATTACK_FEATURES {
                t += weights[d] * z[d];
            }
            let resid = sigmoid(t) - if e.member { 1.0 } else { 0.0 };
            for d in 0..ATTACK_FEATURES {
                grad[d] += resid * z[d] / n;
            }
            grad[ATTACK_FEATURES] += resid / n;
        }
        grad.axpy(l2, &weights, 1.0);
        weights.axpy(-rate, &grad, 1.0);
    }

    Ok(AttackModel {
        weights: weights.iter().copied().collect(),
        feature_mean: mean,
        feature_std: std,
        seed,
    })
}

/// Area under the ROC curve of member scores against non-member scores,
/// with midrank tie handling.
pub fn auc(member_scores: &[f64], nonmember_scores: &[f64]) -> f64 {
    if member_scores.is_empty() || nonmember_scores.is_empty() {
        return 0.5;
    }
    let mut wins = 0.0;
    for &m in member_scores {
        for &nm in nonmember_scores {
            if m > nm {
                wins += 1.0;
            } else if m == nm {
                wins += 0.5;
            }
        }
    }
    wins / (member_scores.len() as f64 * nonmember_scores.len() as f64)
}

/// Mann-Whitney rank-sum z-statistic of `xs` against `ys` (normal
/// approximation, midranks for ties). Positive values mean `xs` ranks
/// higher.
pub fn rank_sum_z(xs: &[f64], ys: &[f64]) -> f64 {
    let n1 = xs.len() as f64;
    let n2 = ys.len() as f64;
    if n1 == 0.0 || n2 == 0.0 {
        return 0.0;
    }
    let mut all: Vec<(f64, bool)> = xs
        .iter()
        .map(|&v| (v, true))
        .chain(ys.iter().map(|&v| (v, false)))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut rank_sum_x = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j + 1 < all.len() && all[j + 1].0 == all[i].0 {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for item in &all[i..=j] {
            if item.1 {
                rank_sum_x += midrank;
            }
        }
        i = j + 1;
    }
    let u = rank_sum_x - n1 * (n1 + 1.0) / 2.0;
    let mean_u = n1 * n2 / 2.0;
    let var_u = n1 * n2 * (n1 + n2 + 1.0) / 12.0;
    (u - mean_u) / var_u.sqrt()
}

/// Precision and recall of boolean member predictions against ground
/// truth. Precision is 0 when nothing is predicted positive.
pub fn precision_recall(predictions: &[bool], truths: &[bool]) -> (f64, f64) {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (&pred, &truth) in predictions.iter().zip(truths) {
        match (pred, truth) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    (precision, recall)
}

/// Attack metrics over the unlearned and retained populations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MiaReport {
    pub precision_unlearned: f64,
    pub recall_unlearned: f64,
    pub precision_retained: f64,
    pub recall_retained: f64,
    /// AUC of attack scores: members (unlearned + retained) vs holdout.
    pub attack_auc: f64,
    pub n_unlearned: usize,
    pub n_retained: usize,
    pub n_holdout: usize,
}

/// Scores the target model with a trained attack. Each population is
/// evaluated against the same holdout non-members: members of
/// `unlearned` + `holdout`, then members of `retained` + `holdout`.
pub fn mia_report(
    attack: &AttackModel,
    target_w: &ParamVector,
    unlearned: &Dataset,
    retained: &Dataset,
    holdout: &Dataset,
    cfg: &LossConfig,
) -> Result<MiaReport> {
    if unlearned.is_empty() || retained.is_empty() || holdout.is_empty() {
        return Err(Error::Config("mia populations must be non-empty".into()));
    }
    let collect = |ds: &Dataset| -> Result<Vec<[f64; ATTACK_FEATURES]>> {
        (0..ds.len())
            .map(|i| attack_features(target_w, ds, i, cfg))
            .collect()
    };
    let f_unl = collect(unlearned)?;
    let f_ret = collect(retained)?;
    let f_hold = collect(holdout)?;

    let population = |members: &[[f64; ATTACK_FEATURES]]| {
        let mut preds = Vec::new();
        let mut truths = Vec::new();
        for f in members {
            preds.push(attack.predict(f));
            truths.push(true);
        }
        for f in &f_hold {
            preds.push(attack.predict(f));
            truths.push(false);
        }
        precision_recall(&preds, &truths)
    };
    let (precision_unlearned, recall_unlearned) = population(&f_unl);
    let (precision_retained, recall_retained) = population(&f_ret);

    let member_scores: Vec<f64> = f_unl
        .iter()
        .chain(&f_ret)
        .map(|f| attack.score(f))
        .collect();
    let holdout_scores: Vec<f64> = f_hold.iter().map(|f| attack.score(f)).collect();

    Ok(MiaReport {
        precision_unlearned,
        recall_unlearned,
        precision_retained,
        recall_retained,
        attack_auc: auc(&member_scores, &holdout_scores),
        n_unlearned: unlearned.len(),
        n_retained: retained.len(),
        n_holdout: holdout.len(),
    })
}

/// Attack scores of every sample in a slice under the target model.
pub fn attack_scores(
    attack: &AttackModel,
    target_w: &ParamVector,
    slice: &Dataset,
    cfg: &LossConfig,
) -> Result<Vec<f64>> {
    (0..slice.len())
        .map(|i| Ok(attack.score(&attack_features(target_w, slice, i, cfg)?)))
        .collect()
}
