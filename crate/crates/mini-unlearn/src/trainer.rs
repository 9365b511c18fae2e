//! Mini-batch SGD with last-k history capture, plus the retraining
//! recursion used as the unlearning reference.
//!
//! A "step" advances one batch; `steps` counts batch updates, not dataset
//! passes. Batches are drawn uniformly without replacement from a seeded
//! ChaCha8 stream, so identical configs give bitwise-identical logs.
//! Parameters start from the zero vector.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::objective::{batch_gradient_sum, smoothness_bounds, LossConfig, ParamVector};
use crate::unlearner::UnlearnSet;

/// Name recorded in manifests for the batch-sampling generator.
pub const PRNG_NAME: &str = "chacha8";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Total SGD steps T.
    pub steps: usize,
    /// Batch size B.
    pub batch_size: usize,
    /// Learning rate eta.
    pub learning_rate: f64,
    /// History window k: snapshots are kept for steps T-k+1 ..= T.
    pub history_k: usize,
    pub seed: u64,
    pub loss: LossConfig,
    /// Reject configs with eta * L >= 1 instead of proceeding.
    #[serde(default)]
    pub strict: bool,
}

impl TrainConfig {
    /// Validates the config against a dataset. Returns `eta * L` when the
    /// smoothness bound is available so callers can surface a warning for
    /// non-contractive settings.
    pub fn validate(&self, dataset: &Dataset) -> Result<Option<f64>> {
        if self.steps == 0 {
            return Err(Error::Config("steps must be >= 1".into()));
        }
        if self.batch_size == 0 || self.batch_size > dataset.len() {
            return Err(Error::Config(format!(
                "batch size must be in 1..={}, got {}",
                dataset.len(),
                self.batch_size
            )));
        }
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if self.history_k == 0 || self.history_k > self.steps {
            return Err(Error::Config(format!(
                "history window must be in 1..={}, got {}",
                self.steps, self.history_k
            )));
        }
        self.loss.validate()?;
        dataset.check_labels(self.loss.kind)?;
        let eta_l = if self.loss.l2_coeff > 0.0 {
            let bounds = smoothness_bounds(dataset, &self.loss)?;
            Some(self.learning_rate * bounds.big_l)
        } else {
            None
        };
        if self.strict {
            if let Some(el) = eta_l {
                if el >= 1.0 {
                    return Err(Error::Config(format!(
                        "eta * L = {el:.4} >= 1: H(l) is not contractive (strict mode)"
                    )));
                }
            }
        }
        Ok(eta_l)
    }
}

/// Snapshot of one SGD step: the batch it used, the parameters it started
/// from, and the full-batch gradient sum that produced the update.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    /// 1-based step index l.
    pub step: usize,
    /// Sorted sample indices of the batch B_l.
    pub batch_indices: Vec<usize>,
    /// w_{l-1}.
    pub w_before: ParamVector,
    /// Sum over the batch of per-sample gradients at w_{l-1}.
    pub grad_sum_full: ParamVector,
}

/// Final parameters plus the last-k step history needed for unlearning.
#[derive(Debug, Clone)]
pub struct TrainingLog {
    pub config: TrainConfig,
    pub final_w: ParamVector,
    /// Records for steps T-k+1 ..= T in ascending order.
    pub history: Vec<StepRecord>,
    pub dataset_fingerprint: String,
    /// Preprocessing notes copied from the dataset at training time.
    pub preprocessing: Vec<String>,
}

impl TrainingLog {
    /// First step covered by the history window.
    pub fn history_start_step(&self) -> usize {
        self.config.steps - self.config.history_k + 1
    }

    /// Parameter snapshots w_{T-k} ..= w_T (history `w_before`s plus the
    /// final parameters); k+1 vectors.
    pub fn snapshots(&self) -> Vec<&ParamVector> {
        let mut snaps: Vec<&ParamVector> = self.history.iter().map(|r| &r.w_before).collect();
        snaps.push(&self.final_w);
        snaps
    }

    /// Structural invariants: k records, contiguous steps ending at T.
    pub fn check(&self) -> Result<()> {
        if self.history.len() != self.config.history_k {
            return Err(Error::Data(format!(
                "history has {} records, expected {}",
                self.history.len(),
                self.config.history_k
            )));
        }
        let start = self.history_start_step();
        for (i, rec) in self.history.iter().enumerate() {
            if rec.step != start + i {
                return Err(Error::Data(format!(
                    "history step {} out of order (expected {})",
                    rec.step,
                    start + i
                )));
            }
            if rec.batch_indices.len() != self.config.batch_size {
                return Err(Error::Data(format!(
                    "step {} batch has {} indices, expected {}",
                    rec.step,
                    rec.batch_indices.len(),
                    self.config.batch_size
                )));
            }
        }
        Ok(())
    }

    /// Replays SGD over the recorded window and returns the deviation of
    /// the replayed parameters from `final_w`.
    pub fn verify_replay(&self, dataset: &Dataset) -> Result<f64> {
        self.check()?;
        let eta = self.config.learning_rate;
        let scale = eta / self.config.batch_size as f64;
        let mut w = self.history[0].w_before.clone();
        for rec in &self.history {
            let grad = batch_gradient_sum(&w, dataset, &rec.batch_indices, &self.config.loss)?;
            w.axpy(-scale, &grad, 1.0);
        }
        Ok((w - &self.final_w).norm())
    }
}

/// Draws `batch` indices uniformly without replacement, returned in
/// ascending order. Advances the generator state.
pub fn sample_batch(rng: &mut ChaCha8Rng, n: usize, batch: usize) -> Result<Vec<usize>> {
    if batch == 0 || batch > n {
        return Err(Error::Config(format!(
            "batch size must be in 1..={n}, got {batch}"
        )));
    }
    let mut indices: Vec<usize> = rand::seq::index::sample(rng, n, batch).into_vec();
    indices.sort_unstable();
    Ok(indices)
}

/// Runs T steps of mini-batch SGD from the zero vector, capturing the
/// last-k step records.
pub fn init_training(dataset: &Dataset, cfg: &TrainConfig) -> Result<TrainingLog> {
    cfg.validate(dataset)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let scale = cfg.learning_rate / cfg.batch_size as f64;
    let capture_from = cfg.steps - cfg.history_k + 1;

    let mut w: ParamVector = DVector::zeros(dataset.dim());
    let mut history = Vec::with_capacity(cfg.history_k);

    for step in 1..=cfg.steps {
        let batch = sample_batch(&mut rng, dataset.len(), cfg.batch_size)?;
        let grad_sum = batch_gradient_sum(&w, dataset, &batch, &cfg.loss)?;
        let w_before = if step >= capture_from {
            Some(w.clone())
        } else {
            None
        };
        w.axpy(-scale, &grad_sum, 1.0);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericFailure {
                step,
                msg: "parameters diverged to non-finite values".into(),
            });
        }
        if let Some(w_before) = w_before {
            history.push(StepRecord {
                step,
                batch_indices: batch,
                w_before,
                grad_sum_full: grad_sum,
            });
        }
    }

    let log = TrainingLog {
        config: cfg.clone(),
        final_w: w,
        history,
        dataset_fingerprint: dataset.fingerprint(),
        preprocessing: dataset.preprocessing().to_vec(),
    };
    log.check()?;
    Ok(log)
}

/// Retraining recursion: replays the same seeded batch draws, drops
/// unlearned members from every batch and rescales each step by
/// 1/(B - dB_l). With an empty unlearn set this is bitwise identical to
/// `init_training`.
pub fn retrain_oracle(
    dataset: &Dataset,
    unlearn: &UnlearnSet,
    cfg: &TrainConfig,
) -> Result<ParamVector> {
    cfg.validate(dataset)?;
    unlearn.check_bounds(dataset.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let eta = cfg.learning_rate;
    let mut w: ParamVector = DVector::zeros(dataset.dim());

    for step in 1..=cfg.steps {
        let batch = sample_batch(&mut rng, dataset.len(), cfg.batch_size)?;
        let retained: Vec<usize> = batch
            .iter()
            .copied()
            .filter(|j| !unlearn.contains(*j))
            .collect();
        if retained.is_empty() {
            return Err(Error::DegenerateBatch { step });
        }
        let grad_sum = batch_gradient_sum(&w, dataset, &retained, &cfg.loss)?;
        w.axpy(-(eta / retained.len() as f64), &grad_sum, 1.0);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericFailure {
                step,
                msg: "retraining diverged to non-finite values".into(),
            });
        }
    }
    Ok(w)
}
