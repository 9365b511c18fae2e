//! Machine-precision check: for quadratic loss the per-step linearization
//! is exact, so the full-history correction reproduces retraining to
//! round-off.
//!
//! Run: cargo run --release --example quadratic_exactness

use mini_unlearn::dataset::{generate_synthetic, SyntheticSpec};
use mini_unlearn::objective::LossConfig;
use mini_unlearn::trainer::{init_training, retrain_oracle, TrainConfig};
use mini_unlearn::unlearner::{delta_w_horner, BackingSpec, UnlearnSet};

fn main() {
    let dataset = generate_synthetic(&SyntheticSpec::new(200, 10, 14)).unwrap();
    let cfg = TrainConfig {
        steps: 30,
        batch_size: 20,
        learning_rate: 0.01,
        history_k: 30, // full history
        seed: 2,
        loss: LossConfig::quadratic(0.005),
        strict: false,
    };
    let log = init_training(&dataset, &cfg).unwrap();

    for ratio in [0.05, 0.10, 0.20] {
        let deletion = UnlearnSet::from_ratio(ratio, dataset.len(), 31).unwrap();
        let result =
            delta_w_horner(&log, &dataset, &deletion, cfg.steps, BackingSpec::Exact).unwrap();
        let retrained = retrain_oracle(&dataset, &deletion, &cfg).unwrap();
        let rel = (&result.unlearned_w - &retrained).norm() / retrained.norm();
        println!(
            "ratio {ratio:.2}: |dw| = {:.6e}, relative error vs retraining = {rel:.3e}",
            result.delta_w.norm()
        );
    }
}
