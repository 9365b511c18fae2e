//! End-to-end pipeline: train with history capture, delete 5% of the
//! training set, compare the corrected model against full retraining.
//!
//! Run: cargo run --release --example train_and_unlearn

use mini_unlearn::dataset::generate_digit_pair;
use mini_unlearn::objective::{test_accuracy, LossConfig};
use mini_unlearn::trainer::{init_training, retrain_oracle, TrainConfig};
use mini_unlearn::unlearner::{unlearn, UnlearnOptions, UnlearnSet};

fn main() {
    let train = generate_digit_pair(2000, 16, 11).unwrap();
    let test = generate_digit_pair(1000, 16, 12).unwrap();
    let loss = LossConfig::logistic(0.005);
    let cfg = TrainConfig {
        steps: 500,
        batch_size: 64,
        learning_rate: 0.5,
        history_k: 10,
        seed: 5,
        loss,
        strict: true,
    };

    let log = init_training(&train, &cfg).unwrap();
    println!(
        "replay deviation of the log: {:.3e}",
        log.verify_replay(&train).unwrap()
    );

    let deletion = UnlearnSet::from_ratio(0.05, train.len(), 9).unwrap();
    let result = unlearn(&log, &train, &deletion, &UnlearnOptions::default()).unwrap();
    let retrained = retrain_oracle(&train, &deletion, &cfg).unwrap();

    let acc = |w| test_accuracy(w, &test, &loss).unwrap();
    println!("deleted {} of {} samples", deletion.len(), train.len());
    println!("original   accuracy: {:.4}", acc(&log.final_w));
    println!("unlearned  accuracy: {:.4}", acc(&result.unlearned_w));
    println!("retrained  accuracy: {:.4}", acc(&retrained));
    println!(
        "|dw| = {:.3e}, contraction rate r = {:.6}, r^k scale = {:.3e}",
        result.delta_w.norm(),
        result.r_estimate.unwrap(),
        result.bound.unwrap()
    );
    println!(
        "distance to retrained: {:.3e} (unlearned) vs {:.3e} (original)",
        (&result.unlearned_w - &retrained).norm(),
        (&log.final_w - &retrained).norm()
    );
}
