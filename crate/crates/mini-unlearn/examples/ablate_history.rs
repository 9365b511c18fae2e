//! Test accuracy of the unlearned model as the history window k varies.
//!
//! Run: cargo run --release --example ablate_history

use mini_unlearn::dataset::generate_digit_pair;
use mini_unlearn::objective::{test_accuracy, LossConfig};
use mini_unlearn::trainer::{init_training, retrain_oracle, TrainConfig};
use mini_unlearn::unlearner::{delta_w_horner, BackingSpec, UnlearnSet};

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
    let deletion = UnlearnSet::from_ratio(0.05, train.len(), 9).unwrap();

    println!("k,accuracy,delta_w_norm");
    for k in [2usize, 4, 6, 8, 10] {
        let result = delta_w_horner(&log, &train, &deletion, k, BackingSpec::Exact).unwrap();
        let acc = test_accuracy(&result.unlearned_w, &test, &loss).unwrap();
        println!("{k},{acc:.4},{:.6e}", result.delta_w.norm());
    }
    let retrained = retrain_oracle(&train, &deletion, &cfg).unwrap();
    println!(
        "retraining reference accuracy: {:.4}",
        test_accuracy(&retrained, &test, &loss).unwrap()
    );
}
