//! Membership inference on a deliberately overfit model, before and after
//! unlearning: the attack's precision over the deleted samples drops and
//! their score distribution moves toward the holdout.
//!
//! Run: cargo run --release --example membership_inference

use mini_unlearn::dataset::{generate_synthetic, SyntheticSpec};
use mini_unlearn::mia::{attack_scores, auc, build_attack_set, mia_report, train_attack};
use mini_unlearn::objective::{test_accuracy, LossConfig};
use mini_unlearn::trainer::{init_training, retrain_oracle, TrainConfig};
use mini_unlearn::unlearner::{delta_w_horner, BackingSpec, UnlearnSet};

fn main() {
    let mut spec = SyntheticSpec::new(100, 40, 101);
    spec.label_noise = 0.2;
    let train = generate_synthetic(&spec).unwrap();
    let mut hspec = SyntheticSpec::new(100, 40, 202);
    hspec.label_noise = 0.2;
    let holdout = generate_synthetic(&hspec).unwrap();
    let loss = LossConfig::logistic(1e-4);
    let cfg = TrainConfig {
        steps: 1500,
        batch_size: 25,
        learning_rate: 2.0,
        history_k: 1500,
        seed: 7,
        loss,
        strict: false,
    };
    let log = init_training(&train, &cfg).unwrap();
    println!(
        "training accuracy (memorization): {:.3}",
        test_accuracy(&log.final_w, &train, &loss).unwrap()
    );

    let deletion = UnlearnSet::from_ratio(0.25, train.len(), 3).unwrap();
    let unlearned_model =
        delta_w_horner(&log, &train, &deletion, cfg.steps, BackingSpec::Exact).unwrap();
    let retrained = retrain_oracle(&train, &deletion, &cfg).unwrap();

    let deleted = train.subset(deletion.indices()).unwrap();
    let retained_idx: Vec<usize> = (0..train.len())
        .filter(|i| !deletion.contains(*i))
        .collect();
    let retained = train.subset(&retained_idx).unwrap();
    let fit_half: Vec<usize> = (0..holdout.len() / 2).collect();
    let eval_half: Vec<usize> = (holdout.len() / 2..holdout.len()).collect();
    let holdout_fit = holdout.subset(&fit_half).unwrap();
    let holdout_eval = holdout.subset(&eval_half).unwrap();

    let examples = build_attack_set(&log.final_w, &retained, &holdout_fit, &loss).unwrap();
    let attack = train_attack(&examples, 5).unwrap();

    for (name, w) in [
        ("original", &log.final_w),
        ("mini-unlearned", &unlearned_model.unlearned_w),
        ("retrained", &retrained),
    ] {
        let report = mia_report(&attack, w, &deleted, &retained, &holdout_eval, &loss).unwrap();
        let deleted_scores = attack_scores(&attack, w, &deleted, &loss).unwrap();
        let holdout_scores = attack_scores(&attack, w, &holdout_eval, &loss).unwrap();
        println!(
            "{name:>15}: precision over deleted {:.4} (recall {:.4}), \
             over retained {:.4} (recall {:.4}), deleted-vs-holdout auc {:.4}",
            report.precision_unlearned,
            report.recall_unlearned,
            report.precision_retained,
            report.recall_retained,
            auc(&deleted_scores, &holdout_scores),
        );
    }
}
