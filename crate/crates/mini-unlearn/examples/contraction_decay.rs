//! Truncation error of the history-window correction as k grows.
//!
//! Trains full-batch on a well-conditioned logistic problem, computes the
//! correction dw(k) for k = 2..=12 and compares against the full-history
//! reference recurrence. The log-linear fit of the error against k should
//! match ln r, r = max(|1 - eta mu|, |1 - eta L|).
//!
//! Run: cargo run --release --example contraction_decay

use mini_unlearn::dataset::{generate_synthetic, SyntheticSpec};
use mini_unlearn::objective::{smoothness_bounds, LossConfig};
use mini_unlearn::trainer::{init_training, TrainConfig};
use mini_unlearn::unlearner::{
    delta_w_horner, reference_delta_w_full, BackingSpec, UnlearnSet,
};

fn main() {
    let mut spec = SyntheticSpec::new(500, 10, 42);
    spec.feature_scale = 0.025;
    let dataset = generate_synthetic(&spec).unwrap();
    let loss = LossConfig::logistic(0.005);
    let cfg = TrainConfig {
        steps: 120_000,
        batch_size: 500, // full batch: the recurrence is deterministic
        learning_rate: 0.01,
        history_k: 12,
        seed: 7,
        loss,
        strict: true,
    };
    let unlearn_set = UnlearnSet::from_ratio(0.04, dataset.len(), 3).unwrap();

    let started = std::time::Instant::now();
    let log = init_training(&dataset, &cfg).unwrap();
    let reference = reference_delta_w_full(&dataset, &cfg, &unlearn_set).unwrap();
    println!(
        "trained {} steps in {:.1?}; |dw_full| = {:.6e}",
        cfg.steps,
        started.elapsed(),
        reference.delta_w.norm()
    );

    let bounds = smoothness_bounds(&dataset, &loss).unwrap();
    let r = bounds.contraction_rate(cfg.learning_rate).unwrap();

    let ks: Vec<usize> = (2..=12).collect();
    let mut errors = Vec::new();
    println!("\n{:>4}  {:>14}  {:>14}", "k", "e(k)", "r^k * |dw(T-k)|");
    for &k in &ks {
        let res = delta_w_horner(&log, &dataset, &unlearn_set, k, BackingSpec::Exact).unwrap();
        let err = (&res.delta_w - &reference.delta_w).norm();
        let ref_norm = reference.delta_w_norms[cfg.steps - k - 1];
        println!("{k:>4}  {err:>14.6e}  {:>14.6e}", r.powi(k as i32) * ref_norm);
        errors.push(err);
    }

    // least-squares slope of ln e(k) on k
    let n = ks.len() as f64;
    let mean_k = ks.iter().sum::<usize>() as f64 / n;
    let mean_ln = errors.iter().map(|e| e.ln()).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, e) in ks.iter().zip(&errors) {
        num += (*k as f64 - mean_k) * (e.ln() - mean_ln);
        den += (*k as f64 - mean_k).powi(2);
    }
    let slope = num / den;
    println!(
        "\nfitted slope {slope:.6e}, ln r = {:.6e}, deviation {:.2}%",
        r.ln(),
        (slope / r.ln() - 1.0).abs() * 100.0
    );
}
