//! Compact quasi-Newton Hessian-vector products: m = 2 secant pairs from
//! the training trajectory against exact products, and full recovery of a
//! quadratic Hessian from p spanning pairs.
//!
//! Run: cargo run --release --example compact_hvp

use mini_unlearn::dataset::{generate_synthetic, SyntheticSpec};
use mini_unlearn::lbfgs::{build_pairs, compact_factors, hvp_compact, CurvaturePairs};
use mini_unlearn::objective::{
    batch_gradient_sum, exact_hessian, exact_hvp, LossConfig, DEFAULT_DIM_GUARD,
};
use mini_unlearn::trainer::{init_training, TrainConfig};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    // m = 2 on a logistic trajectory
    let mut spec = SyntheticSpec::new(500, 10, 40);
    spec.feature_scale = 0.025;
    let dataset = generate_synthetic(&spec).unwrap();
    let loss = LossConfig::logistic(0.005);
    let cfg = TrainConfig {
        steps: 200,
        batch_size: 25,
        learning_rate: 0.01,
        history_k: 12,
        seed: 4,
        loss,
        strict: true,
    };
    let log = init_training(&dataset, &cfg).unwrap();
    let record = log.history.last().unwrap();
    let retained = record.batch_indices.clone();
    let snaps = log.snapshots();
    let m = 2;
    let grads: Vec<_> = snaps[snaps.len() - (m + 1)..]
        .iter()
        .map(|w| batch_gradient_sum(w, &dataset, &retained, &loss).unwrap())
        .collect();
    let pairs = build_pairs(&log, &grads, m).unwrap();
    let factors = compact_factors(&pairs).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut u = DVector::from_fn(10, |_, _| rng.random_range(-1.0..1.0));
        u /= u.norm();
        let approx = hvp_compact(&factors, &pairs, &u).unwrap();
        let exact = exact_hvp(&record.w_before, &dataset, &retained, &loss, &u).unwrap();
        worst = worst.max((&approx - &exact).norm() / exact.norm());
    }
    println!("logistic, m = 2: worst relative error over 100 unit vectors = {worst:.3e}");

    // p independent conjugate pairs of a quadratic batch Hessian
    let quad = LossConfig::quadratic(0.005);
    let qds = generate_synthetic(&SyntheticSpec::new(60, 8, 50)).unwrap();
    let indices: Vec<usize> = (0..20).collect();
    let a = exact_hessian(
        &DVector::zeros(8),
        &qds,
        &indices,
        &quad,
        DEFAULT_DIM_GUARD,
    )
    .unwrap();
    let mut dirs: Vec<DVector<f64>> = Vec::new();
    for i in 0..8 {
        let mut s = DVector::zeros(8);
        s[i] = 1.0;
        for prev in &dirs {
            let a_prev = &a * prev;
            s.axpy(-s.dot(&a_prev) / prev.dot(&a_prev), prev, 1.0);
        }
        dirs.push(s);
    }
    let grads: Vec<_> = dirs.iter().map(|s| &a * s).collect();
    let full = CurvaturePairs::new(dirs, grads).unwrap();
    let f = compact_factors(&full).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let u = DVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0));
        let approx = hvp_compact(&f, &full, &u).unwrap();
        let exact = &a * &u;
        worst = worst.max((&approx - &exact).norm() / exact.norm());
    }
    println!("quadratic, m = p spanning pairs: worst relative error = {worst:.3e}");
}
