//! Basis-product evaluation: every step operator is reconstructed from
//! products with an orthonormal basis computed as independent tasks, then
//! the expanded correction is assembled. Agrees with the sequential
//! Horner evaluation regardless of worker count.
//!
//! Run: cargo run --release --example parallel_basis

use mini_unlearn::dataset::{generate_synthetic, SyntheticSpec};
use mini_unlearn::objective::{LossConfig, DEFAULT_DIM_GUARD};
use mini_unlearn::trainer::{init_training, TrainConfig};
use mini_unlearn::unlearner::{
    delta_w_horner, delta_w_parallel, BackingSpec, BasisSet, UnlearnSet,
};

fn main() {
    let mut spec = SyntheticSpec::new(500, 10, 42);
    spec.feature_scale = 1.0;
    let dataset = generate_synthetic(&spec).unwrap();
    let cfg = TrainConfig {
        steps: 200,
        batch_size: 32,
        learning_rate: 0.01,
        history_k: 10,
        seed: 7,
        loss: LossConfig::logistic(0.005),
        strict: true,
    };
    let log = init_training(&dataset, &cfg).unwrap();
    let deletion = UnlearnSet::from_ratio(0.05, dataset.len(), 3).unwrap();

    let horner = delta_w_horner(&log, &dataset, &deletion, 10, BackingSpec::Exact).unwrap();
    println!("horner:             |dw| = {:.12e}", horner.delta_w.norm());

    for (basis_name, basis) in [
        ("standard basis", BasisSet::standard(10)),
        ("random orthonormal", BasisSet::random_orthonormal(10, 99)),
    ] {
        for threads in [1, 4] {
            let par = delta_w_parallel(
                &log,
                &dataset,
                &deletion,
                10,
                &basis,
                BackingSpec::Exact,
                threads,
                DEFAULT_DIM_GUARD,
            )
            .unwrap();
            println!(
                "parallel ({basis_name}, {threads} threads): max |diff| vs horner = {:.3e}",
                (&par.delta_w - &horner.delta_w).amax()
            );
        }
    }
}
