//! Training with minimal per-step history and contraction-mapping
//! unlearning for L2-regularized convex models.
//!
//! The pipeline: [`trainer::init_training`] runs seeded mini-batch SGD and
//! records the last-k step history (batch indices, parameter snapshots,
//! gradient sums). Given a deletion request, [`unlearner::delta_w_horner`]
//! or [`unlearner::delta_w_parallel`] computes the parameter correction
//! from that history alone, with per-step Hessian products realized either
//! exactly ([`objective::exact_hvp`]) or through the compact quasi-Newton
//! form ([`lbfgs`]). [`trainer::retrain_oracle`] provides the retraining
//! reference and [`mia`] the membership-inference evaluation.
//!
//! Every capability has a runnable example:
//!
//! ```text
//! cargo run --release --example train_and_unlearn     # end-to-end pipeline
//! cargo run --release --example quadratic_exactness   # machine-precision oracle
//! cargo run --release --example contraction_decay     # truncation error vs k
//! cargo run --release --example parallel_basis        # basis-product mode
//! cargo run --release --example compact_hvp           # quasi-Newton products
//! cargo run --release --example membership_inference  # attack before/after
//! cargo run --release --example ablate_history        # accuracy vs k
//! ```
//!
//! The `mini-unlearn` binary wraps the same calls behind `train`,
//! `unlearn`, `retrain`, `evaluate` and `ablate-k` subcommands.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod lbfgs;
pub mod mia;
pub mod objective;
pub mod persist;
pub mod trainer;
pub mod unlearner;

pub use dataset::{Dataset, SyntheticSpec};
pub use error::{Error, Result};
pub use objective::{LossConfig, LossKind, ParamVector, SmoothnessBounds};
pub use trainer::{TrainConfig, TrainingLog};
pub use unlearner::{UnlearnResult, UnlearnSet};
