//! Trainable objectives: L2-regularized binary logistic regression and an
//! L2-regularized quadratic (least-squares) loss used as a verification
//! oracle, with per-sample gradients, exact Hessians and Hessian-vector
//! products.
//!
//! The regularizer is attributed per sample: each per-sample objective is
//! `loss(w; x_j, y_j) + l2/2 * |w|^2`, so the mean gradient over a batch is
//! the gradient of the regularized batch-mean objective and plain SGD on
//! these sums is SGD on the regularized loss.
//!
//! All functions are pure; a shared read-only [`Dataset`] can be used from
//! multiple threads.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Model parameters, dimension equal to the dataset feature dimension.
pub type ParamVector = DVector<f64>;

/// Default cap on the dimension for operations that materialize p x p
/// matrices.
pub const DEFAULT_DIM_GUARD: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Logistic,
    Quadratic,
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LossKind::Logistic => write!(f, "logistic"),
            LossKind::Quadratic => write!(f, "quadratic"),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LossConfig {
    pub kind: LossKind,
    /// L2 coefficient lambda >= 0; strong convexity requires lambda > 0.
    pub l2_coeff: f64,
}

impl LossConfig {
    pub fn logistic(l2_coeff: f64) -> Self {
        LossConfig {
            kind: LossKind::Logistic,
            l2_coeff,
        }
    }

    pub fn quadratic(l2_coeff: f64) -> Self {
        LossConfig {
            kind: LossKind::Quadratic,
            l2_coeff,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l2_coeff < 0.0 || !self.l2_coeff.is_finite() {
            return Err(Error::Config("l2 coefficient must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Strong-convexity constant mu and smoothness constant L of the per-sample
/// objectives (hence of every batch mean).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SmoothnessBounds {
    pub mu: f64,
    pub big_l: f64,
}

impl SmoothnessBounds {
    /// Contraction rate r = max(|1 - eta*mu|, |1 - eta*L|); requires r < 1.
    pub fn contraction_rate(&self, eta: f64) -> Result<f64> {
        let r = (1.0 - eta * self.mu).abs().max((1.0 - eta * self.big_l).abs());
        if r >= 1.0 {
            return Err(Error::ContractionViolated { r });
        }
        Ok(r)
    }
}

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn check_dims(w: &ParamVector, dataset: &Dataset) -> Result<()> {
    if w.len() != dataset.dim() {
        return Err(Error::DimensionMismatch {
            context: "parameter vector",
            expected: dataset.dim(),
            got: w.len(),
        });
    }
    Ok(())
}

/// Residual-style scalar multiplying x in the gradient: (s - y) for
/// logistic, (w'x - y) for quadratic.
fn gradient_coeff(w: &ParamVector, x: &DVector<f64>, y: f64, kind: LossKind) -> f64 {
    let margin = w.dot(x);
    match kind {
        LossKind::Logistic => sigmoid(margin) - y,
        LossKind::Quadratic => margin - y,
    }
}

/// Curvature scalar multiplying x x' in the Hessian: s(1-s) for logistic,
/// 1 for quadratic.
fn hessian_coeff(w: &ParamVector, x: &DVector<f64>, kind: LossKind) -> f64 {
    match kind {
        LossKind::Logistic => {
            let s = sigmoid(w.dot(x));
            s * (1.0 - s)
        }
        LossKind::Quadratic => 1.0,
    }
}

/// Gradient of the per-sample objective, including the per-sample
/// regularization term `l2 * w`.
pub fn per_sample_gradient(
    w: &ParamVector,
    dataset: &Dataset,
    index: usize,
    cfg: &LossConfig,
) -> Result<ParamVector> {
    check_dims(w, dataset)?;
    let x = dataset.feature(index)?;
    let y = dataset.label(index)?;
    let c = gradient_coeff(w, x, y, cfg.kind);
    let mut grad = x * c;
    grad.axpy(cfg.l2_coeff, w, 1.0);
    Ok(grad)
}

/// Per-sample objective value (loss plus `l2/2 * |w|^2`).
pub fn per_sample_loss(
    w: &ParamVector,
    dataset: &Dataset,
    index: usize,
    cfg: &LossConfig,
) -> Result<f64> {
    check_dims(w, dataset)?;
    let x = dataset.feature(index)?;
    let y = dataset.label(index)?;
    let margin = w.dot(x);
    let data_term = match cfg.kind {
        LossKind::Logistic => {
            // -[y ln s + (1-y) ln(1-s)] in the overflow-safe margin form.
            let max0 = margin.max(0.0);
            max0 - margin * y + (1.0 + (-margin.abs()).exp()).ln()
        }
        LossKind::Quadratic => 0.5 * (margin - y) * (margin - y),
    };
    Ok(data_term + 0.5 * cfg.l2_coeff * w.norm_squared())
}

/// Sum of per-sample gradients in ascending index order.
pub fn batch_gradient_sum(
    w: &ParamVector,
    dataset: &Dataset,
    indices: &[usize],
    cfg: &LossConfig,
) -> Result<ParamVector> {
    if indices.is_empty() {
        return Err(Error::EmptyBatch);
    }
    check_dims(w, dataset)?;
    let mut order: Vec<usize> = indices.to_vec();
    order.sort_unstable();
    let mut sum = DVector::zeros(w.len());
    for &j in &order {
        let x = dataset.feature(j)?;
        let y = dataset.label(j)?;
        let c = gradient_coeff(w, x, y, cfg.kind);
        sum.axpy(c, x, 1.0);
    }
    sum.axpy(cfg.l2_coeff * order.len() as f64, w, 1.0);
    Ok(sum)
}

/// Materialized sum of per-sample Hessians over `indices`. The matrix is
/// built on the upper triangle and mirrored, so it is symmetric bit for
/// bit. Guarded against large p.
pub fn exact_hessian(
    w: &ParamVector,
    dataset: &Dataset,
    indices: &[usize],
    cfg: &LossConfig,
    dim_guard: usize,
) -> Result<DMatrix<f64>> {
    if indices.is_empty() {
        return Err(Error::EmptyBatch);
    }
    check_dims(w, dataset)?;
    let p = w.len();
    if p > dim_guard {
        return Err(Error::Capacity(format!(
            "materializing a {p}x{p} Hessian exceeds the dimension guard {dim_guard}"
        )));
    }
    let mut order: Vec<usize> = indices.to_vec();
    order.sort_unstable();
    let mut upper = DMatrix::zeros(p, p);
    for &j in &order {
        let x = dataset.feature(j)?;
        let c = hessian_coeff(w, x, cfg.kind);
        for col in 0..p {
            let cx = c * x[col];
            for row in 0..=col {
                upper[(row, col)] += x[row] * cx;
            }
        }
    }
    let reg = cfg.l2_coeff * order.len() as f64;
    for d in 0..p {
        upper[(d, d)] += reg;
    }
    for col in 0..p {
        for row in 0..col {
            upper[(col, row)] = upper[(row, col)];
        }
    }
    Ok(upper)
}

/// `exact_hessian(...) * v` without materializing the matrix; valid for
/// any dimension. Returns the exact zero vector when `v` is zero.
pub fn exact_hvp(
    w: &ParamVector,
    dataset: &Dataset,
    indices: &[usize],
    cfg: &LossConfig,
    v: &ParamVector,
) -> Result<ParamVector> {
    if indices.is_empty() {
        return Err(Error::EmptyBatch);
    }
    check_dims(w, dataset)?;
    if v.len() != w.len() {
        return Err(Error::DimensionMismatch {
            context: "hvp vector",
            expected: w.len(),
            got: v.len(),
        });
    }
    let mut order: Vec<usize> = indices.to_vec();
    order.sort_unstable();
    let mut out = DVector::zeros(w.len());
    for &j in &order {
        let x = dataset.feature(j)?;
        let c = hessian_coeff(w, x, cfg.kind);
        out.axpy(c * x.dot(v), x, 1.0);
    }
    out.axpy(cfg.l2_coeff * order.len() as f64, v, 1.0);
    Ok(out)
}

/// Conservative (mu, L) for the per-sample objectives:
/// logistic mu = l2, L = l2 + 0.25 * max |x|^2;
/// quadratic mu = l2 (+ min |x|^2 when p = 1), L = l2 + max |x|^2.
pub fn smoothness_bounds(dataset: &Dataset, cfg: &LossConfig) -> Result<SmoothnessBounds> {
    if cfg.l2_coeff <= 0.0 {
        return Err(Error::StrongConvexityUnavailable);
    }
    let max_sq = dataset.max_row_norm().powi(2);
    let (mu, big_l) = match cfg.kind {
        LossKind::Logistic => (cfg.l2_coeff, cfg.l2_coeff + 0.25 * max_sq),
        LossKind::Quadratic => {
            // x x' has smallest eigenvalue 0 unless p = 1.
            let min_curv = if dataset.dim() == 1 {
                (0..dataset.len())
                    .map(|i| dataset.feature(i).unwrap().norm_squared())
                    .fold(f64::INFINITY, f64::min)
            } else {
                0.0
            };
            (cfg.l2_coeff + min_curv, cfg.l2_coeff + max_sq)
        }
    };
    Ok(SmoothnessBounds { mu, big_l })
}

/// Fraction of samples with thresholded prediction (sigmoid >= 0.5 maps to
/// class 1) equal to the label. Logistic only.
pub fn test_accuracy(w: &ParamVector, dataset: &Dataset, cfg: &LossConfig) -> Result<f64> {
    if cfg.kind != LossKind::Logistic {
        return Err(Error::UnsupportedMetric("quadratic"));
    }
    check_dims(w, dataset)?;
    dataset.check_labels(LossKind::Logistic)?;
    let mut correct = 0usize;
    for i in 0..dataset.len() {
        let margin = w.dot(dataset.feature(i)?);
        let pred = if margin >= 0.0 { 1.0 } else { 0.0 };
        if pred == dataset.label(i)? {
            correct += 1;
        }
    }
    Ok(correct as f64 / dataset.len() as f64)
}

/// Mean per-sample objective over the whole dataset.
pub fn mean_loss(w: &ParamVector, dataset: &Dataset, cfg: &LossConfig) -> Result<f64> {
    let mut total = 0.0;
    for i in 0..dataset.len() {
        total += per_sample_loss(w, dataset, i, cfg)?;
    }
    Ok(total / dataset.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, SyntheticSpec};
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tiny_dataset() -> Dataset {
        Dataset::from_rows(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.6, 0.8]],
            vec![1.0, 0.0, 1.0],
        )
        .unwrap()
    }

    /// Central finite difference of the per-sample objective.
    fn fd_gradient(
        w: &ParamVector,
        ds: &Dataset,
        index: usize,
        cfg: &LossConfig,
        h: f64,
    ) -> ParamVector {
        let mut g = DVector::zeros(w.len());
        for d in 0..w.len() {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[d] += h;
            wm[d] -= h;
            let fp = per_sample_loss(&wp, ds, index, cfg).unwrap();
            let fm = per_sample_loss(&wm, ds, index, cfg).unwrap();
            g[d] = (fp - fm) / (2.0 * h);
        }
        g
    }

    #[test]
    fn logistic_gradient_at_origin() {
        let ds = tiny_dataset();
        let cfg = LossConfig::logistic(0.0);
        let w = DVector::zeros(2);
        let g = per_sample_gradient(&w, &ds, 0, &cfg).unwrap();
        assert_eq!(g.as_slice(), &[-0.5, 0.0]);
    }

    #[test]
    fn quadratic_gradient_at_origin_is_neg_y_x() {
        let ds = tiny_dataset();
        let cfg = LossConfig::quadratic(0.0);
        let w = DVector::zeros(2);
        for i in 0..ds.len() {
            let g = per_sample_gradient(&w, &ds, i, &cfg).unwrap();
            let expected = ds.feature(i).unwrap() * (-ds.label(i).unwrap());
            assert_eq!(g, expected);
        }
    }

    #[test]
    fn gradient_matches_finite_differences_on_random_draws() {
        let spec = SyntheticSpec::new(30, 6, 77);
        let ds = generate_synthetic(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for cfg in [LossConfig::logistic(0.01), LossConfig::quadratic(0.01)] {
            for _ in 0..100 {
                let w = DVector::from_fn(6, |_, _| rng.random_range(-1.0..1.0));
                let idx = rng.random_range(0..ds.len());
                let g = per_sample_gradient(&w, &ds, idx, &cfg).unwrap();
                let fd = fd_gradient(&w, &ds, idx, &cfg, 1e-6);
                let denom = g.norm().max(1.0);
                assert!(
                    (&g - &fd).norm() / denom < 1e-6,
                    "fd mismatch: {:?} vs {:?}",
                    g,
                    fd
                );
            }
        }
    }

    #[test]
    fn gradient_dimension_mismatch_errors() {
        let ds = tiny_dataset();
        let cfg = LossConfig::logistic(0.0);
        let w = DVector::zeros(5);
        assert!(matches!(
            per_sample_gradient(&w, &ds, 0, &cfg),
            Err(Error::DimensionMismatch { .. })
        ));
        let w2 = DVector::zeros(2);
        assert!(matches!(
            per_sample_gradient(&w2, &ds, 10, &cfg),
            Err(Error::IndexOutOfRange(10))
        ));
    }

    #[test]
    fn batch_sum_matches_naive_loop() {
        let spec = SyntheticSpec::new(40, 5, 11);
        let ds = generate_synthetic(&spec).unwrap();
        let cfg = LossConfig::logistic(0.005);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let w = DVector::from_fn(5, |_, _| rng.random_range(-0.5..0.5));
        let mut indices: Vec<usize> = (0..20).map(|_| rng.random_range(0..40)).collect();
        indices.sort_unstable();
        indices.dedup();
        let sum = batch_gradient_sum(&w, &ds, &indices, &cfg).unwrap();
        let mut naive = DVector::zeros(5);
        for &j in &indices {
            naive += per_sample_gradient(&w, &ds, j, &cfg).unwrap();
        }
        // Ascending-order accumulation in both paths; the split of the
        // regularizer term differs, so allow rounding.
        assert_relative_eq!(sum, naive, epsilon = 1e-12);
    }

    #[test]
    fn batch_sum_singleton_and_additivity() {
        let ds = tiny_dataset();
        let cfg = LossConfig::logistic(0.01);
        let w = DVector::from_vec(vec![0.2, -0.4]);
        let g0 = per_sample_gradient(&w, &ds, 0, &cfg).unwrap();
        let g1 = per_sample_gradient(&w, &ds, 1, &cfg).unwrap();
        assert_eq!(batch_gradient_sum(&w, &ds, &[0], &cfg).unwrap(), g0);
        let pair = batch_gradient_sum(&w, &ds, &[0, 1], &cfg).unwrap();
        assert_relative_eq!(pair, g0 + g1, epsilon = 1e-14);
        assert!(matches!(
            batch_gradient_sum(&w, &ds, &[], &cfg),
            Err(Error::EmptyBatch)
        ));
    }

    #[test]
    fn quadratic_hessian_single_sample() {
        let ds = tiny_dataset();
        let cfg = LossConfig::quadratic(0.005);
        let w = DVector::zeros(2);
        let h = exact_hessian(&w, &ds, &[0], &cfg, DEFAULT_DIM_GUARD).unwrap();
        assert_eq!(h[(0, 0)], 1.005);
        assert_eq!(h[(0, 1)], 0.0);
        assert_eq!(h[(1, 0)], 0.0);
        assert_eq!(h[(1, 1)], 0.005);
    }

    #[test]
    fn logistic_hessian_at_origin_is_quarter_gram() {
        let ds = tiny_dataset();
        let lambda = 0.01;
        let cfg = LossConfig::logistic(lambda);
        let w = DVector::zeros(2);
        let idx = [0usize, 1, 2];
        let h = exact_hessian(&w, &ds, &idx, &cfg, DEFAULT_DIM_GUARD).unwrap();
        let mut expected = DMatrix::zeros(2, 2);
        for &j in &idx {
            let x = ds.feature(j).unwrap();
            expected += 0.25 * x * x.transpose();
        }
        expected += DMatrix::identity(2, 2) * (lambda * idx.len() as f64);
        assert_relative_eq!(h, expected, epsilon = 1e-15);
    }

    #[test]
    fn hessian_is_bitwise_symmetric() {
        let spec = SyntheticSpec::new(25, 7, 21);
        let ds = generate_synthetic(&spec).unwrap();
        let cfg = LossConfig::logistic(0.005);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = DVector::from_fn(7, |_, _| rng.random_range(-1.0..1.0));
        let idx: Vec<usize> = (0..10).collect();
        let h = exact_hessian(&w, &ds, &idx, &cfg, DEFAULT_DIM_GUARD).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(h[(i, j)].to_bits(), h[(j, i)].to_bits());
            }
        }
    }

    #[test]
    fn hessian_matches_finite_difference_of_batch_gradient() {
        let spec = SyntheticSpec::new(20, 4, 9);
        let ds = generate_synthetic(&spec).unwrap();
        let cfg = LossConfig::logistic(0.02);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = DVector::from_fn(4, |_, _| rng.random_range(-0.8..0.8));
        let idx: Vec<usize> = (0..8).collect();
        let h = exact_hessian(&w, &ds, &idx, &cfg, DEFAULT_DIM_GUARD).unwrap();
        let step = 1e-5;
        let mut max_err = 0.0f64;
        for d in 0..4 {
            let mut wp = w.clone();
            let mut wm = w.clone();
            wp[d] += step;
            wm[d] -= step;
            let gp = batch_gradient_sum(&wp, &ds, &idx, &cfg).unwrap();
            let gm = batch_gradient_sum(&wm, &ds, &idx, &cfg).unwrap();
            let col = (gp - gm) / (2.0 * step);
            for r in 0..4 {
                max_err = max_err.max((h[(r, d)] - col[r]).abs());
            }
        }
        assert!(max_err <= 1e-5, "max abs err {max_err}");
    }

    #[test]
    fn hessian_dim_guard() {
        let rows: Vec<Vec<f64>> = vec![(0..600).map(|i| i as f64 / 600.0).collect()];
        let ds = Dataset::from_rows(rows, vec![1.0]).unwrap();
        let cfg = LossConfig::quadratic(0.005);
        let w = DVector::zeros(600);
        let err = exact_hessian(&w, &ds, &[0], &cfg, DEFAULT_DIM_GUARD).unwrap_err();
        assert_eq!(err.exit_code(), 5);
        // but the matrix-free product still works
        let v = DVector::from_element(600, 1.0);
        exact_hvp(&w, &ds, &[0], &cfg, &v).unwrap();
    }

    #[test]
    fn hvp_matches_materialized_matrix() {
        let spec = SyntheticSpec::new(30, 8, 123);
        let ds = generate_synthetic(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for cfg in [LossConfig::logistic(0.005), LossConfig::quadratic(0.005)] {
            let w = DVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0));
            let idx: Vec<usize> = (0..12).collect();
            let h = exact_hessian(&w, &ds, &idx, &cfg, DEFAULT_DIM_GUARD).unwrap();
            for _ in 0..20 {
                let v = DVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0));
                let fast = exact_hvp(&w, &ds, &idx, &cfg, &v).unwrap();
                let slow = &h * &v;
                assert!((&fast - &slow).norm() / slow.norm().max(1e-30) <= 1e-12);
            }
        }
    }

    #[test]
    fn hvp_zero_vector_is_exact_zero() {
        let ds = tiny_dataset();
        let cfg = LossConfig::logistic(0.5);
        let w = DVector::from_vec(vec![0.3, 0.7]);
        let v = DVector::zeros(2);
        let out = exact_hvp(&w, &ds, &[0, 1, 2], &cfg, &v).unwrap();
        assert!(out.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn hvp_eigenvector_of_single_sample() {
        let ds = tiny_dataset();
        let lambda = 0.005;
        let cfg = LossConfig::quadratic(lambda);
        let w = DVector::zeros(2);
        let x = ds.feature(0).unwrap().clone();
        let out = exact_hvp(&w, &ds, &[0], &cfg, &x).unwrap();
        let expected = &x * (x.norm_squared() + lambda);
        assert_relative_eq!(out, expected, epsilon = 1e-15);
    }

    #[test]
    fn smoothness_bounds_unit_rows() {
        let mut spec = SyntheticSpec::new(30, 5, 2);
        spec.feature_scale = 1.0;
        let ds = generate_synthetic(&spec).unwrap();
        let b = smoothness_bounds(&ds, &LossConfig::logistic(0.005)).unwrap();
        assert_relative_eq!(b.mu, 0.005, epsilon = 1e-15);
        assert_relative_eq!(b.big_l, 0.255, epsilon = 1e-12);
    }

    #[test]
    fn smoothness_bounds_quadratic_single_sample() {
        let ds = Dataset::from_rows(vec![vec![1.0, 0.0]], vec![1.0]).unwrap();
        let b = smoothness_bounds(&ds, &LossConfig::quadratic(0.005)).unwrap();
        assert_relative_eq!(b.big_l, 1.005, epsilon = 1e-15);
        assert_relative_eq!(b.mu, 0.005, epsilon = 1e-15);
    }

    #[test]
    fn smoothness_bounds_require_positive_lambda() {
        let ds = tiny_dataset();
        assert!(matches!(
            smoothness_bounds(&ds, &LossConfig::logistic(0.0)),
            Err(Error::StrongConvexityUnavailable)
        ));
    }

    #[test]
    fn bounds_cover_hessian_spectrum() {
        let spec = SyntheticSpec::new(60, 6, 31);
        let ds = generate_synthetic(&spec).unwrap();
        let cfg = LossConfig::logistic(0.005);
        let b = smoothness_bounds(&ds, &cfg).unwrap();
        let w = DVector::zeros(6);
        let idx: Vec<usize> = (0..30).collect();
        let h = exact_hessian(&w, &ds, &idx, &cfg, DEFAULT_DIM_GUARD).unwrap() / idx.len() as f64;
        let eigen = nalgebra::SymmetricEigen::new(h);
        for ev in eigen.eigenvalues.iter() {
            assert!(*ev >= cfg.l2_coeff - 1e-12, "eigenvalue {ev} below mu");
            assert!(*ev <= b.big_l + 1e-9, "eigenvalue {ev} above L");
        }
    }

    #[test]
    fn accuracy_constant_predictor_on_balanced_set() {
        let ds = Dataset::from_rows(
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]],
            vec![1.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        let cfg = LossConfig::logistic(0.0);
        let acc = test_accuracy(&DVector::zeros(2), &ds, &cfg).unwrap();
        // w = 0 predicts class 1 everywhere (sigmoid(0) >= 0.5).
        assert_eq!(acc, 0.5);
    }

    #[test]
    fn accuracy_perfectly_separable() {
        let ds = Dataset::from_rows(vec![vec![1.0], vec![-1.0]], vec![1.0, 0.0]).unwrap();
        let cfg = LossConfig::logistic(0.0);
        let w = DVector::from_vec(vec![5.0]);
        assert_eq!(test_accuracy(&w, &ds, &cfg).unwrap(), 1.0);
    }

    #[test]
    fn accuracy_rejects_quadratic() {
        let ds = tiny_dataset();
        let cfg = LossConfig::quadratic(0.0);
        assert!(matches!(
            test_accuracy(&DVector::zeros(2), &ds, &cfg),
            Err(Error::UnsupportedMetric(_))
        ));
    }
}
