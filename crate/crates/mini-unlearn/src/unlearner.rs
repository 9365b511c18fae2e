//! Deletion-set correction of trained parameters from logged history.
//!
//! For a training log with last-k step records and an unlearn set, the
//! per-step correction obeys
//!
//! ```text
//! dw_l = H(l) dw_{l-1} + G(l)
//! G(l) = eta/B * ( B/(B-dB) * sum_unlearned grad - dB/(B-dB) * sum_batch grad )
//! H(l) = I - eta/(B-dB) * sum_retained hessian
//! ```
//!
//! evaluated at the logged snapshots w_{l-1}. Truncating k steps back with
//! dw = 0 and running the recurrence forward (Horner evaluation) gives the
//! parameter correction without materializing any operator. The parallel
//! mode instead materializes each H(l) from products with an orthonormal
//! basis and assembles the expanded sum; both agree to round-off.
//!
//! Strong convexity puts every eigenvalue of H(l) inside
//! [1 - eta*L, 1 - eta*mu], so the recurrence is a contraction and the
//! truncation error decays like r^k with r = max(|1-eta*mu|, |1-eta*L|).

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::lbfgs::{
    apply_h_lbfgs, compact_factors, CompactFactors, CurvaturePairs, StepScaling,
};
use crate::objective::{
    batch_gradient_sum, exact_hessian, exact_hvp, smoothness_bounds, LossConfig, ParamVector,
    SmoothnessBounds, DEFAULT_DIM_GUARD,
};
use crate::trainer::{sample_batch, StepRecord, TrainConfig, TrainingLog};

/// Sorted unique sample indices requested for deletion. May be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnlearnSet {
    indices: Vec<usize>,
}

impl UnlearnSet {
    /// Normalizes to sorted unique order and bounds-checks against the
    /// dataset size.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        let set = UnlearnSet { indices };
        set.check_bounds(n)?;
        Ok(set)
    }

    /// Draws `ceil(ratio * n)` indices uniformly at random.
    pub fn from_ratio(ratio: f64, n: usize, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&ratio) {
            return Err(Error::Config(format!(
                "unlearn ratio must lie in [0, 1], got {ratio}"
            )));
        }
        let count = (ratio * n as f64).ceil() as usize;
        if count > n {
            return Err(Error::Config("unlearn ratio selects more than n".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut indices = rand::seq::index::sample(&mut rng, n, count).into_vec();
        indices.sort_unstable();
        Ok(UnlearnSet { indices })
    }

    pub fn check_bounds(&self, n: usize) -> Result<()> {
        if let Some(&last) = self.indices.last() {
            if last >= n {
                return Err(Error::IndexOutOfRange(last));
            }
        }
        Ok(())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Deletion ratio |D_U| / n.
    pub fn ratio(&self, n: usize) -> f64 {
        self.indices.len() as f64 / n as f64
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

/// gamma = -dB / B for a batch with dB unlearned members.
pub fn gamma(batch_size: usize, delta_b: usize) -> Result<f64> {
    if delta_b >= batch_size {
        return Err(Error::DegenerateBatch { step: 0 });
    }
    Ok(-(delta_b as f64) / batch_size as f64)
}

/// gamma / (1 + gamma) = -dB / (B - dB), the retained-sum coefficient.
pub fn gamma_ratio(batch_size: usize, delta_b: usize) -> Result<f64> {
    if delta_b >= batch_size {
        return Err(Error::DegenerateBatch { step: 0 });
    }
    Ok(-(delta_b as f64) / (batch_size - delta_b) as f64)
}

fn split_batch(record: &StepRecord, unlearn: &UnlearnSet) -> (Vec<usize>, Vec<usize>) {
    let mut unlearned = Vec::new();
    let mut retained = Vec::new();
    for &j in &record.batch_indices {
        if unlearn.contains(j) {
            unlearned.push(j);
        } else {
            retained.push(j);
        }
    }
    (unlearned, retained)
}

/// Per-step gradient correction G(l), computed from the cached full-batch
/// gradient sum plus a recomputation over the (few) unlearned members only.
/// Returns the exact zero vector when the batch contains no unlearned
/// members.
pub fn compute_g(
    record: &StepRecord,
    dataset: &Dataset,
    unlearn: &UnlearnSet,
    loss: &LossConfig,
    eta: f64,
) -> Result<ParamVector> {
    let batch_size = record.batch_indices.len();
    let (unlearned, _) = split_batch(record, unlearn);
    let delta_b = unlearned.len();
    if delta_b == 0 {
        return Ok(DVector::zeros(record.w_before.len()));
    }
    if delta_b >= batch_size {
        return Err(Error::DegenerateBatch { step: record.step });
    }
    let sum_unlearned = batch_gradient_sum(&record.w_before, dataset, &unlearned, loss)?;
    let b = batch_size as f64;
    let keep = (batch_size - delta_b) as f64;
    let mut g = sum_unlearned * (b / keep);
    g.axpy(-(delta_b as f64) / keep, &record.grad_sum_full, 1.0);
    g *= eta / b;
    Ok(g)
}

/// G(l) through the other algebraic form, recomputing the retained-batch
/// gradient sum instead of using the cache. Used to cross-check
/// [`compute_g`]; the two agree to round-off.
pub fn compute_g_direct(
    record: &StepRecord,
    dataset: &Dataset,
    unlearn: &UnlearnSet,
    loss: &LossConfig,
    eta: f64,
) -> Result<ParamVector> {
    let batch_size = record.batch_indices.len();
    let (unlearned, retained) = split_batch(record, unlearn);
    let delta_b = unlearned.len();
    if delta_b == 0 {
        return Ok(DVector::zeros(record.w_before.len()));
    }
    if delta_b >= batch_size {
        return Err(Error::DegenerateBatch { step: record.step });
    }
    let sum_unlearned = batch_gradient_sum(&record.w_before, dataset, &unlearned, loss)?;
    let sum_retained = batch_gradient_sum(&record.w_before, dataset, &retained, loss)?;
    let ratio = gamma_ratio(batch_size, delta_b)?;
    let mut g = sum_retained * ratio;
    g += &sum_unlearned;
    g *= eta / batch_size as f64;
    Ok(g)
}

/// How per-step operators realize their Hessian products.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackingSpec {
    /// Matrix-free exact Hessian-vector products over the retained batch.
    Exact,
    /// Compact quasi-Newton approximation from m secant pairs.
    Lbfgs { m: usize },
}

/// Backing actually used, for result metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackingUsed {
    Exact,
    Lbfgs,
}

enum HBackingImpl<'a> {
    Exact {
        dataset: &'a Dataset,
        loss: LossConfig,
        w_before: &'a ParamVector,
    },
    Lbfgs(Box<LbfgsBacking>),
}

struct LbfgsBacking {
    factors: CompactFactors,
    pairs: CurvaturePairs,
}

/// The per-step linear operator v -> H(l) v.
pub struct HOperator<'a> {
    step: usize,
    eta: f64,
    batch_size: usize,
    delta_b: usize,
    retained: Vec<usize>,
    backing: HBackingImpl<'a>,
}

impl<'a> HOperator<'a> {
    pub fn step(&self) -> usize {
        self.step
    }

    pub fn delta_b(&self) -> usize {
        self.delta_b
    }

    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    pub fn backing_used(&self) -> BackingUsed {
        match self.backing {
            HBackingImpl::Exact { .. } => BackingUsed::Exact,
            HBackingImpl::Lbfgs { .. } => BackingUsed::Lbfgs,
        }
    }

    /// Applies H(l) = I - eta/(B-dB) * sum_retained hessian to `v`.
    pub fn apply(&self, v: &ParamVector) -> Result<ParamVector> {
        match &self.backing {
            HBackingImpl::Exact {
                dataset,
                loss,
                w_before,
            } => {
                let hv = exact_hvp(w_before, dataset, &self.retained, loss, v)?;
                let coeff = self.eta / (self.batch_size - self.delta_b) as f64;
                Ok(v - hv * coeff)
            }
            HBackingImpl::Lbfgs(backing) => apply_h_lbfgs(
                &backing.factors,
                &backing.pairs,
                StepScaling {
                    eta: self.eta,
                    batch_size: self.batch_size,
                    unlearned_in_batch: self.delta_b,
                },
                v,
            ),
        }
    }

    /// Materializes H(l) as a dense matrix (guarded).
    pub fn materialize(&self, dim_guard: usize) -> Result<DMatrix<f64>> {
        let p = match &self.backing {
            HBackingImpl::Exact { w_before, .. } => w_before.len(),
            HBackingImpl::Lbfgs(backing) => backing.pairs.dim(),
        };
        if p > dim_guard {
            return Err(Error::Capacity(format!(
                "materializing a {p}x{p} step operator exceeds the dimension guard {dim_guard}"
            )));
        }
        match &self.backing {
            HBackingImpl::Exact {
                dataset,
                loss,
                w_before,
            } => {
                let hess = exact_hessian(w_before, dataset, &self.retained, loss, dim_guard)?;
                let coeff = self.eta / (self.batch_size - self.delta_b) as f64;
                Ok(DMatrix::identity(p, p) - hess * coeff)
            }
            HBackingImpl::Lbfgs { .. } => {
                let mut out = DMatrix::zeros(p, p);
                for q in 0..p {
                    let mut e = DVector::zeros(p);
                    e[q] = 1.0;
                    let col = self.apply(&e)?;
                    out.set_column(q, &col);
                }
                Ok(out)
            }
        }
    }
}

/// Builds the operator for one logged step. The lbfgs backing probes the
/// retained-batch gradient at m+1 consecutive snapshots near the step
/// (ending at w_{l-1} when enough earlier snapshots exist).
pub fn h_operator<'a>(
    log: &'a TrainingLog,
    dataset: &'a Dataset,
    unlearn: &UnlearnSet,
    record_index: usize,
    backing: BackingSpec,
) -> Result<HOperator<'a>> {
    let record = log
        .history
        .get(record_index)
        .ok_or(Error::IndexOutOfRange(record_index))?;
    let batch_size = record.batch_indices.len();
    let (unlearned, retained) = split_batch(record, unlearn);
    let delta_b = unlearned.len();
    if delta_b >= batch_size {
        return Err(Error::DegenerateBatch { step: record.step });
    }
    let eta = log.config.learning_rate;
    let backing = match backing {
        BackingSpec::Exact => HBackingImpl::Exact {
            dataset,
            loss: log.config.loss,
            w_before: &record.w_before,
        },
        BackingSpec::Lbfgs { m } => {
            if m == 0 {
                return Err(Error::Config("lbfgs backing needs m >= 1".into()));
            }
            let snaps = log.snapshots();
            if m + 1 > snaps.len() {
                return Err(Error::Capacity(format!(
                    "lbfgs backing needs {} snapshots, log holds {}",
                    m + 1,
                    snaps.len()
                )));
            }
            // Window of m+1 snapshots ending at w_{l-1} (= snaps[record_index])
            // when possible, shifted forward for the oldest records.
            let start = record_index.saturating_sub(m);
            let window = &snaps[start..start + m + 1];
            let grads = window
                .iter()
                .map(|w| batch_gradient_sum(w, dataset, &retained, &log.config.loss))
                .collect::<Result<Vec<_>>>()?;
            let pairs = CurvaturePairs::from_secants(window, &grads)?;
            let factors = compact_factors(&pairs)?;
            HBackingImpl::Lbfgs(Box::new(LbfgsBacking { factors, pairs }))
        }
    };
    Ok(HOperator {
        step: record.step,
        eta,
        batch_size,
        delta_b,
        retained,
        backing,
    })
}

/// Evaluation mode of the correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Horner,
    Parallel,
}

/// Parameter correction plus diagnostics.
#[derive(Debug, Clone)]
pub struct UnlearnResult {
    /// dw_T.
    pub delta_w: ParamVector,
    /// w_T + dw_T.
    pub unlearned_w: ParamVector,
    pub k_used: usize,
    pub mode: Mode,
    pub backing: BackingUsed,
    /// Contraction rate from the smoothness bounds (None when the L2
    /// coefficient is zero).
    pub r_estimate: Option<f64>,
    /// Diagnostic truncation scale r^k * |dw_T| (None when r >= 1 or
    /// bounds are unavailable).
    pub bound: Option<f64>,
}

fn check_compatible(log: &TrainingLog, dataset: &Dataset, unlearn: &UnlearnSet) -> Result<()> {
    log.check()?;
    let got = dataset.fingerprint();
    if got != log.dataset_fingerprint {
        return Err(Error::FingerprintMismatch {
            expected: log.dataset_fingerprint.clone(),
            got,
        });
    }
    unlearn.check_bounds(dataset.len())
}

fn window_check(log: &TrainingLog, k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::Config("k must be >= 1".into()));
    }
    if k > log.history.len() {
        return Err(Error::Capacity(format!(
            "k = {k} exceeds the logged history window {}",
            log.history.len()
        )));
    }
    Ok(log.history.len() - k)
}

fn diagnostics(
    log: &TrainingLog,
    dataset: &Dataset,
    k: usize,
    delta_w: &ParamVector,
) -> (Option<f64>, Option<f64>) {
    if log.config.loss.l2_coeff <= 0.0 {
        return (None, None);
    }
    let Ok(bounds) = smoothness_bounds(dataset, &log.config.loss) else {
        return (None, None);
    };
    let eta = log.config.learning_rate;
    let r = (1.0 - eta * bounds.mu)
        .abs()
        .max((1.0 - eta * bounds.big_l).abs());
    let bound = truncation_bound(&bounds, eta, k, delta_w.norm()).ok();
    (Some(r), bound)
}

fn empty_result(log: &TrainingLog, k: usize, mode: Mode, backing: BackingUsed) -> UnlearnResult {
    UnlearnResult {
        delta_w: DVector::zeros(log.final_w.len()),
        unlearned_w: log.final_w.clone(),
        k_used: k,
        mode,
        backing,
        r_estimate: None,
        bound: None,
    }
}

/// Horner evaluation of the truncated recurrence: acc <- H(l) acc + G(l)
/// over the last k logged steps, starting from zero. Never materializes
/// an operator.
pub fn delta_w_horner(
    log: &TrainingLog,
    dataset: &Dataset,
    unlearn: &UnlearnSet,
    k: usize,
    backing: BackingSpec,
) -> Result<UnlearnResult> {
    check_compatible(log, dataset, unlearn)?;
    let offset = window_check(log, k)?;
    let backing_used = match backing {
        BackingSpec::Exact => BackingUsed::Exact,
        BackingSpec::Lbfgs { .. } => BackingUsed::Lbfgs,
    };
    if unlearn.is_empty() {
        return Ok(empty_result(log, k, Mode::Horner, backing_used));
    }

    let eta = log.config.learning_rate;
    let mut acc: ParamVector = DVector::zeros(log.final_w.len());
    for idx in offset..log.history.len() {
        let record = &log.history[idx];
        let op = h_operator(log, dataset, unlearn, idx, backing)?;
        let g = compute_g(record, dataset, unlearn, &log.config.loss, eta)?;
        acc = op.apply(&acc)?;
        acc += g;
    }

    let (r_estimate, bound) = diagnostics(log, dataset, k, &acc);
    let unlearned_w = &log.final_w + &acc;
    Ok(UnlearnResult {
        delta_w: acc,
        unlearned_w,
        k_used: k,
        mode: Mode::Horner,
        backing: backing_used,
        r_estimate,
        bound,
    })
}

/// Orthonormal basis used by the parallel mode.
#[derive(Debug, Clone)]
pub struct BasisSet {
    vectors: Vec<ParamVector>,
}

impl BasisSet {
    /// Standard basis e_1 .. e_p; products H e_q read columns directly.
    pub fn standard(p: usize) -> Self {
        let vectors = (0..p)
            .map(|q| {
                let mut e = DVector::zeros(p);
                e[q] = 1.0;
                e
            })
            .collect();
        BasisSet { vectors }
    }

    /// Random orthonormal basis from the QR factorization of a seeded
    /// Gaussian matrix.
    pub fn random_orthonormal(p: usize, seed: u64) -> Self {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = DMatrix::from_fn(p, p, |_, _| {
            // Box-free standard normal via two uniforms is unnecessary;
            // uniform entries already give a full-rank matrix a.s.
            rng.random_range(-1.0..1.0)
        });
        let q = raw.qr().q();
        let vectors = (0..p).map(|c| q.column(c).into_owned()).collect();
        BasisSet { vectors }
    }

    pub fn vectors(&self) -> &[ParamVector] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    /// Orthonormality within 1e-12 and completeness of sum u u' within
    /// 1e-10 of the identity.
    pub fn validate(&self) -> Result<()> {
        let p = self.dim();
        if self.vectors.len() != p || p == 0 {
            return Err(Error::Config(format!(
                "basis needs exactly p = {p} vectors, got {}",
                self.vectors.len()
            )));
        }
        for (i, u) in self.vectors.iter().enumerate() {
            if (u.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Config(format!("basis vector {i} is not unit")));
            }
            for v in &self.vectors[i + 1..] {
                if u.dot(v).abs() > 1e-12 {
                    return Err(Error::Config(format!(
                        "basis vectors are not orthogonal (pivot {i})"
                    )));
                }
            }
        }
        let mut completeness = DMatrix::zeros(p, p);
        for u in &self.vectors {
            completeness += u * u.transpose();
        }
        let err = (&completeness - DMatrix::identity(p, p)).amax();
        if err > 1e-10 {
            return Err(Error::Config(format!(
                "basis is not complete: max deviation {err:e}"
            )));
        }
        Ok(())
    }
}

/// Materializes every H(l) from basis-vector products computed as
/// independent (l, q) tasks, then assembles the expanded truncated sum.
/// Fixed reduction order makes the result independent of `threads`.
#[allow(clippy::too_many_arguments)]
pub fn delta_w_parallel(
    log: &TrainingLog,
    dataset: &Dataset,
    unlearn: &UnlearnSet,
    k: usize,
    basis: &BasisSet,
    backing: BackingSpec,
    threads: usize,
    dim_guard: usize,
) -> Result<UnlearnResult> {
    check_compatible(log, dataset, unlearn)?;
    let offset = window_check(log, k)?;
    let p = log.final_w.len();
    if p > dim_guard {
        return Err(Error::Capacity(format!(
            "parallel mode materializes {p}x{p} operators (guard {dim_guard}); \
             use horner mode instead"
        )));
    }
    if basis.dim() != p {
        return Err(Error::DimensionMismatch {
            context: "basis",
            expected: p,
            got: basis.dim(),
        });
    }
    basis.validate()?;
    let backing_used = match backing {
        BackingSpec::Exact => BackingUsed::Exact,
        BackingSpec::Lbfgs { .. } => BackingUsed::Lbfgs,
    };
    if unlearn.is_empty() {
        return Ok(empty_result(log, k, Mode::Parallel, backing_used));
    }

    let eta = log.config.learning_rate;
    let window: Vec<usize> = (offset..log.history.len()).collect();

    // Independent (l, q) product tasks, collected by index.
    let tasks: Vec<(usize, usize)> = window
        .iter()
        .flat_map(|&idx| (0..p).map(move |q| (idx, q)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let columns: Vec<ParamVector> = pool.install(|| {
        use rayon::prelude::*;
        tasks
            .par_iter()
            .map(|&(idx, q)| {
                let op = h_operator(log, dataset, unlearn, idx, backing)?;
                op.apply(&basis.vectors()[q])
            })
            .collect::<Result<Vec<_>>>()
    })?;

    // H(l) = sum_q (H u_q) u_q', ascending q.
    let mut h_mats = Vec::with_capacity(window.len());
    for (wi, _) in window.iter().enumerate() {
        let mut h = DMatrix::zeros(p, p);
        for q in 0..p {
            h += &columns[wi * p + q] * basis.vectors()[q].transpose();
        }
        h_mats.push(h);
    }

    let g_vecs = window
        .iter()
        .map(|&idx| compute_g(&log.history[idx], dataset, unlearn, &log.config.loss, eta))
        .collect::<Result<Vec<_>>>()?;

    // dw = G(T) + sum_{j=2..k} H(T)...H(T-j+2) G(T-j+1), ascending products.
    let mut delta = g_vecs[k - 1].clone();
    let mut prod = DMatrix::<f64>::identity(p, p);
    for j in 2..=k {
        prod = &prod * &h_mats[k - j + 1];
        delta += &prod * &g_vecs[k - j];
    }

    let (r_estimate, bound) = diagnostics(log, dataset, k, &delta);
    let unlearned_w = &log.final_w + &delta;
    Ok(UnlearnResult {
        delta_w: delta,
        unlearned_w,
        k_used: k,
        mode: Mode::Parallel,
        backing: backing_used,
        r_estimate,
        bound,
    })
}

/// Diagnostic truncation scale r^k * ref_norm with
/// r = max(|1 - eta mu|, |1 - eta L|). Requires r < 1.
pub fn truncation_bound(
    bounds: &SmoothnessBounds,
    eta: f64,
    k: usize,
    ref_norm: f64,
) -> Result<f64> {
    let r = bounds.contraction_rate(eta)?;
    Ok(r.powi(k as i32) * ref_norm)
}

/// Output of the full-history reference recurrence.
#[derive(Debug, Clone)]
pub struct ReferenceRun {
    /// Final trained parameters (identical to `init_training`).
    pub final_w: ParamVector,
    /// dw_T from the exact recurrence started at step 1 with dw_0 = 0.
    pub delta_w: ParamVector,
    /// |dw_l| after every step l = 1..=T.
    pub delta_w_norms: Vec<f64>,
}

/// Replays training from scratch while advancing the exact correction
/// recurrence alongside it. O(p) memory, so it serves as the truncation
/// reference even when the log window is far shorter than T. Uses the
/// retained-sum form of G(l), independent of the cached-gradient path.
pub fn reference_delta_w_full(
    dataset: &Dataset,
    cfg: &TrainConfig,
    unlearn: &UnlearnSet,
) -> Result<ReferenceRun> {
    cfg.validate(dataset)?;
    unlearn.check_bounds(dataset.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let eta = cfg.learning_rate;
    let b = cfg.batch_size as f64;
    let p = dataset.dim();

    let mut w: ParamVector = DVector::zeros(p);
    let mut delta: ParamVector = DVector::zeros(p);
    let mut norms = Vec::with_capacity(cfg.steps);

    for step in 1..=cfg.steps {
        let batch = sample_batch(&mut rng, dataset.len(), cfg.batch_size)?;
        let mut unlearned = Vec::new();
        let mut retained = Vec::new();
        for &j in &batch {
            if unlearn.contains(j) {
                unlearned.push(j);
            } else {
                retained.push(j);
            }
        }
        if retained.is_empty() {
            return Err(Error::DegenerateBatch { step });
        }
        let delta_b = unlearned.len();

        // H(l) * dw then + G(l), all at the original trajectory w_{l-1}.
        let hv = exact_hvp(&w, dataset, &retained, &cfg.loss, &delta)?;
        let mut next = &delta - hv * (eta / retained.len() as f64);
        if delta_b > 0 {
            let sum_unlearned = batch_gradient_sum(&w, dataset, &unlearned, &cfg.loss)?;
            let sum_retained = batch_gradient_sum(&w, dataset, &retained, &cfg.loss)?;
            let ratio = gamma_ratio(cfg.batch_size, delta_b)?;
            let mut g = sum_retained * ratio;
            g += &sum_unlearned;
            g *= eta / b;
            next += g;
        }
        delta = next;
        norms.push(delta.norm());

        let grad_sum = batch_gradient_sum(&w, dataset, &batch, &cfg.loss)?;
        w.axpy(-(eta / b), &grad_sum, 1.0);
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericFailure {
                step,
                msg: "training diverged during reference run".into(),
            });
        }
    }

    Ok(ReferenceRun {
        final_w: w,
        delta_w: delta,
        delta_w_norms: norms,
    })
}

/// Convenience dispatcher used by the command-line front end.
#[derive(Debug, Clone)]
pub struct UnlearnOptions {
    /// History window; defaults to everything the log holds.
    pub k: Option<usize>,
    pub mode: Mode,
    /// None = auto: exact products up to the dimension guard, lbfgs above.
    pub backing: Option<BackingSpec>,
    pub lbfgs_m: usize,
    pub threads: usize,
    pub dim_guard: usize,
}

impl Default for UnlearnOptions {
    fn default() -> Self {
        UnlearnOptions {
            k: None,
            mode: Mode::Horner,
            backing: None,
            lbfgs_m: 2,
            threads: 1,
            dim_guard: DEFAULT_DIM_GUARD,
        }
    }
}

pub fn unlearn(
    log: &TrainingLog,
    dataset: &Dataset,
    unlearn_set: &UnlearnSet,
    opts: &UnlearnOptions,
) -> Result<UnlearnResult> {
    let k = opts.k.unwrap_or(log.history.len());
    let backing = opts.backing.unwrap_or({
        if dataset.dim() <= opts.dim_guard {
            BackingSpec::Exact
        } else {
            BackingSpec::Lbfgs { m: opts.lbfgs_m }
        }
    });
    match opts.mode {
        Mode::Horner => delta_w_horner(log, dataset, unlearn_set, k, backing),
        Mode::Parallel => {
            let basis = BasisSet::standard(dataset.dim());
            delta_w_parallel(
                log,
                dataset,
                unlearn_set,
                k,
                &basis,
                backing,
                opts.threads,
                opts.dim_guard,
            )
        }
    }
}
