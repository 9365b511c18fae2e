//! Compact-representation quasi-Newton Hessian-vector products.
//!
//! From m secant pairs (dw_i, dg_i) this builds the small factors of the
//! Byrd-Nocedal-Schnabel compact form of the direct BFGS approximation
//! seeded at sigma*I, and applies the approximate summed batch Hessian to
//! arbitrary constant vectors in O(m*p) per product without materializing
//! anything p x p.
//!
//! The implied operator is
//!
//! ```text
//! Hbar u = sigma*u - [dG  sigma*dW] * M^{-1} * [dG'u; sigma*dW'u]
//! M = [[-D, L'], [L, sigma*dW'dW]]
//! ```
//!
//! where D is the diagonal and L the strictly lower triangle of dW'dG, and
//! M is solved through two triangular factors built from D^{1/2} and the
//! Cholesky factor J with J J' = sigma*dW'dW + L D^{-1} L'.
//!
//! Gradients supplied to [`build_pairs`] are retained-batch gradient sums
//! evaluated at consecutive parameter snapshots, so the factors approximate
//! the summed (not mean) Hessian; [`apply_h_lbfgs`] then applies the
//! eta/(B - dB) scaling of the per-step contraction operator.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::objective::ParamVector;
use crate::trainer::TrainingLog;

/// Consecutive parameter and gradient differences.
#[derive(Debug, Clone)]
pub struct CurvaturePairs {
    delta_w: Vec<ParamVector>,
    delta_g: Vec<ParamVector>,
}

impl CurvaturePairs {
    /// Builds pairs from raw differences, enforcing the curvature condition
    /// dg_i' dw_i > 0 for every pair.
    pub fn new(delta_w: Vec<ParamVector>, delta_g: Vec<ParamVector>) -> Result<Self> {
        if delta_w.is_empty() || delta_w.len() != delta_g.len() {
            return Err(Error::Config(format!(
                "need matching non-empty difference lists, got {} and {}",
                delta_w.len(),
                delta_g.len()
            )));
        }
        let dim = delta_w[0].len();
        for (i, (dw, dg)) in delta_w.iter().zip(&delta_g).enumerate() {
            if dw.len() != dim || dg.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "curvature pair",
                    expected: dim,
                    got: dw.len().min(dg.len()),
                });
            }
            let curvature = dg.dot(dw);
            if curvature <= 0.0 || curvature.is_nan() {
                return Err(Error::CurvatureViolation {
                    pair: i,
                    value: curvature,
                });
            }
        }
        Ok(CurvaturePairs { delta_w, delta_g })
    }

    /// Differences of consecutive snapshots and of the gradients evaluated
    /// at them. `snapshots` and `grads` must align element-wise.
    pub fn from_secants(snapshots: &[&ParamVector], grads: &[ParamVector]) -> Result<Self> {
        if snapshots.len() < 2 || snapshots.len() != grads.len() {
            return Err(Error::Config(format!(
                "need >= 2 aligned snapshots and gradients, got {} and {}",
                snapshots.len(),
                grads.len()
            )));
        }
        let delta_w = snapshots
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect::<Vec<_>>();
        let delta_g = grads.windows(2).map(|g| &g[1] - &g[0]).collect::<Vec<_>>();
        Self::new(delta_w, delta_g)
    }

    pub fn m(&self) -> usize {
        self.delta_w.len()
    }

    pub fn dim(&self) -> usize {
        self.delta_w[0].len()
    }

    pub fn delta_w(&self) -> &[ParamVector] {
        &self.delta_w
    }

    pub fn delta_g(&self) -> &[ParamVector] {
        &self.delta_g
    }
}

/// Builds pairs from the last m+1 parameter snapshots of a training log.
/// `retained_grads` must hold the retained-batch gradient sums evaluated at
/// those same snapshots, oldest first.
pub fn build_pairs(
    log: &TrainingLog,
    retained_grads: &[ParamVector],
    m: usize,
) -> Result<CurvaturePairs> {
    if m == 0 {
        return Err(Error::Config("history size m must be >= 1".into()));
    }
    if m + 1 > log.config.history_k {
        return Err(Error::Capacity(format!(
            "m = {m} needs {} snapshots but the log window is k = {}",
            m + 1,
            log.config.history_k
        )));
    }
    if retained_grads.len() != m + 1 {
        return Err(Error::Config(format!(
            "expected {} gradients for m = {m}, got {}",
            m + 1,
            retained_grads.len()
        )));
    }
    let snaps = log.snapshots();
    let tail = &snaps[snaps.len() - (m + 1)..];
    CurvaturePairs::from_secants(tail, retained_grads)
}

/// Small m x m factors of the compact representation.
#[derive(Debug, Clone)]
pub struct CompactFactors {
    pub sigma: f64,
    /// dW' dW
    pub gram_ww: DMatrix<f64>,
    /// dW' dG
    pub gram_wg: DMatrix<f64>,
    /// Diagonal of dW' dG (curvature products).
    pub d_diag: DVector<f64>,
    /// Strictly lower triangle of dW' dG.
    pub l_tri: DMatrix<f64>,
    /// Lower-triangular Cholesky factor J of sigma*dW'dW + L D^{-1} L'.
    pub chol_j: DMatrix<f64>,
    /// Jitter added to the diagonal before factorization (0 when clean).
    pub jitter: f64,
}

/// Computes sigma, the Gram matrices, the D/L split and the Cholesky
/// factor. A single jitter retry of 1e-10 * trace/m is attempted before
/// reporting a factorization error.
pub fn compact_factors(pairs: &CurvaturePairs) -> Result<CompactFactors> {
    let m = pairs.m();
    let dw = pairs.delta_w();
    let dg = pairs.delta_g();

    let mut gram_ww = DMatrix::zeros(m, m);
    let mut gram_wg = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            gram_ww[(i, j)] = dw[i].dot(&dw[j]);
            gram_wg[(i, j)] = dw[i].dot(&dg[j]);
        }
    }
    let d_diag = gram_wg.diagonal();
    if d_diag.iter().any(|&d| d <= 0.0 || d.is_nan()) {
        return Err(Error::Factorization(
            "non-positive curvature on the diagonal of dW'dG".into(),
        ));
    }
    let mut l_tri = DMatrix::zeros(m, m);
    for i in 1..m {
        for j in 0..i {
            l_tri[(i, j)] = gram_wg[(i, j)];
        }
    }
    let last = m - 1;
    let sigma = gram_wg[(last, last)] / gram_ww[(last, last)];
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::Factorization(format!(
            "invalid curvature scale sigma = {sigma}"
        )));
    }

    // sigma*dW'dW + L D^{-1} L'
    let mut target = &gram_ww * sigma;
    for i in 0..m {
        for j in 0..m {
            let mut acc = 0.0;
            for q in 0..m {
                acc += l_tri[(i, q)] * l_tri[(j, q)] / d_diag[q];
            }
            target[(i, j)] += acc;
        }
    }

    let chol = match nalgebra::Cholesky::new(target.clone()) {
        Some(c) => CompactFactors {
            sigma,
            gram_ww,
            gram_wg,
            d_diag,
            l_tri,
            chol_j: c.unpack(),
            jitter: 0.0,
        },
        None => {
            let jitter = 1e-10 * target.trace() / m as f64;
            let mut retry = target;
            for d in 0..m {
                retry[(d, d)] += jitter;
            }
            match nalgebra::Cholesky::new(retry) {
                Some(c) => CompactFactors {
                    sigma,
                    gram_ww,
                    gram_wg,
                    d_diag,
                    l_tri,
                    chol_j: c.unpack(),
                    jitter,
                },
                None => {
                    return Err(Error::Factorization(format!(
                        "Cholesky failed even with jitter {jitter:e}; \
                         curvature pairs are numerically dependent"
                    )))
                }
            }
        }
    };
    Ok(chol)
}

fn solve_lower(l: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    l.solve_lower_triangular(rhs)
        .ok_or_else(|| Error::Factorization("singular triangular solve".into()))
}

fn solve_upper_transposed(l: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    l.tr_solve_lower_triangular(rhs)
        .ok_or_else(|| Error::Factorization("singular triangular solve".into()))
}

/// Applies the approximate summed retained-batch Hessian to `u`.
pub fn hvp_compact(
    factors: &CompactFactors,
    pairs: &CurvaturePairs,
    u: &ParamVector,
) -> Result<ParamVector> {
    if u.len() != pairs.dim() {
        return Err(Error::DimensionMismatch {
            context: "compact hvp",
            expected: pairs.dim(),
            got: u.len(),
        });
    }
    let m = pairs.m();
    let sigma = factors.sigma;
    let dw = pairs.delta_w();
    let dg = pairs.delta_g();

    let rhs_g = DVector::from_fn(m, |i, _| dg[i].dot(u));
    let rhs_w = DVector::from_fn(m, |i, _| sigma * dw[i].dot(u));

    // Forward block: t2 = J^{-1} (rhs_w + L D^{-1} rhs_g)
    let scaled = DVector::from_fn(m, |i, _| rhs_g[i] / factors.d_diag[i]);
    let t2_rhs = &rhs_w + &factors.l_tri * &scaled;
    let t2 = solve_lower(&factors.chol_j, &t2_rhs)?;
    // Backward block: p2 = J^{-T} t2, p1 = D^{-1} L' p2 - D^{-1} rhs_g
    let p2 = solve_upper_transposed(&factors.chol_j, &t2)?;
    let lt_p2 = factors.l_tri.transpose() * &p2;
    let p1 = DVector::from_fn(m, |i, _| (lt_p2[i] - rhs_g[i]) / factors.d_diag[i]);

    let mut out = u * sigma;
    for i in 0..m {
        out.axpy(-p1[i], &dg[i], 1.0);
        out.axpy(-sigma * p2[i], &dw[i], 1.0);
    }
    Ok(out)
}

/// Per-step scaling of the contraction operator.
#[derive(Debug, Clone, Copy)]
pub struct StepScaling {
    pub eta: f64,
    pub batch_size: usize,
    pub unlearned_in_batch: usize,
}

/// The quasi-Newton realization of the per-step operator:
/// `u - eta/(B - dB) * Hbar u`.
pub fn apply_h_lbfgs(
    factors: &CompactFactors,
    pairs: &CurvaturePairs,
    scaling: StepScaling,
    u: &ParamVector,
) -> Result<ParamVector> {
    if scaling.unlearned_in_batch >= scaling.batch_size {
        return Err(Error::DegenerateBatch { step: 0 });
    }
    let coeff = scaling.eta / (scaling.batch_size - scaling.unlearned_in_batch) as f64;
    let hbar_u = hvp_compact(factors, pairs, u)?;
    Ok(u - hbar_u * coeff)
}
