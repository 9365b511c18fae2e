//! Dataset ingestion and synthesis.
//!
//! Supported sources: libsvm text files (`label idx:val ...`, 1-based
//! indices), headerless numeric CSV, a seeded Gaussian generator for
//! strongly convex desk-scale problems, and a seeded digit-pair image
//! generator used as a self-contained stand-in for a binarized MNIST
//! subset.
//!
//! All loaders reject NaN/Inf values and duplicate sample ids. Loaded rows
//! are L2-normalized by default; every applied transform is recorded in
//! `Dataset::preprocessing` so run manifests can disclose it.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::objective::LossKind;

/// Dense dataset: one feature row per sample plus a scalar label.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<DVector<f64>>,
    labels: Vec<f64>,
    sample_ids: Vec<u64>,
    preprocessing: Vec<String>,
}

impl Dataset {
    pub fn new(
        features: Vec<DVector<f64>>,
        labels: Vec<f64>,
        sample_ids: Vec<u64>,
    ) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Data("dataset has no samples".into()));
        }
        if features.len() != labels.len() || features.len() != sample_ids.len() {
            return Err(Error::Data(format!(
                "row count mismatch: {} features, {} labels, {} ids",
                features.len(),
                labels.len(),
                sample_ids.len()
            )));
        }
        let dim = features[0].len();
        if dim == 0 {
            return Err(Error::Data("feature dimension is zero".into()));
        }
        for (i, row) in features.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "dataset row",
                    expected: dim,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Data(format!("non-finite feature in row {i}")));
            }
        }
        if let Some(i) = labels.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!("non-finite label in row {i}")));
        }
        let mut seen = sample_ids.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Data("duplicate sample ids".into()));
        }
        Ok(Dataset {
            features,
            labels,
            sample_ids,
            preprocessing: Vec::new(),
        })
    }

    /// Builds a dataset from plain rows, assigning sample ids 0..n.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        let features = rows.into_iter().map(DVector::from_vec).collect();
        Self::new(features, labels, (0..n as u64).collect())
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Feature dimension p.
    pub fn dim(&self) -> usize {
        self.features[0].len()
    }

    pub fn feature(&self, index: usize) -> Result<&DVector<f64>> {
        self.features
            .get(index)
            .ok_or(Error::IndexOutOfRange(index))
    }

    pub fn label(&self, index: usize) -> Result<f64> {
        self.labels
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange(index))
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn sample_ids(&self) -> &[u64] {
        &self.sample_ids
    }

    pub fn preprocessing(&self) -> &[String] {
        &self.preprocessing
    }

    pub fn record_preprocessing(&mut self, step: impl Into<String>) {
        self.preprocessing.push(step.into());
    }

    /// Checks that labels match the loss kind (binary {0,1} for logistic).
    pub fn check_labels(&self, kind: LossKind) -> Result<()> {
        if kind == LossKind::Logistic {
            if let Some(i) = self.labels.iter().position(|&y| y != 0.0 && y != 1.0) {
                return Err(Error::Data(format!(
                    "logistic loss requires binary labels, row {i} has {}",
                    self.labels[i]
                )));
            }
        }
        Ok(())
    }

    pub fn max_row_norm(&self) -> f64 {
        self.features
            .iter()
            .map(|x| x.norm())
            .fold(0.0_f64, f64::max)
    }

    /// Scales every row to unit L2 norm (zero rows are left untouched).
    pub fn normalize_rows(&mut self) {
        for row in &mut self.features {
            let norm = row.norm();
            if norm > 0.0 {
                *row /= norm;
            }
        }
        self.preprocessing.push("row_l2_normalize".into());
    }

    /// Sub-dataset on the given row indices (ids and labels preserved).
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let mut features = Vec::with_capacity(indices.len());
        let mut labels = Vec::with_capacity(indices.len());
        let mut ids = Vec::with_capacity(indices.len());
        for &i in indices {
            features.push(self.feature(i)?.clone());
            labels.push(self.label(i)?);
            ids.push(self.sample_ids[i]);
        }
        let mut out = Dataset::new(features, labels, ids)?;
        out.preprocessing = self.preprocessing.clone();
        Ok(out)
    }

    /// Content hash over dimensions, features, labels and ids (hex SHA-256).
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.len() as u64).to_le_bytes());
        hasher.update((self.dim() as u64).to_le_bytes());
        for row in &self.features {
            for v in row.iter() {
                hasher.update(v.to_le_bytes());
            }
        }
        for v in &self.labels {
            hasher.update(v.to_le_bytes());
        }
        for id in &self.sample_ids {
            hasher.update(id.to_le_bytes());
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Options shared by the file loaders.
#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Apply per-row L2 normalization after loading (recorded in metadata).
    pub normalize_rows: bool,
    /// Feature dimension; inferred from the file when `None`.
    pub n_features: Option<usize>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            normalize_rows: true,
            n_features: None,
        }
    }
}

/// Parses libsvm text format: `label index:value ...` with 1-based indices.
/// Row order follows the file; missing indices are zeros.
pub fn load_libsvm(path: &Path, opts: &LoadOptions) -> Result<Dataset> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let display = path.display().to_string();

    let mut sparse_rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().ok_or_else(|| Error::Parse {
            path: display.clone(),
            line: lineno + 1,
            msg: "missing label".into(),
        })?;
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            path: display.clone(),
            line: lineno + 1,
            msg: format!("invalid label '{label_tok}'"),
        })?;
        let mut row = Vec::new();
        for tok in tokens {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| Error::Parse {
                path: display.clone(),
                line: lineno + 1,
                msg: format!("expected index:value, got '{tok}'"),
            })?;
            let idx: usize = idx_s.parse().map_err(|_| Error::Parse {
                path: display.clone(),
                line: lineno + 1,
                msg: format!("invalid feature index '{idx_s}'"),
            })?;
            if idx == 0 {
                return Err(Error::Parse {
                    path: display.clone(),
                    line: lineno + 1,
                    msg: "feature indices are 1-based".into(),
                });
            }
            let val: f64 = val_s.parse().map_err(|_| Error::Parse {
                path: display.clone(),
                line: lineno + 1,
                msg: format!("invalid feature value '{val_s}'"),
            })?;
            if let Some(p) = opts.n_features {
                if idx > p {
                    return Err(Error::Parse {
                        path: display.clone(),
                        line: lineno + 1,
                        msg: format!("feature index {idx} exceeds declared dimension {p}"),
                    });
                }
            }
            max_index = max_index.max(idx);
            row.push((idx - 1, val));
        }
        sparse_rows.push(row);
        labels.push(label);
    }

    if sparse_rows.is_empty() {
        return Err(Error::Data(format!("{display}: no samples")));
    }
    let dim = opts.n_features.unwrap_or(max_index);
    if dim == 0 {
        return Err(Error::Data(format!("{display}: no features")));
    }

    let features = sparse_rows
        .into_iter()
        .map(|row| {
            let mut dense = DVector::zeros(dim);
            for (idx, val) in row {
                dense[idx] = val;
            }
            dense
        })
        .collect::<Vec<_>>();
    let n = features.len();
    let mut ds = Dataset::new(features, labels, (0..n as u64).collect())?;
    if opts.normalize_rows {
        ds.normalize_rows();
    }
    Ok(ds)
}

/// Parses a headerless numeric CSV; `label_column` selects the label cell,
/// all remaining cells become features in order.
pub fn load_csv(path: &Path, label_column: usize, opts: &LoadOptions) -> Result<Dataset> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let display = path.display().to_string();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if label_column >= cells.len() {
            return Err(Error::Parse {
                path: display.clone(),
                line: lineno + 1,
                msg: format!(
                    "label column {label_column} out of range (row has {} cells)",
                    cells.len()
                ),
            });
        }
        let mut features = Vec::with_capacity(cells.len() - 1);
        let mut label = 0.0;
        for (col, cell) in cells.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                path: display.clone(),
                line: lineno + 1,
                msg: format!("non-numeric cell '{}' in column {col}", cell.trim()),
            })?;
            if col == label_column {
                label = value;
            } else {
                features.push(value);
            }
        }
        rows.push(features);
        labels.push(label);
    }
    if rows.is_empty() {
        return Err(Error::Data(format!("{display}: no samples")));
    }
    let mut ds = Dataset::from_rows(rows, labels)?;
    if opts.normalize_rows {
        ds.normalize_rows();
    }
    Ok(ds)
}

/// Writes the dataset as headerless CSV with the label in column 0.
/// f64 values use shortest round-trip formatting, so a read-back is exact.
pub fn write_csv(ds: &Dataset, path: &Path) -> Result<()> {
    let mut file = File::create(path)?;
    for i in 0..ds.len() {
        let mut line = format!("{}", ds.label(i)?);
        for v in ds.feature(i)?.iter() {
            line.push(',');
            line.push_str(&format!("{v}"));
        }
        line.push('\n');
        file.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Keeps only samples labelled `neg` or `pos` and maps them to 0/1.
pub fn binarize_pair(ds: &Dataset, neg: f64, pos: f64) -> Result<Dataset> {
    let mut features = Vec::new();
    let mut labels = Vec::new();
    let mut ids = Vec::new();
    for i in 0..ds.len() {
        let y = ds.label(i)?;
        let mapped = if y == neg {
            0.0
        } else if y == pos {
            1.0
        } else {
            continue;
        };
        features.push(ds.feature(i)?.clone());
        labels.push(mapped);
        ids.push(ds.sample_ids()[i]);
    }
    if features.is_empty() {
        return Err(Error::Data(format!(
            "no samples with labels {neg} or {pos}"
        )));
    }
    let mut out = Dataset::new(features, labels, ids)?;
    out.preprocessing = ds.preprocessing.to_vec();
    out.record_preprocessing(format!("binarize_pair({neg},{pos})"));
    Ok(out)
}

/// Maps one label to 1 and every other label to 0, keeping all samples.
/// Multi-class problems reduce to a set of these binary tasks.
pub fn one_vs_rest(ds: &Dataset, positive: f64) -> Result<Dataset> {
    let labels: Vec<f64> = ds
        .labels
        .iter()
        .map(|&y| if y == positive { 1.0 } else { 0.0 })
        .collect();
    if labels.iter().all(|&y| y == 0.0) {
        return Err(Error::Data(format!("no samples with label {positive}")));
    }
    let mut out = Dataset::new(ds.features.clone(), labels, ds.sample_ids.clone())?;
    out.preprocessing = ds.preprocessing.clone();
    out.record_preprocessing(format!("one_vs_rest({positive})"));
    Ok(out)
}

/// Parameters for the seeded Gaussian generator.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    /// Separating direction; drawn from the seed when `None`.
    pub ground_truth_w: Option<DVector<f64>>,
    /// Every feature row is scaled to exactly this L2 norm.
    pub feature_scale: f64,
    /// Probability of flipping each label, in [0, 0.5].
    pub label_noise: f64,
}

impl SyntheticSpec {
    pub fn new(n: usize, p: usize, seed: u64) -> Self {
        SyntheticSpec {
            n,
            p,
            seed,
            ground_truth_w: None,
            feature_scale: 1.0,
            label_noise: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::Config("synthetic spec needs n >= 1, p >= 1".into()));
        }
        if self.feature_scale <= 0.0 || !self.feature_scale.is_finite() {
            return Err(Error::Config("feature_scale must be positive".into()));
        }
        if !(0.0..=0.5).contains(&self.label_noise) {
            return Err(Error::Config("label_noise must lie in [0, 0.5]".into()));
        }
        if let Some(w) = &self.ground_truth_w {
            if w.len() != self.p {
                return Err(Error::DimensionMismatch {
                    context: "ground_truth_w",
                    expected: self.p,
                    got: w.len(),
                });
            }
        }
        Ok(())
    }
}

/// Gaussian rows normalized to `feature_scale`, labels thresholded from a
/// ground-truth logit with optional flips. Bitwise reproducible per seed.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let ground_truth = match &spec.ground_truth_w {
        Some(w) => w.clone(),
        None => {
            let raw: Vec<f64> = (0..spec.p)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let mut w = DVector::from_vec(raw);
            let norm = w.norm();
            if norm > 0.0 {
                w *= 4.0 / norm;
            }
            w
        }
    };

    let mut features = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let raw: Vec<f64> = (0..spec.p)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let mut x = DVector::from_vec(raw);
        let norm = x.norm();
        if norm > 0.0 {
            x *= spec.feature_scale / norm;
        } else {
            x[0] = spec.feature_scale;
        }
        // Labels come from the direction of x, not its scale, so weak
        // features still carry a learnable signal.
        let logit = ground_truth.dot(&x) / spec.feature_scale;
        let prob = 1.0 / (1.0 + (-logit).exp());
        let mut y = if prob >= 0.5 { 1.0 } else { 0.0 };
        if spec.label_noise > 0.0 && rng.random::<f64>() < spec.label_noise {
            y = 1.0 - y;
        }
        features.push(x);
        labels.push(y);
    }
    let mut ds = Dataset::new(features, labels, (0..spec.n as u64).collect())?;
    ds.record_preprocessing(format!("synthetic(scale={})", spec.feature_scale));
    Ok(ds)
}

/// Renders a two-class digit-style image set on a `side`x`side` grid:
/// class 0 is a jittered ring, class 1 a jittered vertical stroke, with
/// pixel noise and small translations. Rows are L2-normalized. This is the
/// self-contained desk-scale stand-in for a binarized MNIST pair.
pub fn generate_digit_pair(n: usize, side: usize, seed: u64) -> Result<Dataset> {
    if n == 0 || side < 8 {
        return Err(Error::Config(
            "digit generator needs n >= 1 and side >= 8".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = side * side;
    let mut features = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);

    for i in 0..n {
        let label = (i % 2) as f64;
        let mut img = vec![0.0f64; p];
        let cx = side as f64 / 2.0 + rng.random_range(-2.5..2.5);
        let cy = side as f64 / 2.0 + rng.random_range(-2.5..2.5);
        let contrast: f64 = rng.random_range(0.35..1.0);
        if label == 0.0 {
            let r = side as f64 * rng.random_range(0.18..0.34);
            let thickness = side as f64 * rng.random_range(0.07..0.13);
            for row in 0..side {
                for col in 0..side {
                    let dx = col as f64 - cx;
                    let dy = row as f64 - cy;
                    let d = (dx * dx + dy * dy).sqrt();
                    if (d - r).abs() < thickness {
                        img[row * side + col] =
                            contrast * (1.0 - (d - r).abs() / thickness * 0.5);
                    }
                }
            }
        } else {
            let slant: f64 = rng.random_range(-0.3..0.3);
            let half_height = side as f64 * rng.random_range(0.22..0.4);
            let thickness = side as f64 * rng.random_range(0.06..0.12);
            for row in 0..side {
                let dy = row as f64 - cy;
                if dy.abs() > half_height {
                    continue;
                }
                let stroke_x = cx + slant * dy;
                for col in 0..side {
                    let dx = col as f64 - stroke_x;
                    if dx.abs() < thickness {
                        img[row * side + col] =
                            contrast * (1.0 - dx.abs() / thickness * 0.5);
                    }
                }
            }
        }
        for v in &mut img {
            let noise: f64 = StandardNormal.sample(&mut rng);
            *v = (*v + 0.30 * noise).clamp(0.0, 1.0);
        }
        let mut x = DVector::from_vec(img);
        let norm = x.norm();
        if norm > 0.0 {
            x /= norm;
        }
        features.push(x);
        labels.push(label);
    }
    let mut ds = Dataset::new(features, labels, (0..n as u64).collect())?;
    ds.record_preprocessing(format!("digit_pair(side={side})"));
    ds.record_preprocessing("row_l2_normalize");
    Ok(ds)
}
