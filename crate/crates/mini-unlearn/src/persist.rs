//! On-disk formats.
//!
//! A training log is a directory:
//!
//! ```text
//! <dir>/
//!   manifest.json        run parameters, PRNG name, dataset fingerprint
//!   final_w.f64          length-prefixed little-endian f64 array
//!   step_<l>/
//!     w_before.f64       parameters entering step l
//!     grad_sum.f64       batch gradient sum at w_before
//!     batch.u32          raw little-endian u32 sample indices
//! ```
//!
//! `.f64` files carry an 8-byte little-endian element count followed by
//! IEEE-754 binary64 values; `.u32` files are raw little-endian 32-bit
//! values sized by the file. Identical runs produce byte-identical arrays;
//! only the manifest's `created_at_unix` differs.
//!
//! An unlearn/retrain result is a directory with `result.json`,
//! `delta_w.f64` and `w_star.f64`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::objective::{LossConfig, ParamVector};
use crate::trainer::{StepRecord, TrainConfig, TrainingLog, PRNG_NAME};
use crate::unlearner::{BackingUsed, Mode, UnlearnResult};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

/// Run metadata persisted next to the binary arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub loss: LossConfig,
    pub n: usize,
    pub p: usize,
    pub steps: usize,
    pub history_k: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub prng: String,
    /// Batches are drawn without replacement within each step.
    pub sampling: String,
    pub dataset_fingerprint: String,
    pub preprocessing: Vec<String>,
    pub strict: bool,
    pub created_at_unix: u64,
}

impl RunManifest {
    pub fn for_log(log: &TrainingLog, n: usize, p: usize) -> Self {
        RunManifest {
            format_version: MANIFEST_FORMAT_VERSION,
            loss: log.config.loss,
            n,
            p,
            steps: log.config.steps,
            history_k: log.config.history_k,
            batch_size: log.config.batch_size,
            learning_rate: log.config.learning_rate,
            seed: log.config.seed,
            prng: PRNG_NAME.to_string(),
            sampling: "without_replacement".to_string(),
            dataset_fingerprint: log.dataset_fingerprint.clone(),
            preprocessing: log.preprocessing.clone(),
            strict: log.config.strict,
            created_at_unix: unix_now(),
        }
    }
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Writes a length-prefixed little-endian f64 array.
pub fn write_f64_array(path: &Path, values: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(8 + values.len() * 8);
    buf.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_f64_array(path: &Path) -> Result<Vec<f64>> {
    let mut file = fs::File::open(path)?;
    let mut count_bytes = [0u8; 8];
    file.read_exact(&mut count_bytes)?;
    let count = u64::from_le_bytes(count_bytes) as usize;
    let mut payload = Vec::new();
    file.read_to_end(&mut payload)?;
    if payload.len() != count * 8 {
        return Err(Error::Data(format!(
            "{}: expected {} f64 values, file holds {} bytes",
            path.display(),
            count,
            payload.len()
        )));
    }
    Ok(payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Writes raw little-endian u32 values (length given by the file size).
pub fn write_u32_array(path: &Path, values: &[u32]) -> Result<()> {
    let mut buf = Vec::with_capacity(values.len() * 4);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_u32_array(path: &Path) -> Result<Vec<u32>> {
    let payload = fs::read(path)?;
    if payload.len() % 4 != 0 {
        return Err(Error::Data(format!(
            "{}: size {} is not a multiple of 4",
            path.display(),
            payload.len()
        )));
    }
    Ok(payload
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn save_param_vector(path: &Path, w: &ParamVector) -> Result<()> {
    write_f64_array(path, w.as_slice())
}

pub fn load_param_vector(path: &Path) -> Result<ParamVector> {
    Ok(DVector::from_vec(read_f64_array(path)?))
}

/// Persists a training log as a directory (created if needed).
pub fn save_training_log(dir: &Path, log: &TrainingLog, dataset: &Dataset) -> Result<()> {
    fs::create_dir_all(dir)?;
    let manifest = RunManifest::for_log(log, dataset.len(), dataset.dim());
    let mut file = fs::File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(&mut file, &manifest)?;
    file.write_all(b"\n")?;

    save_param_vector(&dir.join("final_w.f64"), &log.final_w)?;
    for rec in &log.history {
        let step_dir = dir.join(format!("step_{}", rec.step));
        fs::create_dir_all(&step_dir)?;
        save_param_vector(&step_dir.join("w_before.f64"), &rec.w_before)?;
        save_param_vector(&step_dir.join("grad_sum.f64"), &rec.grad_sum_full)?;
        let batch: Vec<u32> = rec.batch_indices.iter().map(|&i| i as u32).collect();
        write_u32_array(&step_dir.join("batch.u32"), &batch)?;
    }
    Ok(())
}

pub fn load_manifest(dir: &Path) -> Result<RunManifest> {
    let raw = fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: RunManifest = serde_json::from_str(&raw)?;
    if manifest.format_version != MANIFEST_FORMAT_VERSION {
        return Err(Error::Data(format!(
            "unsupported manifest format_version {} (expected {})",
            manifest.format_version, MANIFEST_FORMAT_VERSION
        )));
    }
    Ok(manifest)
}

/// Loads a training log directory back into memory and re-checks its
/// structural invariants.
pub fn load_training_log(dir: &Path) -> Result<TrainingLog> {
    let manifest = load_manifest(dir)?;
    let config = TrainConfig {
        steps: manifest.steps,
        batch_size: manifest.batch_size,
        learning_rate: manifest.learning_rate,
        history_k: manifest.history_k,
        seed: manifest.seed,
        loss: manifest.loss,
        strict: manifest.strict,
    };
    let final_w = load_param_vector(&dir.join("final_w.f64"))?;

    let start = manifest.steps - manifest.history_k + 1;
    let mut history = Vec::with_capacity(manifest.history_k);
    for step in start..=manifest.steps {
        let step_dir = dir.join(format!("step_{step}"));
        let w_before = load_param_vector(&step_dir.join("w_before.f64"))?;
        let grad_sum_full = load_param_vector(&step_dir.join("grad_sum.f64"))?;
        let batch = read_u32_array(&step_dir.join("batch.u32"))?
            .into_iter()
            .map(|i| i as usize)
            .collect();
        history.push(StepRecord {
            step,
            batch_indices: batch,
            w_before,
            grad_sum_full,
        });
    }
    let log = TrainingLog {
        config,
        final_w,
        history,
        dataset_fingerprint: manifest.dataset_fingerprint,
        preprocessing: manifest.preprocessing,
    };
    log.check()?;
    Ok(log)
}

/// Metadata written next to the correction arrays. Timing is wall-clock
/// and excluded from idempotence comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultMeta {
    pub format_version: u32,
    pub mode: Mode,
    pub backing: BackingUsed,
    pub k_used: usize,
    pub n_unlearned: usize,
    pub unlearn_ratio: f64,
    pub r_estimate: Option<f64>,
    pub bound: Option<f64>,
    pub delta_w_norm: f64,
    pub dataset_fingerprint: String,
    pub timing_ms: u64,
}

pub fn save_unlearn_result(
    dir: &Path,
    result: &UnlearnResult,
    n_unlearned: usize,
    n_total: usize,
    fingerprint: &str,
    timing_ms: u64,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let meta = ResultMeta {
        format_version: MANIFEST_FORMAT_VERSION,
        mode: result.mode,
        backing: result.backing,
        k_used: result.k_used,
        n_unlearned,
        unlearn_ratio: n_unlearned as f64 / n_total as f64,
        r_estimate: result.r_estimate,
        bound: result.bound,
        delta_w_norm: result.delta_w.norm(),
        dataset_fingerprint: fingerprint.to_string(),
        timing_ms,
    };
    let mut file = fs::File::create(dir.join("result.json"))?;
    serde_json::to_writer_pretty(&mut file, &meta)?;
    file.write_all(b"\n")?;
    save_param_vector(&dir.join("delta_w.f64"), &result.delta_w)?;
    save_param_vector(&dir.join("w_star.f64"), &result.unlearned_w)?;
    Ok(())
}

pub fn load_result_meta(dir: &Path) -> Result<ResultMeta> {
    let raw = fs::read_to_string(dir.join("result.json"))?;
    Ok(serde_json::from_str(&raw)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_synthetic, SyntheticSpec};
    use crate::trainer::init_training;

    fn sample_log() -> (Dataset, TrainingLog) {
        let ds = generate_synthetic(&SyntheticSpec::new(40, 5, 77)).unwrap();
        let cfg = TrainConfig {
            steps: 12,
            batch_size: 8,
            learning_rate: 0.05,
            history_k: 5,
            seed: 3,
            loss: LossConfig::logistic(0.005),
            strict: false,
        };
        let log = init_training(&ds, &cfg).unwrap();
        (ds, log)
    }

    #[test]
    fn f64_array_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.f64");
        let values = vec![1.5, -2.25, 0.0, f64::MIN_POSITIVE, 1e300];
        write_f64_array(&path, &values).unwrap();
        assert_eq!(read_f64_array(&path).unwrap(), values);
        // 8-byte count prefix
        let raw = fs::read(&path).unwrap();
        assert_eq!(raw.len(), 8 + values.len() * 8);
        assert_eq!(u64::from_le_bytes(raw[..8].try_into().unwrap()), 5);
    }

    #[test]
    fn u32_array_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.u32");
        let values = vec![0u32, 7, 42, u32::MAX];
        write_u32_array(&path, &values).unwrap();
        assert_eq!(read_u32_array(&path).unwrap(), values);
        let raw = fs::read(&path).unwrap();
        assert_eq!(raw.len(), values.len() * 4);
    }

    #[test]
    fn truncated_f64_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.f64");
        write_f64_array(&path, &[1.0, 2.0]).unwrap();
        let mut raw = fs::read(&path).unwrap();
        raw.truncate(raw.len() - 3);
        fs::write(&path, raw).unwrap();
        assert!(read_f64_array(&path).is_err());
    }

    #[test]
    fn training_log_round_trip() {
        let (ds, log) = sample_log();
        let dir = tempfile::tempdir().unwrap();
        save_training_log(dir.path(), &log, &ds).unwrap();
        let loaded = load_training_log(dir.path()).unwrap();
        assert_eq!(loaded.final_w, log.final_w);
        assert_eq!(loaded.history, log.history);
        assert_eq!(loaded.dataset_fingerprint, log.dataset_fingerprint);
        assert_eq!(loaded.config.seed, log.config.seed);
        // replay still validates after the round trip
        assert!(loaded.verify_replay(&ds).unwrap() <= 1e-10);
    }

    #[test]
    fn manifest_rejects_unknown_version() {
        let (ds, log) = sample_log();
        let dir = tempfile::tempdir().unwrap();
        save_training_log(dir.path(), &log, &ds).unwrap();
        let path = dir.path().join("manifest.json");
        let raw = fs::read_to_string(&path)
            .unwrap()
            .replace("\"format_version\": 1", "\"format_version\": 99");
        fs::write(&path, raw).unwrap();
        assert!(load_training_log(dir.path()).is_err());
    }

    #[test]
    fn rerun_writes_identical_binary_arrays() {
        let (ds, log) = sample_log();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        save_training_log(dir_a.path(), &log, &ds).unwrap();
        save_training_log(dir_b.path(), &log, &ds).unwrap();
        let final_a = fs::read(dir_a.path().join("final_w.f64")).unwrap();
        let final_b = fs::read(dir_b.path().join("final_w.f64")).unwrap();
        assert_eq!(final_a, final_b);
        for rec in &log.history {
            for name in ["w_before.f64", "grad_sum.f64", "batch.u32"] {
                let a = fs::read(dir_a.path().join(format!("step_{}", rec.step)).join(name))
                    .unwrap();
                let b = fs::read(dir_b.path().join(format!("step_{}", rec.step)).join(name))
                    .unwrap();
                assert_eq!(a, b, "{name} differs");
            }
        }
    }
}
