//! Command-line front end: train / unlearn / retrain / evaluate / ablate-k.
//!
//! All randomness flows from explicit `--seed` flags. Errors are emitted
//! as a single JSON line on stderr with a stable `code` field; exit codes
//! follow 0 ok / 2 usage / 3 data / 4 numeric / 5 capacity.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::dataset::{
    binarize_pair, generate_digit_pair, generate_synthetic, load_csv, load_libsvm, one_vs_rest,
    Dataset, LoadOptions, SyntheticSpec,
};
use crate::error::{Error, Result};
use crate::mia::{build_attack_set, mia_report, train_attack};
use crate::objective::{test_accuracy, LossConfig, LossKind, DEFAULT_DIM_GUARD};
use crate::persist;
use crate::trainer::{init_training, retrain_oracle, TrainConfig};
use crate::unlearner::{
    reference_delta_w_full, unlearn as run_unlearn, BackingSpec, Mode, UnlearnOptions, UnlearnSet,
};

pub const THREADS_ENV_VAR: &str = "MINI_UNLEARN_THREADS";

#[derive(Parser)]
#[command(
    name = "mini-unlearn",
    about = "SGD training with last-k history capture and contraction-mapping unlearning",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train by mini-batch SGD, persisting the last-k step history.
    Train(TrainArgs),
    /// Compute unlearned parameters for a deletion set from a training log.
    Unlearn(UnlearnArgs),
    /// Retrain with the same batch draws minus the deletion set.
    Retrain(RetrainArgs),
    /// Accuracy and membership-inference metrics for model files.
    Evaluate(EvaluateArgs),
    /// Accuracy of the unlearned model as the history window k varies.
    AblateK(AblateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Libsvm,
    Csv,
}

#[derive(Args, Clone)]
struct DatasetArgs {
    /// Seeded generator spec: "n=500,p=10[,seed=0][,scale=1][,noise=0]"
    /// or "digits[,n=2000][,side=16][,seed=0]".
    #[arg(long, value_name = "SPEC")]
    synthetic: Option<String>,
    /// Dataset file to load instead of generating.
    #[arg(long, value_name = "PATH", conflicts_with = "synthetic")]
    data: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "libsvm")]
    format: DataFormat,
    /// CSV label column.
    #[arg(long, default_value_t = 0)]
    label_col: usize,
    /// Keep only two labels "a,b" and map them to 0/1 (e.g. "0,1").
    #[arg(long, value_name = "A,B")]
    pair: Option<String>,
    /// Map this label to 1 and all others to 0 (one-vs-rest reduction).
    #[arg(long, value_name = "LABEL", conflicts_with = "pair")]
    ovr: Option<f64>,
    /// Skip per-row L2 normalization of loaded files.
    #[arg(long)]
    no_normalize: bool,
}

impl DatasetArgs {
    fn load(&self) -> Result<Dataset> {
        let mut ds = match (&self.synthetic, &self.data) {
            (Some(spec), None) => parse_synthetic_spec(spec)?,
            (None, Some(path)) => {
                let opts = LoadOptions {
                    normalize_rows: !self.no_normalize,
                    n_features: None,
                };
                match self.format {
                    DataFormat::Libsvm => load_libsvm(path, &opts)?,
                    DataFormat::Csv => load_csv(path, self.label_col, &opts)?,
                }
            }
            _ => {
                return Err(Error::Config(
                    "exactly one of --synthetic or --data is required".into(),
                ))
            }
        };
        if let Some(pair) = &self.pair {
            let (a, b) = pair.split_once(',').ok_or_else(|| {
                Error::Config(format!("--pair expects \"a,b\", got '{pair}'"))
            })?;
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("--pair label '{a}' is not numeric")))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("--pair label '{b}' is not numeric")))?;
            ds = binarize_pair(&ds, a, b)?;
        }
        if let Some(positive) = self.ovr {
            ds = one_vs_rest(&ds, positive)?;
        }
        Ok(ds)
    }
}

fn parse_synthetic_spec(spec: &str) -> Result<Dataset> {
    let mut kind = "gaussian";
    let mut n = 500usize;
    let mut p = 10usize;
    let mut seed = 0u64;
    let mut scale = 1.0f64;
    let mut noise = 0.0f64;
    let mut side = 16usize;
    for (i, token) in spec.split(',').enumerate() {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if i == 0 && token == "digits" {
            kind = "digits";
            continue;
        }
        let (key, value) = token.split_once('=').ok_or_else(|| {
            Error::Config(format!("synthetic spec token '{token}' is not key=value"))
        })?;
        let parse_err =
            |k: &str| Error::Config(format!("invalid value for '{k}' in synthetic spec"));
        match key {
            "n" => n = value.parse().map_err(|_| parse_err("n"))?,
            "p" => p = value.parse().map_err(|_| parse_err("p"))?,
            "seed" => seed = value.parse().map_err(|_| parse_err("seed"))?,
            "scale" => scale = value.parse().map_err(|_| parse_err("scale"))?,
            "noise" => noise = value.parse().map_err(|_| parse_err("noise"))?,
            "side" => side = value.parse().map_err(|_| parse_err("side"))?,
            other => {
                return Err(Error::Config(format!(
                    "unknown synthetic spec key '{other}'"
                )))
            }
        }
    }
    if kind == "digits" {
        generate_digit_pair(n, side, seed)
    } else {
        let mut s = SyntheticSpec::new(n, p, seed);
        s.feature_scale = scale;
        s.label_noise = noise;
        generate_synthetic(&s)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// SGD steps T (one batch per step).
    #[arg(long)]
    epochs: usize,
    #[arg(long)]
    batch_size: usize,
    #[arg(long)]
    lr: f64,
    #[arg(long, default_value_t = 0.005)]
    l2: f64,
    /// History window k.
    #[arg(long)]
    k: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "logistic")]
    loss: CliLoss,
    /// Reject configs whose eta * L is not contractive.
    #[arg(long)]
    strict: bool,
    /// Output log directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliLoss {
    Logistic,
    Quadratic,
}

impl CliLoss {
    fn kind(self) -> LossKind {
        match self {
            CliLoss::Logistic => LossKind::Logistic,
            CliLoss::Quadratic => LossKind::Quadratic,
        }
    }
}

#[derive(Args, Clone)]
struct UnlearnSelection {
    /// Text file with one sample index per line ('#' comments allowed).
    #[arg(long, value_name = "FILE")]
    unlearn_indices: Option<PathBuf>,
    /// Fraction of samples to draw for deletion.
    #[arg(long, value_name = "RATIO", conflicts_with = "unlearn_indices")]
    unlearn_ratio: Option<f64>,
    /// Seed for --unlearn-ratio draws.
    #[arg(long, default_value_t = 0)]
    unlearn_seed: u64,
}

impl UnlearnSelection {
    fn resolve(&self, n: usize) -> Result<UnlearnSet> {
        match (&self.unlearn_indices, self.unlearn_ratio) {
            (Some(path), None) => {
                let raw = fs::read_to_string(path)?;
                let mut indices = Vec::new();
                for (lineno, line) in raw.lines().enumerate() {
                    let line = line.split('#').next().unwrap_or("").trim();
                    if line.is_empty() {
                        continue;
                    }
                    let idx: usize = line.parse().map_err(|_| Error::Parse {
                        path: path.display().to_string(),
                        line: lineno + 1,
                        msg: format!("invalid sample index '{line}'"),
                    })?;
                    indices.push(idx);
                }
                UnlearnSet::new(indices, n)
            }
            (None, Some(ratio)) => UnlearnSet::from_ratio(ratio, n, self.unlearn_seed),
            _ => Err(Error::Config(
                "exactly one of --unlearn-indices or --unlearn-ratio is required".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Horner,
    Parallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliBacking {
    Auto,
    Exact,
    Lbfgs,
}

#[derive(Args)]
struct UnlearnArgs {
    /// Training log directory.
    #[arg(long)]
    log: PathBuf,
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    selection: UnlearnSelection,
    /// History window; defaults to everything the log holds.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "horner")]
    mode: CliMode,
    #[arg(long, value_enum, default_value = "auto")]
    backing: CliBacking,
    /// Secant pairs for the lbfgs backing.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Worker threads for parallel mode (falls back to MINI_UNLEARN_THREADS).
    #[arg(long)]
    threads: Option<usize>,
    /// Dimension guard for materialized operators.
    #[arg(long, default_value_t = DEFAULT_DIM_GUARD)]
    guard: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RetrainArgs {
    /// Training log directory (supplies the hyperparameters and seed).
    #[arg(long)]
    log: PathBuf,
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    selection: UnlearnSelection,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Model to evaluate as "name=path/to/w.f64"; repeatable.
    #[arg(long, value_name = "NAME=PATH", required = true)]
    model: Vec<String>,
    /// Test set for accuracy.
    #[command(flatten)]
    dataset: DatasetArgs,
    #[arg(long, default_value_t = 0.005)]
    l2: f64,
    /// Training set spec for membership inference (same syntax as
    /// --synthetic, or a file path).
    #[arg(long, value_name = "SPEC")]
    mia_train: Option<String>,
    /// Holdout non-member spec for membership inference.
    #[arg(long, value_name = "SPEC")]
    mia_holdout: Option<String>,
    #[command(flatten)]
    selection: UnlearnSelection,
    #[arg(long, default_value_t = 0)]
    attack_seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    output: OutputFormat,
    /// Write rows here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long)]
    log: PathBuf,
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    selection: UnlearnSelection,
    /// Comma-separated history windows, e.g. "2,4,6,8,10".
    #[arg(long, value_name = "LIST")]
    k_list: String,
    /// Test set spec for accuracy (same syntax as --synthetic, or a path).
    #[arg(long, value_name = "SPEC")]
    test: Option<String>,
    /// Add the truncation error against the full-history reference
    /// recurrence (replays training; small instances only).
    #[arg(long)]
    with_reference: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Dataset spec that is either a generator string or a file path.
fn load_aux_dataset(spec: &str, base: &DatasetArgs) -> Result<Dataset> {
    if spec.contains('=') || spec.starts_with("digits") {
        parse_synthetic_spec(spec)
    } else {
        let mut args = base.clone();
        args.synthetic = None;
        args.data = Some(PathBuf::from(spec));
        args.load()
    }
}

/// Entry point; returns the process exit code.
pub fn run<I>(args: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return 0;
            }
            emit_error_json(
                "usage",
                err.to_string().lines().next().unwrap_or("usage error"),
            );
            return 2;
        }
    };
    let outcome = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Unlearn(args) => cmd_unlearn(args),
        Command::Retrain(args) => cmd_retrain(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::AblateK(args) => cmd_ablate_k(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            emit_error_json(err.code(), &err.to_string());
            err.exit_code()
        }
    }
}

fn emit_error_json(code: &str, message: &str) {
    #[derive(Serialize)]
    struct Line<'a> {
        code: &'a str,
        message: &'a str,
    }
    let line = serde_json::to_string(&Line { code, message })
        .unwrap_or_else(|_| format!("{{\"code\":\"{code}\"}}"));
    eprintln!("{line}");
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let dataset = args.dataset.load()?;
    let cfg = TrainConfig {
        steps: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.lr,
        history_k: args.k,
        seed: args.seed,
        loss: LossConfig {
            kind: args.loss.kind(),
            l2_coeff: args.l2,
        },
        strict: args.strict,
    };
    if let Some(eta_l) = cfg.validate(&dataset)? {
        if eta_l >= 1.0 {
            emit_error_json(
                "contraction-warning",
                &format!("eta * L = {eta_l:.4} >= 1: truncation error bound does not contract"),
            );
        }
    }
    let log = init_training(&dataset, &cfg)?;
    persist::save_training_log(&args.out, &log, &dataset)?;
    println!(
        "trained {} steps (k={} history) -> {}",
        cfg.steps,
        cfg.history_k,
        args.out.display()
    );
    Ok(())
}

fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var(THREADS_ENV_VAR)
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(1)
    .max(1)
}

fn load_log_and_dataset(
    log_dir: &Path,
    dataset_args: &DatasetArgs,
) -> Result<(crate::trainer::TrainingLog, Dataset)> {
    let log = persist::load_training_log(log_dir)?;
    let dataset = dataset_args.load()?;
    Ok((log, dataset))
}

fn cmd_unlearn(args: UnlearnArgs) -> Result<()> {
    let (log, dataset) = load_log_and_dataset(&args.log, &args.dataset)?;
    let set = args.selection.resolve(dataset.len())?;
    let opts = UnlearnOptions {
        k: args.k,
        mode: match args.mode {
            CliMode::Horner => Mode::Horner,
            CliMode::Parallel => Mode::Parallel,
        },
        backing: match args.backing {
            CliBacking::Auto => None,
            CliBacking::Exact => Some(BackingSpec::Exact),
            CliBacking::Lbfgs => Some(BackingSpec::Lbfgs { m: args.m }),
        },
        lbfgs_m: args.m,
        threads: resolve_threads(args.threads),
        dim_guard: args.guard,
    };
    let started = Instant::now();
    let result = run_unlearn(&log, &dataset, &set, &opts)?;
    let timing_ms = started.elapsed().as_millis() as u64;
    persist::save_unlearn_result(
        &args.out,
        &result,
        set.len(),
        dataset.len(),
        &log.dataset_fingerprint,
        timing_ms,
    )?;
    println!(
        "unlearned {} samples (k={}, {:?}/{:?}, |dw|={:.3e}) -> {}",
        set.len(),
        result.k_used,
        result.mode,
        result.backing,
        result.delta_w.norm(),
        args.out.display()
    );
    Ok(())
}

fn cmd_retrain(args: RetrainArgs) -> Result<()> {
    let (log, dataset) = load_log_and_dataset(&args.log, &args.dataset)?;
    if dataset.fingerprint() != log.dataset_fingerprint {
        return Err(Error::FingerprintMismatch {
            expected: log.dataset_fingerprint.clone(),
            got: dataset.fingerprint(),
        });
    }
    let set = args.selection.resolve(dataset.len())?;
    let started = Instant::now();
    let w_star = retrain_oracle(&dataset, &set, &log.config)?;
    let timing_ms = started.elapsed().as_millis() as u64;

    fs::create_dir_all(&args.out)?;
    #[derive(Serialize)]
    struct RetrainMeta<'a> {
        format_version: u32,
        method: &'a str,
        n_unlearned: usize,
        unlearn_ratio: f64,
        dataset_fingerprint: &'a str,
        timing_ms: u64,
    }
    let meta = RetrainMeta {
        format_version: persist::MANIFEST_FORMAT_VERSION,
        method: "retrain",
        n_unlearned: set.len(),
        unlearn_ratio: set.ratio(dataset.len()),
        dataset_fingerprint: &log.dataset_fingerprint,
        timing_ms,
    };
    let mut file = fs::File::create(args.out.join("result.json"))?;
    serde_json::to_writer_pretty(&mut file, &meta)?;
    file.write_all(b"\n")?;
    persist::save_param_vector(&args.out.join("w_star.f64"), &w_star)?;
    let delta = &w_star - &log.final_w;
    persist::save_param_vector(&args.out.join("delta_w.f64"), &delta)?;
    println!(
        "retrained without {} samples -> {}",
        set.len(),
        args.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct EvalRow {
    model: String,
    population: String,
    n: usize,
    accuracy: Option<f64>,
    mia_precision: Option<f64>,
    mia_recall: Option<f64>,
    attack_auc: Option<f64>,
}

fn format_rows(rows: &[EvalRow], format: OutputFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            out.push_str("model,population,n,accuracy,mia_precision,mia_recall,attack_auc\n");
            for r in rows {
                let cell = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.model,
                    r.population,
                    r.n,
                    cell(r.accuracy),
                    cell(r.mia_precision),
                    cell(r.mia_recall),
                    cell(r.attack_auc),
                ));
            }
        }
        OutputFormat::Json => {
            for r in rows {
                out.push_str(&serde_json::to_string(r)?);
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let test_set = args.dataset.load()?;
    let loss = LossConfig::logistic(args.l2);
    let mut models = Vec::new();
    for spec in &args.model {
        let (name, path) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--model expects name=path, got '{spec}'")))?;
        let w = persist::load_param_vector(Path::new(path))?;
        models.push((name.to_string(), w));
    }

    // Optional membership-inference setup: split retained members and
    // holdout non-members 50/50 into attack-training and evaluation
    // halves (seeded, disclosed by --attack-seed).
    let mia_inputs = match (&args.mia_train, &args.mia_holdout) {
        (Some(train_spec), Some(holdout_spec)) => {
            let train = load_aux_dataset(train_spec, &args.dataset)?;
            let holdout = load_aux_dataset(holdout_spec, &args.dataset)?;
            let set = args.selection.resolve(train.len())?;
            Some((train, holdout, set))
        }
        (None, None) => None,
        _ => {
            return Err(Error::Config(
                "--mia-train and --mia-holdout must be given together".into(),
            ))
        }
    };

    let mut rows = Vec::new();
    for (name, w) in &models {
        let accuracy = test_accuracy(w, &test_set, &loss)?;
        rows.push(EvalRow {
            model: name.clone(),
            population: "test".into(),
            n: test_set.len(),
            accuracy: Some(accuracy),
            mia_precision: None,
            mia_recall: None,
            attack_auc: None,
        });

        if let Some((train, holdout, set)) = &mia_inputs {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let retained_idx: Vec<usize> =
                (0..train.len()).filter(|i| !set.contains(*i)).collect();
            let unlearned = train.subset(set.indices())?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.attack_seed);
            let mut shuffled_members = retained_idx.clone();
            shuffled_members.shuffle(&mut rng);
            let mut holdout_idx: Vec<usize> = (0..holdout.len()).collect();
            holdout_idx.shuffle(&mut rng);
            let half_m = shuffled_members.len() / 2;
            let half_h = holdout_idx.len() / 2;
            let members_fit = train.subset(&shuffled_members[..half_m])?;
            let members_eval = train.subset(&shuffled_members[half_m..])?;
            let holdout_fit = holdout.subset(&holdout_idx[..half_h])?;
            let holdout_eval = holdout.subset(&holdout_idx[half_h..])?;

            let examples = build_attack_set(w, &members_fit, &holdout_fit, &loss)?;
            let attack = train_attack(&examples, args.attack_seed)?;
            let report =
                mia_report(&attack, w, &unlearned, &members_eval, &holdout_eval, &loss)?;

            rows.push(EvalRow {
                model: name.clone(),
                population: "unlearned".into(),
                n: report.n_unlearned,
                accuracy: Some(test_accuracy(w, &unlearned, &loss)?),
                mia_precision: Some(report.precision_unlearned),
                mia_recall: Some(report.recall_unlearned),
                attack_auc: Some(report.attack_auc),
            });
            rows.push(EvalRow {
                model: name.clone(),
                population: "retained".into(),
                n: report.n_retained,
                accuracy: Some(test_accuracy(w, &members_eval, &loss)?),
                mia_precision: Some(report.precision_retained),
                mia_recall: Some(report.recall_retained),
                attack_auc: Some(report.attack_auc),
            });
        }
    }

    let text = format_rows(&rows, args.output)?;
    match &args.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_ablate_k(args: AblateArgs) -> Result<()> {
    let (log, dataset) = load_log_and_dataset(&args.log, &args.dataset)?;
    let set = args.selection.resolve(dataset.len())?;
    let mut k_values = Vec::new();
    for tok in args.k_list.split(',') {
        let k: usize = tok
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("invalid k value '{tok}'")))?;
        k_values.push(k);
    }
    if k_values.is_empty() {
        return Err(Error::Config("--k-list is empty".into()));
    }
    if let Some(&max_k) = k_values.iter().max() {
        if max_k > log.history.len() {
            return Err(Error::Capacity(format!(
                "k = {max_k} exceeds the logged history window {}",
                log.history.len()
            )));
        }
    }
    let test_set = args
        .test
        .as_deref()
        .map(|spec| load_aux_dataset(spec, &args.dataset))
        .transpose()?;
    let reference = if args.with_reference {
        Some(reference_delta_w_full(&dataset, &log.config, &set)?)
    } else {
        None
    };

    let mut out = String::from("k,accuracy,delta_w_norm,err_vs_full\n");
    for &k in &k_values {
        let opts = UnlearnOptions {
            k: Some(k),
            ..UnlearnOptions::default()
        };
        let result = run_unlearn(&log, &dataset, &set, &opts)?;
        let accuracy = match &test_set {
            Some(ts) => format!(
                "{:.6}",
                test_accuracy(&result.unlearned_w, ts, &log.config.loss)?
            ),
            None => String::new(),
        };
        let err = match &reference {
            Some(r) => format!("{:.12e}", (&result.delta_w - &r.delta_w).norm()),
            None => String::new(),
        };
        out.push_str(&format!(
            "{k},{accuracy},{:.12e},{err}\n",
            result.delta_w.norm()
        ));
    }
    match &args.out {
        Some(path) => fs::write(path, out)?,
        None => print!("{out}"),
    }
    Ok(())
}
