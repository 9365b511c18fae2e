//! Integration tests of the command-line surface and its file formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mini_unlearn::persist;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mini-unlearn")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

const SYNTH: &str = "n=300,p=10,seed=1";

fn train_into(dir: &Path) {
    let out = run(&[
        "train",
        "--synthetic",
        SYNTH,
        "--epochs",
        "120",
        "--batch-size",
        "30",
        "--lr",
        "0.01",
        "--l2",
        "0.005",
        "--k",
        "10",
        "--seed",
        "7",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_ok(&out);
}

#[test]
fn zero_ratio_unlearn_writes_all_zero_delta() {
    let tmp = tempfile::tempdir().unwrap();
    let log_dir = tmp.path().join("log");
    train_into(&log_dir);
    let out_dir = tmp.path().join("unl");
    let out = run(&[
        "unlearn",
        "--log",
        log_dir.to_str().unwrap(),
        "--synthetic",
        SYNTH,
        "--unlearn-ratio",
        "0",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let delta = persist::read_f64_array(&out_dir.join("delta_w.f64")).unwrap();
    assert_eq!(delta.len(), 10);
    assert!(delta.iter().all(|&v| v == 0.0));
    let w_star = persist::read_f64_array(&out_dir.join("w_star.f64")).unwrap();
    let final_w = persist::read_f64_array(&log_dir.join("final_w.f64")).unwrap();
    assert_eq!(w_star, final_w);
}

#[test]
fn parallel_and_horner_modes_agree_through_the_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let log_dir = tmp.path().join("log");
    train_into(&log_dir);
    let mut results = Vec::new();
    for (mode, threads) in [("horner", "1"), ("parallel", "1"), ("parallel", "4")] {
        let out_dir = tmp.path().join(format!("{mode}{threads}"));
        let out = run(&[
            "unlearn",
            "--log",
            log_dir.to_str().unwrap(),
            "--synthetic",
            SYNTH,
            "--unlearn-ratio",
            "0.05",
            "--unlearn-seed",
            "3",
            "--mode",
            mode,
            "--threads",
            threads,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_ok(&out);
        results.push(persist::read_f64_array(&out_dir.join("w_star.f64")).unwrap());
    }
    for other in &results[1..] {
        let max_abs = results[0]
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_abs <= 1e-10, "modes disagree by {max_abs:e}");
    }
}

#[test]
fn threads_env_var_is_honored() {
    let tmp = tempfile::tempdir().unwrap();
    let log_dir = tmp.path().join("log");
    train_into(&log_dir);
    let out_dir = tmp.path().join("env");
    let out = Command::new(bin())
        .env("MINI_UNLEARN_THREADS", "4")
        .args([
            "unlearn",
            "--log",
            log_dir.to_str().unwrap(),
            "--synthetic",
            SYNTH,
            "--unlearn-ratio",
            "0.05",
            "--unlearn-seed",
            "3",
            "--mode",
            "parallel",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_ok(&out);
    assert!(out_dir.join("w_star.f64").exists());
}

#[test]
fn quadratic_full_history_retrain_matches_unlearn() {
    let tmp = tempfile::tempdir().unwrap();
    let log_dir = tmp.path().join("log");
    let out = run(&[
        "train",
        "--synthetic",
        "n=200,p=8,seed=4",
        "--loss",
        "quadratic",
        "--epochs",
        "25",
        "--batch-size",
        "20",
        "--lr",
        "0.01",
        "--l2",
        "0.005",
        "--k",
        "25",
        "--seed",
        "2",
        "--out",
        log_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);

    let unl_dir = tmp.path().join("unl");
    let ret_dir = tmp.path().join("ret");
    let common = [
        "--log",
        log_dir.to_str().unwrap(),
        "--synthetic",
        "n=200,p=8,seed=4",
        "--unlearn-ratio",
        "0.1",
        "--unlearn-seed",
        "5",
    ];
    let mut unl_args = vec!["unlearn"];
    unl_args.extend_from_slice(&common);
    unl_args.extend_from_slice(&["--out", unl_dir.to_str().unwrap()]);
    assert_ok(&run(&unl_args));
    let mut ret_args = vec!["retrain"];
    ret_args.extend_from_slice(&common);
    ret_args.extend_from_slice(&["--out", ret_dir.to_str().unwrap()]);
    assert_ok(&run(&ret_args));

    let w_unl = persist::read_f64_array(&unl_dir.join("w_star.f64")).unwrap();
    let w_ret = persist::read_f64_array(&ret_dir.join("w_star.f64")).unwrap();
    let norm: f64 = w_ret.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dist: f64 = w_unl
        .iter()
        .zip(&w_ret)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    assert!(dist / norm <= 1e-8, "relative distance {:e}", dist / norm);
}

#[test]
fn evaluate_zero_model_on_balanced_set_is_half() {
    let tmp = tempfile::tempdir().unwrap();
    let w_path = tmp.path().join("zero.f64");
    persist::write_f64_array(&w_path, &[0.0; 10]).unwrap();
    // generated labels are direction-based: seed 1 gives a near-balanced set
    let out = run(&[
        "evaluate",
        "--model",
        &format!("zero={}", w_path.display()),
        "--synthetic",
        SYNTH,
    ]);
    assert_ok(&out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let row = stdout.lines().nth(1).unwrap();
    let accuracy: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((accuracy - 0.5).abs() <= 0.06, "accuracy {accuracy}");
}

#[test]
fn evaluate_row_schema_is_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let w_path = tmp.path().join("w.f64");
    persist::write_f64_array(&w_path, &[0.25; 10]).unwrap();
    let out = run(&[
        "evaluate",
        "--model",
        &format!("m={}", w_path.display()),
        "--synthetic",
        "n=50,p=10,seed=2",
    ]);
    assert_ok(&out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    // golden: header plus one fully formatted row
    assert_eq!(
        stdout,
        "model,population,n,accuracy,mia_precision,mia_recall,attack_auc\n\
         m,test,50,0.420000,,,\n"
    );
}

#[test]
fn evaluate_emits_mia_population_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let log_dir = tmp.path().join("log");
    train_into(&log_dir);
    let out = run(&[
        "evaluate",
        "--model",
        &format!("orig={}", log_dir.join("final_w.f64").display()),
        "--synthetic",
        "n=200,p=10,seed=9",
        "--mia-train",
        SYNTH,
        "--mia-holdout",
        "n=300,p=10,seed=8",
        "--unlearn-ratio",
        "0.1",
        "--unlearn-seed",
        "3",
        "--output",
        "json",
    ]);
    assert_ok(&out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<serde_json::Value> = stdout
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let populations: Vec<&str> = rows
        .iter()
        .map(|r| r["population"].as_str().unwrap())
        .collect();
    assert_eq!(populations, ["test", "unlearned", "retained"]);
    for row in &rows[1..] {
        assert!(row["mia_precision"].is_number());
        assert!(row["attack_auc"].is_number());
    }
}

#[test]
fn ablate_k_at_full_history_matches_single_unlearn() {
    let tmp = tempfile::tempdir().unwrap();
    let log_dir = tmp.path().join("log");
    train_into(&log_dir);
    let unl_dir = tmp.path().join("unl");
    assert_ok(&run(&[
        "unlearn",
        "--log",
        log_dir.to_str().unwrap(),
        "--synthetic",
        SYNTH,
        "--unlearn-ratio",
        "0.05",
        "--unlearn-seed",
        "3",
        "--k",
        "10",
        "--out",
        unl_dir.to_str().unwrap(),
    ]));
    let meta = persist::load_result_meta(&unl_dir).unwrap();

    let out = run(&[
        "ablate-k",
        "--log",
        log_dir.to_str().unwrap(),
        "--synthetic",
        SYNTH,
        "--unlearn-ratio",
        "0.05",
        "--unlearn-seed",
        "3",
        "--k-list",
        "5,10",
    ]);
    assert_ok(&out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let last = stdout.lines().last().unwrap();
    assert!(last.starts_with("10,"));
    let norm: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
    assert!((norm - meta.delta_w_norm).abs() <= 1e-15 * meta.delta_w_norm.max(1.0));
}

#[test]
fn ablate_k_beyond_history_is_capacity_exit_5() {
    let tmp = tempfile::tempdir().unwrap();
    let log_dir = tmp.path().join("log");
    train_into(&log_dir);
    let out = run(&[
        "ablate-k",
        "--log",
        log_dir.to_str().unwrap(),
        "--synthetic",
        SYNTH,
        "--unlearn-ratio",
        "0.05",
        "--k-list",
        "5,40",
    ]);
    assert_eq!(out.status.code(), Some(5));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let err: serde_json::Value = serde_json::from_str(stderr.lines().next().unwrap()).unwrap();
    assert_eq!(err["code"], "capacity");
}

#[test]
fn missing_required_flag_is_usage_exit_2() {
    let out = run(&[
        "train",
        "--synthetic",
        SYNTH,
        "--epochs",
        "10",
        "--batch-size",
        "5",
        "--k",
        "5",
        "--seed",
        "1",
        "--out",
        "/tmp/never-created",
    ]); // --lr missing
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let err: serde_json::Value = serde_json::from_str(stderr.lines().next().unwrap()).unwrap();
    assert_eq!(err["code"], "usage");
    assert!(!PathBuf::from("/tmp/never-created").exists());
}

#[test]
fn fingerprint_mismatch_is_data_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let log_dir = tmp.path().join("log");
    train_into(&log_dir);
    let out = run(&[
        "unlearn",
        "--log",
        log_dir.to_str().unwrap(),
        "--synthetic",
        "n=300,p=10,seed=2",
        "--unlearn-ratio",
        "0.05",
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let err: serde_json::Value = serde_json::from_str(stderr.lines().next().unwrap()).unwrap();
    assert_eq!(err["code"], "fingerprint-mismatch");
}

#[test]
fn unlearn_indices_file_with_comments() {
    let tmp = tempfile::tempdir().unwrap();
    let log_dir = tmp.path().join("log");
    train_into(&log_dir);
    let idx_path = tmp.path().join("drop.txt");
    std::fs::write(&idx_path, "# deletion request\n3\n17\n42 # inline\n\n").unwrap();
    let out_dir = tmp.path().join("unl");
    let out = run(&[
        "unlearn",
        "--log",
        log_dir.to_str().unwrap(),
        "--synthetic",
        SYNTH,
        "--unlearn-indices",
        idx_path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let meta = persist::load_result_meta(&out_dir).unwrap();
    assert_eq!(meta.n_unlearned, 3);
}

#[test]
fn retrain_with_zero_ratio_reproduces_final_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    let log_dir = tmp.path().join("log");
    train_into(&log_dir);
    let out_dir = tmp.path().join("ret");
    assert_ok(&run(&[
        "retrain",
        "--log",
        log_dir.to_str().unwrap(),
        "--synthetic",
        SYNTH,
        "--unlearn-ratio",
        "0",
        "--out",
        out_dir.to_str().unwrap(),
    ]));
    let w_star = std::fs::read(out_dir.join("w_star.f64")).unwrap();
    let final_w = std::fs::read(log_dir.join("final_w.f64")).unwrap();
    assert_eq!(w_star, final_w, "retraining with nothing removed must be bitwise identical");
}

#[test]
fn ablate_k_reference_errors_decay_on_quadratic() {
    let tmp = tempfile::tempdir().unwrap();
    let log_dir = tmp.path().join("log");
    assert_ok(&run(&[
        "train",
        "--synthetic",
        "n=150,p=6,seed=3",
        "--loss",
        "quadratic",
        "--epochs",
        "40",
        "--batch-size",
        "15",
        "--lr",
        "0.05",
        "--l2",
        "0.005",
        "--k",
        "40",
        "--seed",
        "9",
        "--out",
        log_dir.to_str().unwrap(),
    ]));
    let out = run(&[
        "ablate-k",
        "--log",
        log_dir.to_str().unwrap(),
        "--synthetic",
        "n=150,p=6,seed=3",
        "--unlearn-ratio",
        "0.1",
        "--unlearn-seed",
        "2",
        "--k-list",
        "5,10,20,40",
        "--with-reference",
    ]);
    assert_ok(&out);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let errs: Vec<f64> = stdout
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(errs.len(), 4);
    for pair in errs.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-15, "errors not decaying: {errs:?}");
    }
    // full history on a quadratic objective reproduces the reference
    assert!(errs[3] <= 1e-10, "k = T error {:.3e}", errs[3]);
}

#[test]
fn train_rerun_is_byte_identical_in_binary_arrays() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    train_into(&a);
    train_into(&b);
    for name in ["final_w.f64", "step_120/w_before.f64", "step_120/batch.u32"] {
        let fa = std::fs::read(a.join(name)).unwrap();
        let fb = std::fs::read(b.join(name)).unwrap();
        assert_eq!(fa, fb, "{name} differs");
    }
}
