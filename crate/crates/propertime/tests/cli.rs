//! End-to-end tests of the command-line binary: artifact layout, config
//! handling, exit codes, and rerun determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_propertime"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .env("PROPERTIME_OUTDIR", dir)
        .output()
        .expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be utf-8")
}

fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).expect("csv should exist");
    assert!(text.ends_with('\n'), "csv must end with a newline");
    let mut lines = text.lines();
    let header = lines.next().expect("csv must have a header").to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn derive_d_prints_the_kernel_staircase_and_the_operator() {
    let out = bin().arg("derive-d").output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("2, 1, 1"), "{text}");
    assert!(text.contains("surviving rate operator"), "{text}");
}

#[test]
fn derive_d_json_report_is_machine_readable() {
    let out = bin().args(["derive-d", "--json"]).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["stage_dims"], serde_json::json!([2, 1, 1]));
    let expected_diag = [1.0, 1.0, -1.0, -1.0];
    for i in 0..4 {
        for j in 0..4 {
            let re = v["matrix"][i][j][0].as_f64().unwrap();
            let im = v["matrix"][i][j][1].as_f64().unwrap();
            let want = if i == j { expected_diag[i] } else { 0.0 };
            assert!((re - want).abs() <= 1e-10 && im.abs() <= 1e-10, "entry {i},{j}");
        }
    }
}

#[test]
fn free_evolve_writes_the_rate_series_with_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "free-evolve",
            "--grid-n",
            "64",
            "--t1",
            "5",
            "--samples",
            "201",
            "--out",
            "rates.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("rates.csv"));
    assert_eq!(header, "t,rate,tau");
    assert_eq!(rows.len(), 201);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 0.0);
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.0);
    let r0: f64 = rows[0][1].parse().unwrap();
    assert!(r0 > 0.0 && r0 < 1.0, "positive-branch rate in (0,1): {r0}");
    // no temp files may survive the atomic rename
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "rates.csv")
        .collect();
    assert!(leftovers.is_empty(), "unexpected files: {leftovers:?}");
}

#[test]
fn free_evolve_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "free-evolve",
        "--grid-n",
        "64",
        "--t1",
        "5",
        "--samples",
        "201",
        "--out",
        "a.csv",
    ];
    assert!(run_in(dir.path(), &args).status.success());
    let first = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert!(run_in(dir.path(), &args).status.success());
    let second = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn free_evolve_spectrum_flag_writes_a_second_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "free-evolve",
            "--branch",
            "mixed",
            "--grid-n",
            "64",
            "--t1",
            "40",
            "--samples",
            "2049",
            "--out",
            "rates.csv",
            "--spectrum",
            "spectrum.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("spectrum.csv"));
    assert_eq!(header, "freq,power");
    assert_eq!(rows.len(), 2049 / 2);
    assert!(stdout(&out).contains("peak"));
}

#[test]
fn config_file_drives_the_run_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    std::fs::write(
        &cfg_path,
        "[free-evolve]\nmass = 2.0\ngrid_n = 64\nt1 = 5.0\nsamples = 101\nout = \"from_config.csv\"\n\n[magnetar]\nsteps = 4\n",
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "free-evolve",
            "--config",
            cfg_path.to_str().unwrap(),
            "--out",
            "from_flag.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("from_flag.csv").exists());
    assert!(!dir.path().join("from_config.csv").exists());

    // the same file also configures the magnetar sweep
    let out = run_in(
        dir.path(),
        &["magnetar", "--config", cfg_path.to_str().unwrap(), "--out", "b.csv"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let (_, rows) = read_csv(&dir.path().join("b.csv"));
    assert_eq!(rows.len(), 4);
}

#[test]
fn misspelled_config_key_is_a_usage_error_with_a_suggestion() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    std::fs::write(&cfg_path, "[free-evolve]\nsigmap = 0.3\n").unwrap();
    let out = run_in(
        dir.path(),
        &["free-evolve", "--config", cfg_path.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("unknown key `sigmap`"), "{err}");
    assert!(err.contains("did you mean `sigma_p`?"), "{err}");
}

#[test]
fn zero_packet_width_is_a_usage_error_naming_the_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["free-evolve", "--sigma-p", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("sigma_p > 0"), "{}", stderr(&out));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bin().args(["free-evolve", "--frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fw_check_small_lattice_passes_the_bands() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["fw-check", "--nx", "12", "--ny", "12"]);
    assert!(
        out.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        stdout(&out),
        stderr(&out)
    );
    let (header, rows) = read_csv(&dir.path().join("fw_scaling.csv"));
    assert_eq!(header, "vscale,res_beta,res_rate,ratio_small");
    assert_eq!(rows.len(), 4);
    let text = stdout(&out);
    assert_eq!(text.matches(" pass").count(), 3, "{text}");
}

#[test]
fn fw_check_outside_the_expansion_regime_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["fw-check", "--nx", "12", "--ny", "12", "--vscales", "1.6,0.8"],
    );
    assert_eq!(out.status.code(), Some(1), "stdout:\n{}", stdout(&out));
    assert!(stderr(&out).contains("out of band"), "{}", stderr(&out));
    // the artifact is still written so the failure can be inspected
    assert!(dir.path().join("fw_scaling.csv").exists());
}

#[test]
fn magnetar_sweep_covers_the_documented_range_and_flags_strong_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["magnetar", "--steps", "6"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("magnetar.csv"));
    assert_eq!(header, "B_tesla,shift,flag");
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 1.0);
    assert_eq!(rows[5][0].parse::<f64>().unwrap(), 1e10);
    assert_eq!(rows[0][2], "ok");
    assert_eq!(rows[5][2], "expansion-invalid");
    let shift_small: f64 = rows[0][1].parse().unwrap();
    let shift_large: f64 = rows[5][1].parse().unwrap();
    assert!((shift_small - 1.13e-10).abs() / 1.13e-10 < 0.01);
    assert!(shift_large > 0.1);
}

#[test]
fn magnetar_linear_spacing_hits_the_grid_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "magnetar", "--bmin", "1", "--bmax", "5", "--steps", "5", "--log", "false",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let (_, rows) = read_csv(&dir.path().join("magnetar.csv"));
    let b: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(b, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
}

#[test]
fn selftest_json_reports_every_check_green() {
    let out = bin().args(["selftest", "--seed", "3", "--json"]).output().unwrap();
    assert!(out.status.success(), "{}", stdout(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["seed"], serde_json::json!(3));
    assert_eq!(v["passed"], serde_json::json!(true));
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 10, "suite should be broad, got {}", checks.len());
    for ch in checks {
        assert_eq!(ch["passed"], serde_json::json!(true), "{ch}");
    }
}
