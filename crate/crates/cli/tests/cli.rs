use std::path::Path;
use std::process::{Command, Output};

use qinterp::output::report_from_json;
use qinterp_core::ConvergenceReport;

fn qinterp(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qinterp"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    assert_eq!(text.trim().lines().count(), 1, "stderr: {text}");
    serde_json::from_str(text.trim()).expect("stderr is one JSON line")
}

#[test]
fn converge_writes_csv_and_json_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinterp(
        &[
            "converge",
            "--operator",
            "basic",
            "--preset",
            "sin",
            "--q",
            "0.5",
            "--alpha",
            "1",
            "--n",
            "16,32,64,128,256,512",
            "--output",
            "run",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,sup_error,mean_error"));
    assert_eq!(lines.count(), 6);
    let report: ConvergenceReport =
        report_from_json(&std::fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert!(report.fitted_slope.is_some());
    assert_eq!(report.config["preset"], "sin");
}

#[test]
fn default_output_stem_is_command_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinterp(
        &["converge", "--preset", "exp", "--n", "16,32,64"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(dir.path().join("converge.csv").exists());
    assert!(dir.path().join("converge.json").exists());
}

#[test]
fn json_format_skips_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinterp(
        &[
            "converge", "--preset", "sin", "--format", "json", "--output", "r",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(!dir.path().join("r.csv").exists());
    assert!(dir.path().join("r.json").exists());
}

#[test]
fn frac_report_targets_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinterp(
        &[
            "frac",
            "--beta",
            "0.5",
            "--preset",
            "pow2",
            "--n",
            "64,128,256,512",
            "--output",
            "f",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let report =
        report_from_json(&std::fs::read_to_string(dir.path().join("f.json")).unwrap()).unwrap();
    assert_eq!(report.target_description, "D^beta f (oracle)");
    assert!(report.claimed_exponent.unwrap().contains("m - beta"));
    // non-power presets have no closed-form target
    let out = qinterp(&["frac", "--beta", "0.5", "--preset", "sin"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_required_flag_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinterp(&["converge", "--n", "16,32"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["status"], 2);
    assert!(err["message"].as_str().unwrap().contains("--preset"));
    let out = qinterp(&["frac", "--preset", "pow2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["message"]
        .as_str()
        .unwrap()
        .contains("--beta"));
}

#[test]
fn invalid_values_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["converge", "--preset", "sin", "--q", "1.5"],
        vec!["converge", "--preset", "sin", "--alpha", "-1"],
        vec!["converge", "--preset", "sin", "--n", "abc"],
        vec!["converge", "--preset", "sin", "--bogus"],
        vec!["manifold", "--preset", "sin-exp", "--chart", "sphere"],
        vec!["voronovskaya", "--preset", "abspow", "--m-max", "3"],
    ] {
        let out = qinterp(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        stderr_json(&out);
    }
}

#[test]
fn lattice_leaving_half_plane_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinterp(
        &["manifold", "--preset", "sin-exp", "--n", "4,8,16"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["message"]
        .as_str()
        .unwrap()
        .contains("increase n"));
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("blocker"), "x").unwrap();
    let out = qinterp(
        &[
            "converge",
            "--preset",
            "sin",
            "--n",
            "16,32,64",
            "--output",
            "blocker/sub/run",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stderr_json(&out)["error"], "io");
}

#[test]
fn help_exits_zero_and_lists_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinterp(&["--help"], dir.path());
    assert!(out.status.success());
    let out = qinterp(&["converge", "--help"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for flag in [
        "--config",
        "--print-config",
        "--q",
        "--alpha",
        "--operator",
        "--beta",
        "--nodes",
        "--frac-step",
        "--preset",
        "--chart",
        "--mode",
        "--n",
        "--lo",
        "--hi",
        "--points",
        "--eps",
        "--m-max",
        "--output",
        "--format",
    ] {
        assert!(text.contains(flag), "missing {flag}");
    }
    assert!(text.contains("0 < q < 1"));
    let out = qinterp(&["kernel-dump", "--help"], dir.path());
    assert!(String::from_utf8_lossy(&out.stdout).contains("n_m1"));
}

#[test]
fn print_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinterp(
        &[
            "voronovskaya",
            "--preset",
            "sin",
            "--q",
            "0.3",
            "--n",
            "16,32,64",
            "--points",
            "11",
            "--output",
            "a",
            "--print-config",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    std::fs::write(dir.path().join("cfg.json"), &out.stdout).unwrap();
    // nothing runs with --print-config
    assert!(!dir.path().join("a.csv").exists());
    let again = qinterp(
        &["voronovskaya", "--config", "cfg.json", "--print-config"],
        dir.path(),
    );
    assert_eq!(out.stdout, again.stdout);

    let direct = qinterp(
        &[
            "voronovskaya",
            "--preset",
            "sin",
            "--q",
            "0.3",
            "--n",
            "16,32,64",
            "--points",
            "11",
            "--output",
            "a",
        ],
        dir.path(),
    );
    assert!(direct.status.success());
    let from_file = qinterp(
        &["voronovskaya", "--config", "cfg.json", "--output", "b"],
        dir.path(),
    );
    assert!(from_file.status.success());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.json"),
        r#"{"preset": "sin", "q": 0.3, "n": [16, 32, 64]}"#,
    )
    .unwrap();
    let out = qinterp(
        &[
            "converge",
            "--config",
            "c.json",
            "--q",
            "0.7",
            "--print-config",
        ],
        dir.path(),
    );
    let cfg: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cfg["q"], 0.7);
    assert_eq!(cfg["preset"], "sin");
}

#[test]
fn config_with_unknown_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("c.json"),
        r#"{"preset": "sin", "steps": 3}"#,
    )
    .unwrap();
    let out = qinterp(&["converge", "--config", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = qinterp(&["converge", "--config", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn kernel_dump_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = qinterp(
        &[
            "kernel-dump",
            "--n",
            "8,16,32",
            "--lo",
            "-2",
            "--hi",
            "2",
            "--points",
            "40",
            "--output",
            "k",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let csv = std::fs::read_to_string(dir.path().join("k.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,x,frac_nx,psi,m0,m1,m2,m3,n_m1"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 120);
    for r in &rows {
        assert!((r[4] - 1.0).abs() <= 1e-12);
        assert!(r[3] > 0.0);
    }
    // rows sharing frac(nx) share n * M_1
    for a in &rows {
        for b in &rows {
            if (a[2] - b[2]).abs() < 1e-12 {
                assert!((a[8] - b[8]).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn manifold_euclidean_and_torus() {
    let dir = tempfile::tempdir().unwrap();
    for chart in ["euclidean", "torus"] {
        let out = qinterp(
            &[
                "manifold", "--chart", chart, "--preset", "sin", "--n", "16,32,64", "--output",
                chart,
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{out:?}");
        assert!(dir.path().join(format!("{chart}.json")).exists());
    }
}
