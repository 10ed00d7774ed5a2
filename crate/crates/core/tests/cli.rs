use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use setvalued_id::config::Config;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_setvalued-id"));
    cmd.env_remove("SETVALUED_ID_OUT");
    cmd
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("exp.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn crlb_prints_closed_form_trace() {
    let out = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run(bin()
        .args(["crlb", "--config"])
        .arg(config_path("crlb_orthonormal.toml"))
        .arg("--out")
        .arg(out.path()));
    assert_eq!(code, 0);
    assert!(stdout.contains("crlb trace = 78.5398"), "{stdout}");
    assert!(out.path().join("crlb.txt").exists());
}

#[test]
fn pecheck_reports_reference_certificate() {
    let out = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run(bin()
        .args(["pecheck", "--config"])
        .arg(config_path("pecheck_zero_dither.toml"))
        .arg("--out")
        .arg(out.path()));
    assert_eq!(code, 0);
    assert!(stdout.contains("delta = 1.000000000000, N = 3, M = 2.236067977500"), "{stdout}");
}

#[test]
fn emitted_config_round_trips() {
    for args in [vec!["mc", "--paper-v"], vec!["mc", "--paper-v", "--seed", "9", "--horizon", "777", "--jobs", "2"]] {
        let (code, text, _) = run(bin().args(&args).arg("--emit-config"));
        assert_eq!(code, 0);
        let parsed = Config::parse(&text).unwrap();
        assert_eq!(parsed.to_toml(), text);
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(dir.path(), &text);
        let (code, again, _) = run(bin().arg("mc").arg("--config").arg(&path).arg("--emit-config"));
        assert_eq!(code, 0);
        assert_eq!(again, text);
    }
    let (_, text, _) = run(bin().args(["mc", "--paper-v", "--seed", "9", "--emit-config"]));
    assert_eq!(Config::parse(&text).unwrap().seed, 9);
}

#[test]
fn outputs_are_byte_identical_across_invocations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.length = 3000\nmc.runs = 8\nmc.trace_runs = 2\nest.k0 = 20\n");
    let cases: [(&str, &[&str]); 5] = [
        ("simulate", &["trace.csv"]),
        ("identify", &["estimates.csv"]),
        ("spao", &["spao.csv"]),
        ("rates", &["rates.csv", "rates_summary.json"]),
        ("mc", &["ensemble.csv", "summary.txt", "trace_run0.csv", "trace_run1.csv", "rates.csv"]),
    ];
    for (command, files) in cases {
        let a = dir.path().join(format!("{command}_a"));
        let b = dir.path().join(format!("{command}_b"));
        for (out, jobs) in [(&a, "1"), (&b, "3")] {
            let (code, _, err) = run(bin().arg(command).arg("--config").arg(&cfg).args(["--jobs", jobs]).arg("--out").arg(out));
            assert_eq!(code, 0, "{command}: {err}");
        }
        for f in files {
            let x = std::fs::read(a.join(f)).unwrap();
            let y = std::fs::read(b.join(f)).unwrap();
            assert!(!x.is_empty());
            assert_eq!(x, y, "{command}/{f}");
        }
    }
}

#[test]
fn csv_headers_follow_documented_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.length = 500\nmc.runs = 4\n");
    for command in ["simulate", "identify", "spao", "mc"] {
        let (code, _, err) = run(bin().arg(command).arg("--config").arg(&cfg).arg("--out").arg(dir.path()));
        assert_eq!(code, 0, "{err}");
    }
    let header = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header("trace.csv"), "k,phi_1,phi_2,y,s");
    assert_eq!(header("estimates.csv"), "k,theta_hat_1,theta_hat_2,err_sq");
    assert_eq!(header("spao.csv"), "k,T_1,T_2,psi_1,psi_2,err_1,err_2");
    assert_eq!(header("ensemble.csv"), "k,mean_err_sq,k_mean_err_sq");
    assert_eq!(header("rates.csv"), "k,as_series,mean_k_err_sq");
    assert_eq!(header("trace_run0.csv"), "k,theta_hat_1,theta_hat_2,err_sq");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rates_summary.json")).unwrap()).unwrap();
    for key in ["eta", "f_lower", "ms_slope", "regime"] {
        assert!(summary.get(key).is_some(), "{key}");
    }
    // 17 significant digits reload exactly
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let y: f64 = trace.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(format!("{y:.16e}"), trace.lines().nth(1).unwrap().split(',').nth(3).unwrap());
}

#[test]
fn config_errors_exit_two_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (text, key) in [
        ("sim.lenght = 10\n", "sim.lenght"),
        ("est.beta = -1.0\n", "est.beta"),
        ("noise.family = \"cauchy\"\n", "noise.family"),
        ("input.kind = \"explicit\"\ninput.values = [1.0]\n", "input.values"),
    ] {
        let cfg = write_config(dir.path(), text);
        let (code, _, err) = run(bin().arg("simulate").arg("--config").arg(&cfg).arg("--out").arg(dir.path()));
        assert_eq!(code, 2, "{text}");
        assert!(err.contains(key), "{err}");
    }
    let (code, _, err) = run(bin().args(["simulate", "--config", "/nonexistent/exp.toml"]));
    assert_eq!(code, 2);
    assert!(err.contains("--config"));
    let (code, _, _) = run(bin().args(["simulate"]));
    assert_eq!(code, 2);
    let (code, _, _) = run(bin().args(["simulate", "--paper-v", "--runs", "0"]));
    assert_eq!(code, 2);
}

#[test]
fn numerical_faults_exit_three_and_name_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    // compact triangular noise on [-2, 2]: once M |theta_hat| pushes the
    // interval past the support, the density bound is zero and the
    // adaptive step size is undefined
    let table = dir.path().join("tri.csv");
    let rows: Vec<String> = (0..=8)
        .map(|i| {
            let x = -2.0 + 0.5 * i as f64;
            let f = if x <= 0.0 { (x + 2.0) * (x + 2.0) / 8.0 } else { 1.0 - (2.0 - x) * (2.0 - x) / 8.0 };
            format!("{x},{f}")
        })
        .collect();
    std::fs::write(&table, format!("x,F\n{}\n", rows.join("\n"))).unwrap();
    let text = format!(
        "noise.family = \"custom\"\nnoise.table_path = {:?}\nsystem.thresholds = [0.0]\nsystem.theta = [0.3, -0.2]\nest.policy = \"adaptive\"\nest.margin = 1.5\nsim.length = 2000\nmc.runs = 2\n",
        table.to_str().unwrap()
    );
    let cfg = write_config(dir.path(), &text);
    for command in ["identify", "mc"] {
        let (code, _, err) = run(bin().arg(command).arg("--config").arg(&cfg).arg("--out").arg(dir.path()));
        assert_eq!(code, 3, "{command}: {err}");
        assert!(err.contains("seed") && err.contains("density lower bound"), "{err}");
    }
}

#[test]
fn io_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let (code, _, _) = run(bin().args(["pecheck", "--paper-v", "--horizon", "100", "--out"]).arg(blocker.join("sub")));
    assert_eq!(code, 1);
}

#[test]
fn output_directory_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let from_config = dir.path().join("cfg");
    let from_env = dir.path().join("env");
    let from_flag = dir.path().join("flag");
    let text = format!("sim.length = 100\nout.dir = {:?}\n", from_config.to_str().unwrap());
    let cfg = write_config(dir.path(), &text);
    let go = |extra: &[&str], env: bool| {
        let mut cmd = bin();
        cmd.arg("pecheck").arg("--config").arg(&cfg).args(extra);
        if env {
            cmd.env("SETVALUED_ID_OUT", &from_env);
        }
        assert_eq!(run(&mut cmd).0, 0);
    };
    go(&[], false);
    assert!(from_config.join("pe.txt").exists());
    go(&[], true);
    assert!(from_env.join("pe.txt").exists());
    go(&["--out", from_flag.to_str().unwrap()], true);
    assert!(from_flag.join("pe.txt").exists());
}

#[test]
fn paper_preset_ensemble_has_two_hundred_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, err) = run(bin().args(["mc", "--paper-v", "--horizon", "2000", "--out"]).arg(dir.path()));
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("runs = 200"));
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("runs = 200"));
    assert!(summary.contains("regime"));
    assert!(summary.contains("crlb_k_trace"));
}
