use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn qillum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qillum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|f| if f.is_empty() { f64::NAN } else { f.parse().unwrap() })
                .collect()
        })
        .collect()
}

#[test]
fn point_golden_numbers() {
    let v = json(&qillum(&["point", "--preset", "figure1", "--m", "2000000"]));
    let b = &v["bounds"];
    let opa = b["opa"]["upper"].as_f64().unwrap();
    assert!(opa <= 7.15e-6 && opa > 7.1e-6, "{opa}");
    assert!((b["eve_opt"]["lower"].as_f64().unwrap() - 0.285).abs() < 0.001);
    assert!((b["eve_opt"]["upper"].as_f64().unwrap() - 0.451).abs() < 0.001);
    assert_eq!(v["asymptotic"]["valid"], Value::Bool(true));
}

#[test]
fn point_trivial_limits() {
    let v = json(&qillum(&["point", "--kappa", "1", "--ns", "0.01", "--nb", "5", "--m", "1000"]));
    assert_eq!(v["exponents"]["eve"].as_f64().unwrap(), 0.0);
    assert_eq!(v["bounds"]["eve_opt"]["upper"].as_f64().unwrap(), 0.5);
    assert_eq!(v["bounds"]["eve_opt"]["lower"].as_f64().unwrap(), 0.5);

    let v = json(&qillum(&["point", "--kappa", "0.3", "--ns", "0", "--nb", "5", "--m", "1000"]));
    for key in ["alice", "eve", "homodyne", "opa"] {
        assert_eq!(v["exponents"][key].as_f64().unwrap(), 0.0, "{key}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"kappa": 0.1, "ns": 0.004, "nb": 100, "m": 10}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&qillum(&["point", "--config", c]));
    assert_eq!(v["params"]["m"], 10);
    let v = json(&qillum(&["point", "--config", c, "--m", "20", "--nb", "50"]));
    assert_eq!(v["params"]["m"], 20);
    assert_eq!(v["params"]["nb"].as_f64().unwrap(), 50.0);
    assert_eq!(v["params"]["kappa"].as_f64().unwrap(), 0.1);

    // file values override the preset
    fs::write(&cfg, r#"{"preset": "figure1", "nb": 10}"#).unwrap();
    let v = json(&qillum(&["point", "--config", c]));
    assert_eq!(v["params"]["nb"].as_f64().unwrap(), 10.0);
    assert_eq!(v["params"]["ns"].as_f64().unwrap(), 0.004);

    fs::write(&cfg, r#"{"kappa": 0.1, "bogus": 1}"#).unwrap();
    assert_eq!(qillum(&["point", "--config", c]).status.code(), Some(1));
    assert_eq!(qillum(&["point", "--config", "/no/such/file.json"]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(qillum(&[]).status.code(), Some(1));
    assert_eq!(qillum(&["point", "--kappa", "abc"]).status.code(), Some(1));
    assert_eq!(qillum(&["--version"]).status.code(), Some(0));
    let bad = qillum(&["point", "--kappa", "0", "--ns", "0.1", "--nb", "1", "--m", "5"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("kappa"));
    assert_eq!(
        qillum(&["sweep", "--preset", "figure1", "--m-min", "100", "--m-max", "10"]).status.code(),
        Some(2)
    );
}

#[test]
fn sweep_figure1_schema_and_shape() {
    let out = qillum(&["sweep", "--preset", "figure1", "--m-min", "1000", "--m-max", "10000000", "--points", "29"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "M,alice_opt_upper,alice_opt_lower,eve_upper,eve_lower,homodyne_upper,opa_upper"
    );
    // scientific notation with 11 significant digits
    let first = text.lines().nth(1).unwrap();
    for field in first.split(',').skip(1) {
        let (mantissa, _) = field.split_once('e').expect("scientific notation");
        assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 11, "{field}");
    }
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 29);
    for pair in rows.windows(2) {
        assert!(pair[1][0] > pair[0][0]);
        for c in 1..7 {
            assert!(pair[1][c] <= pair[0][c], "column {c} not decreasing");
        }
    }
    for r in &rows {
        assert!(r[2] <= r[1] && r[4] <= r[3]);
        assert!(r[1..].iter().all(|&p| p <= 0.5));
    }
    // Alice's upper bound drops below Eve's lower bound and stays there
    let cross = rows.iter().position(|r| r[1] < r[4]).expect("crossover");
    assert!(rows[cross..].iter().all(|r| r[1] < r[4]));
    let last = rows.last().unwrap();
    assert!(last[1] < 1e-10 * last[4]);
}

#[test]
fn sweep_figure2_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig2.csv");
    let status = qillum(&["sweep", "--preset", "figure2", "--out", out.to_str().unwrap(), "--points", "9"]);
    assert!(status.status.success());
    let no_noise = fs::read_to_string(dir.path().join("fig2-no-noise.csv")).unwrap();
    let bright = fs::read_to_string(dir.path().join("fig2-high-brightness.csv")).unwrap();
    let rows = csv_rows(&no_noise);
    // no OPA receiver without added noise
    assert!(rows.iter().all(|r| r[6].is_nan()));
    // at large M both bounds underflow to 0
    let live: Vec<_> = rows.iter().filter(|r| r[3] > 0.0).collect();
    assert!(live.len() >= 3);
    assert!(live.iter().all(|r| r[1] > r[3]), "alice upper should exceed eve upper");
    let rows = csv_rows(&bright);
    assert!(rows.iter().all(|r| !r[6].is_nan()));
    assert!(rows[0][6] > 0.0);

    let out = qillum(&["sweep", "--preset", "figure2", "--points", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.matches("M,alice_opt_upper").count(), 2);
}

#[test]
fn sweep_linear_scale_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = qillum(&[
        "sweep", "--preset", "figure1", "--m-min", "100", "--m-max", "500", "--points", "5",
        "--scale", "linear", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let ms: Vec<f64> = csv_rows(&fs::read_to_string(out).unwrap()).iter().map(|r| r[0]).collect();
    assert_eq!(ms, vec![100.0, 200.0, 300.0, 400.0, 500.0]);
}

#[test]
fn mc_reports_dominance() {
    let v = json(&qillum(&[
        "mc", "--preset", "figure1", "--m", "500000", "--trials", "2000", "--seed", "3",
    ]));
    assert_eq!(v["bound_dominates"], Value::Bool(true));
    let p = v["result"]["p_hat"].as_f64().unwrap();
    assert!(p <= (-2.0f64).exp() / 2.0 + 3.0 * v["sigma"].as_f64().unwrap());
    let again = json(&qillum(&[
        "mc", "--preset", "figure1", "--m", "500000", "--trials", "2000", "--seed", "3", "--sequential",
    ]));
    assert_eq!(v["result"], again["result"]);

    let v = json(&qillum(&[
        "mc", "--receiver", "homodyne", "--kappa", "0.1", "--ns", "0", "--nb", "100", "--m", "1000",
        "--trials", "2000",
    ]));
    let ci = v["result"]["ci95"].as_array().unwrap();
    assert!(ci[0].as_f64().unwrap() <= 0.5 && 0.5 <= ci[1].as_f64().unwrap());

    let opa = json(&qillum(&["mc", "--preset", "figure1", "--receiver", "opa", "--m", "400000", "--trials", "2000"]));
    assert_eq!(opa["bound_dominates"], Value::Bool(true));
    assert_eq!(
        qillum(&["mc", "--preset", "figure1", "--trials", "10"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qillum(&["mc", "--preset", "figure2-no-noise", "--receiver", "opa", "--trials", "100"]).status.code(),
        Some(2)
    );
}

#[test]
fn link_budget_examples() {
    let base = ["link-budget", "--bandwidth", "1e12", "--fiber-km", "50", "--loss-db-per-km", "0.2", "--ns", "0.004", "--nb", "100"];
    let mut args = base.to_vec();
    args.extend(["--bit-duration", "2e-6"]);
    let v = json(&qillum(&args));
    assert!((v["derived"]["kappa"].as_f64().unwrap() - 0.1).abs() < 1e-12);
    assert_eq!(v["derived"]["m"], 2_000_000);
    assert_eq!(v["derived"]["rate_bps"].as_f64().unwrap(), 5e5);
    assert!(v["report"]["bounds"]["opa"]["upper"].as_f64().unwrap() <= 7.15e-6);

    let mut args = base.to_vec();
    args.extend(["--bit-duration", "4e-6"]);
    let doubled = json(&qillum(&args));
    assert_eq!(doubled["derived"]["m"], 4_000_000);
    assert_eq!(doubled["derived"]["rate_bps"].as_f64().unwrap(), 2.5e5);

    let v = json(&qillum(&[
        "link-budget", "--bandwidth", "1e12", "--bit-duration", "2e-6", "--fiber-km", "0",
        "--preset", "figure1",
    ]));
    assert_eq!(v["derived"]["kappa"].as_f64().unwrap(), 1.0);

    assert_eq!(qillum(&["link-budget", "--ns", "0.1", "--nb", "1"]).status.code(), Some(1));
    let neg = qillum(&["link-budget", "--bandwidth=-1", "--bit-duration", "1", "--fiber-km", "1", "--ns", "0.1", "--nb", "1"]);
    assert_eq!(neg.status.code(), Some(2));
}

#[test]
fn oracle_check_paths() {
    let ok = qillum(&["oracle-check", "--ns", "0.1", "--kappa", "0.6", "--nb", "0.2"]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert_eq!(text.matches("PASS").count(), 2);

    // identical hypotheses
    let same = qillum(&["oracle-check", "--ns", "0", "--kappa", "0.5", "--nb", "0.3"]);
    assert_eq!(same.status.code(), Some(0));
    for line in String::from_utf8(same.stdout).unwrap().lines().filter(|l| l.contains("PASS")) {
        let dev: f64 = line.split_whitespace().nth(6).unwrap().parse().unwrap();
        assert!(dev < 1e-10, "{line}");
    }

    let small = qillum(&["oracle-check", "--ns", "0.3", "--kappa", "0.6", "--nb", "0.5", "--cutoff", "4"]);
    assert_eq!(small.status.code(), Some(2));
    let text = String::from_utf8(small.stdout).unwrap();
    assert!(text.contains("ERROR") && text.contains("too small"), "{text}");
    assert!(!text.contains("PASS"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.json");
    fs::write(&cfg, r#"{"grid": {"ns": [0.05], "kappa": [0.3, 0.9], "nb": [0.0], "s": [0.5]}}"#).unwrap();
    let g = qillum(&["oracle-check", "--config", cfg.to_str().unwrap(), "--party", "eve"]);
    assert_eq!(g.status.code(), Some(0));
    assert!(String::from_utf8(g.stdout).unwrap().contains("2 points, 0 failed"));
}
