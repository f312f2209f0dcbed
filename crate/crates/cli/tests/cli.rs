use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn so4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_so4"))
        .args(args)
        .env_remove("SO4_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Numbers agree to 1e-9 relative (1e-12 absolute near zero); everything
/// else, including key order, must match exactly.
fn same_number(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 + 1e-9 * a.abs().max(b.abs())
}

fn json_diff(path: &str, a: &Value, b: &Value, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            if !same_number(x.as_f64().unwrap(), y.as_f64().unwrap()) {
                out.push(format!("{path}: {x} vs {y}"));
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (p, q)) in x.iter().zip(y).enumerate() {
                json_diff(&format!("{path}[{i}]"), p, q, out);
            }
        }
        (Value::Object(x), Value::Object(y)) => {
            let kx: Vec<_> = x.keys().collect();
            let ky: Vec<_> = y.keys().collect();
            if kx != ky {
                out.push(format!("{path}: keys {kx:?} vs {ky:?}"));
                return;
            }
            for (k, v) in x {
                json_diff(&format!("{path}.{k}"), v, &y[k], out);
            }
        }
        _ if a == b => {}
        _ => out.push(format!("{path}: {a} vs {b}")),
    }
}

fn csv_diff(a: &str, b: &str) -> Vec<String> {
    let (la, lb): (Vec<_>, Vec<_>) = (a.lines().collect(), b.lines().collect());
    if la.len() != lb.len() {
        return vec![format!("{} vs {} lines", la.len(), lb.len())];
    }
    let mut out = Vec::new();
    if la.first() != lb.first() {
        out.push(format!("header {:?} vs {:?}", la.first(), lb.first()));
    }
    for (n, (x, y)) in la.iter().zip(&lb).enumerate().skip(1) {
        let (fx, fy): (Vec<_>, Vec<_>) = (x.split(',').collect(), y.split(',').collect());
        let ok = fx.len() == fy.len()
            && fx.iter().zip(&fy).all(|(p, q)| match (p.parse::<f64>(), q.parse::<f64>()) {
                (Ok(u), Ok(v)) => same_number(u, v),
                _ => p == q,
            });
        if !ok {
            out.push(format!("line {}: {x} vs {y}", n + 1));
        }
    }
    out
}

/// Compares against `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn check_golden(name: &str, args: &[&str]) {
    let out = so4(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let got = stdout(&out);
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let diffs = if name.ends_with(".json") {
        let mut d = Vec::new();
        json_diff("$", &serde_json::from_str(&got).unwrap(), &serde_json::from_str(&want).unwrap(), &mut d);
        d
    } else {
        csv_diff(&got, &want)
    };
    assert!(diffs.is_empty(), "{name} differs from golden:\n{}", diffs[..diffs.len().min(10)].join("\n"));
}

#[test]
fn golden_classify() {
    check_golden("classify_reference.json", &["classify", "--orbit", "5,3"]);
    check_golden("classify_reference.csv", &["classify", "--orbit", "5,3", "--format", "csv"]);
}

#[test]
fn golden_certify() {
    check_golden("certify_reference.json", &["certify", "--orbit", "5,3"]);
    check_golden("certify_r095.csv", &["certify", "--r", "0.95", "--format", "csv"]);
}

#[test]
fn golden_sweep() {
    check_golden("sweep_reference.csv", &["sweep", "--steps", "11"]);
}

#[test]
fn golden_simulate() {
    check_golden(
        "simulate_equilibrium.csv",
        &["simulate", "--orbit", "5,3", "--point", "M1(a,b)", "--step", "0.1", "--horizon", "1"],
    );
    check_golden(
        "simulate_random.json",
        &["simulate", "--state", "random", "--seed", "7", "--step", "0.01", "--horizon", "5", "--sample-every", "100", "--format", "json"],
    );
}

#[test]
fn golden_verify() {
    check_golden("verify_small.csv", &["verify", "--samples", "20", "--format", "csv"]);
}

fn classify_json(extra: &[&str]) -> Value {
    let mut args = vec!["classify"];
    args.extend_from_slice(extra);
    let out = so4(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

#[test]
fn classify_reference_orbit() {
    let doc = classify_json(&["--orbit", "5,3"]);
    let points = doc["equilibria"].as_array().unwrap();
    assert_eq!(points.len(), 12);
    for p in points {
        let label = p["label"].as_str().unwrap();
        let kind = p["eigenstructure"].as_str().unwrap();
        let want = match label {
            "M1(a,b)" | "M1(-a,-b)" => "CenterCenter",
            "M1(b,a)" | "M1(-b,-a)" => "SaddleSaddle",
            l if l.starts_with("M2") => "CenterSaddle",
            _ => "CenterCenter",
        };
        assert_eq!(kind, want, "{label}");
    }
    let r = doc["orbit"]["r"].as_f64().unwrap();
    assert!((r - 1.0 / 9.0).abs() < 1e-14 && r < doc["orbit"]["alpha1"].as_f64().unwrap());
}

#[test]
fn orbit_parameterizations_agree() {
    let by_orbit = classify_json(&["--orbit", "5,3"]);
    let by_ab = classify_json(&["--ab", "3,1"]);
    let by_r = classify_json(&["--r", "0.1111111111111111", "--c1", "5"]);
    for doc in [&by_ab, &by_r] {
        let mut d = Vec::new();
        json_diff("$", &by_orbit["equilibria"], &doc["equilibria"], &mut d);
        assert!(d.is_empty(), "{d:?}");
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| so4(args).status.code().unwrap();
    assert_eq!(code(&["classify", "--orbit", "5,5"]), 1, "degenerate orbit");
    assert_eq!(code(&["classify", "--orbit", "5,3", "--lam", "1,2,3,4"]), 1, "unordered spectrum");
    assert_eq!(code(&["classify"]), 1, "missing orbit");
    assert_eq!(code(&["classify", "--orbit", "5,3", "--ab", "3,1"]), 1, "two orbit sources");
    assert_eq!(code(&["frobnicate"]), 1, "unknown command");
    assert_eq!(code(&["sweep", "--steps", "0"]), 1, "empty grid");
    assert_eq!(code(&["sweep", "--r-max", "1"]), 1, "r outside [0, 1)");
    assert_eq!(code(&["simulate", "--state", "random", "--step", "0"]), 1, "step <= 0");
    assert_eq!(code(&["simulate", "--state", "100,50,-30,20,10,5", "--step", "5", "--horizon", "1000"]), 3, "blow-up");
    assert_eq!(code(&["verify", "--samples", "20", "--inject-fault", "3:1e-6"]), 2, "negative control");
    assert_eq!(code(&["verify", "--samples", "20"]), 0);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn injected_fault_fails_only_decomposition() {
    let out = so4(&["verify", "--samples", "20", "--inject-fault", "2:1e-6"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["passed"], Value::Bool(false));
    for s in doc["suites"].as_array().unwrap() {
        let failed = !s["failures"].as_array().unwrap().is_empty();
        assert_eq!(failed, s["name"] == "decomposition", "{}", s["name"]);
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# reference run\ncommand = classify\nlam = 6, 3, 2, 1\norbit = 5, 3\nformat = csv\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let out = so4(&["--config", cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("label,family,"));

    let out = so4(&["--config", cfg, "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["lam"], serde_json::json!([6.0, 3.0, 2.0, 1.0]));

    // The command on the command line wins over the file.
    let out = so4(&["certify", "--config", cfg]);
    assert!(stdout(&out).starts_with("label,family,verdict"));

    std::fs::write(dir.path().join("bad.cfg"), "lam = 4, 3, 2\n").unwrap();
    let out = so4(&["--config", dir.path().join("bad.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_so4"))
        .args(["classify", "--orbit", "5,3"])
        .env("SO4_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(dir.path().join("so4-classify.json")).unwrap();
    assert!(written.contains("\"command\": \"classify\""));

    let explicit = dir.path().join("nested/out.csv");
    let out = so4(&["sweep", "--steps", "3", "--output", explicit.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(explicit).unwrap().starts_with("r,kind,"));
}

#[test]
fn sweep_structure() {
    let out = so4(&["sweep", "--steps", "101", "--r-max", "0.99", "--format", "json"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let (a1, a2) = (doc["alpha1"].as_f64().unwrap(), doc["alpha2"].as_f64().unwrap());
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 103);
    let grid: Vec<&Value> = rows.iter().filter(|r| r["kind"] == "grid").collect();
    let at = |kind: &str| rows.iter().find(|r| r["kind"] == kind).unwrap();
    assert_eq!(at("alpha1")["region"], "AtAlpha1");
    assert_eq!(at("alpha2")["region"], "AtAlpha2");
    assert_eq!(at("alpha2")["certificate"], "Undecidable");

    let mut prev_re = f64::INFINITY;
    for w in grid.windows(2) {
        let (r0, r1) = (w[0]["r"].as_f64().unwrap(), w[1]["r"].as_f64().unwrap());
        // Eigenstructure changes only across a threshold.
        if w[0]["eigenstructure"] != w[1]["eigenstructure"] {
            assert!((r0 < a1 && a1 <= r1) || (r0 < a2 && a2 <= r1), "change between {r0} and {r1}");
        }
        if w[0]["verdict"] != w[1]["verdict"] {
            assert!(r0 < a2 && a2 <= r1, "verdict flips between {r0} and {r1}");
        }
        let re = w[0]["max_re_closed_form"].as_f64().unwrap();
        assert!(re <= prev_re + 1e-15, "max Re not monotone at r = {r0}");
        assert_eq!(re > 0.0, r0 < a2, "sign of max Re at r = {r0}");
        prev_re = re;
    }
    for row in &grid {
        let r = row["r"].as_f64().unwrap();
        let want = if r > a2 { "NonlinearlyStable" } else { "Unstable" };
        assert_eq!(row["certificate"], want, "r = {r}");
    }
}

#[test]
fn certify_with_probes_corroborates() {
    // r = 1/9 puts M1(b,a) below alpha1, r = 0.95 above alpha2.
    for orbit in [["--orbit", "5,3"], ["--r", "0.95"]] {
        let out = so4(&["certify", orbit[0], orbit[1], "--probe"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
        for c in doc["certificates"].as_array().unwrap() {
            let escapes = c["probe"]["escapes"].as_u64().unwrap();
            match c["verdict"].as_str().unwrap() {
                "NonlinearlyStable" => assert_eq!(escapes, 0, "{orbit:?} {}", c["equilibrium"]),
                _ => assert!(escapes > 0, "{orbit:?} {}", c["equilibrium"]),
            }
        }
    }
}

#[test]
fn explicit_p_must_be_feasible() {
    let out = so4(&["certify", "--r", "0.95", "--p", "-1.0", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let bif = doc["certificates"].as_array().unwrap().iter().find(|c| c["equilibrium"] == "M1(b,a)").unwrap();
    assert_eq!(bif["witness"]["p"].as_f64(), Some(-1.0));
    assert_eq!(so4(&["certify", "--r", "0.95", "--p", "5"]).status.code(), Some(1));
}
