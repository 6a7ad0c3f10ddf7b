use std::process::{Command, Output};

use serde_json::Value;

fn dpgs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpgs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

/// `key = value` lines of a human summary.
fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .to_string()
}

fn sweep_rows(out: &Output) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect()
}

/// Coarse RK4 shooting on the canonical problem, bisecting on the first of
/// `u = 0` or `u' = 0`.
fn rk4_ground_state(n: f64) -> f64 {
    let f = |u: f64| -3.0 / 16.0 * u + u * u - u * u * u;
    let over = |alpha: f64| {
        let h = 2e-3;
        let rhs = |r: f64, u: f64, v: f64| (v, -(n - 1.0) / r * v - f(u));
        let (mut r, mut u, mut v) = (h, alpha - f(alpha) * h * h / (2.0 * n), -f(alpha) * h / n);
        loop {
            let (a1, b1) = rhs(r, u, v);
            let (a2, b2) = rhs(r + h / 2.0, u + h / 2.0 * a1, v + h / 2.0 * b1);
            let (a3, b3) = rhs(r + h / 2.0, u + h / 2.0 * a2, v + h / 2.0 * b2);
            let (a4, b4) = rhs(r + h, u + h * a3, v + h * b3);
            u += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            v += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
            r += h;
            if u <= 0.0 {
                return true;
            }
            if v >= 0.0 {
                return false;
            }
        }
    };
    let (mut lo, mut hi) = (0.41, 0.7499);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if over(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn critical_points_canonical_json() {
    let out = dpgs(&["--n", "3", "--p", "2", "--q", "3", "--omega", "0.1875", "critical-points", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let cp = &doc["critical_points"];
    assert!((cp["B"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((cp["C"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert_eq!(doc["method"], "closed_form");
    assert!((doc["omega_pq"].as_f64().unwrap() - 2.0 / 9.0).abs() < 1e-15);
    assert!(doc["omega_sigma_tau"].as_f64().unwrap() > doc["omega_pq"].as_f64().unwrap());
}

#[test]
fn critical_points_human_summary() {
    let out = dpgs(&["critical-points"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(field(&text, "B"), "0.500000");
    assert_eq!(field(&text, "C"), "1.50000");
    assert!(text.contains("method: closed-form"));

    let root = dpgs(&["--q", "3.2", "critical-points"]);
    assert!(stdout(&root).contains("method: root-finding"));

    // tau < 0 at n = 5, q = 3: no second Sigma zero.
    let n5 = stdout(&dpgs(&["--n", "5", "critical-points"]));
    assert_eq!(field(&n5, "C"), "infinite");
    assert_eq!(field(&n5, "omega_sigma_tau"), "infinite");
}

#[test]
fn critical_points_without_ground_state_exits_2() {
    let out = dpgs(&["--n", "3", "--p", "2", "--q", "3", "--omega", "0.23", "critical-points"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("existence threshold"));
}

#[test]
fn two_dimensional_b_matches_beta_to_display_precision() {
    let text = stdout(&dpgs(&["--n", "2", "--p", "2", "--q", "3", "--omega", "0.1875", "critical-points"]));
    assert_eq!(field(&text, "B"), field(&text, "beta"));
    let csv = dpgs(&["--n", "2", "critical-points", "--format", "csv"]);
    let rows = sweep_rows(&csv);
    let (beta, big_b): (f64, f64) = (rows[0][7].parse().unwrap(), rows[0][9].parse().unwrap());
    assert!((beta - big_b).abs() <= 1e-15);
}

#[test]
fn shoot_three_dimensional_alpha_between_b_and_c() {
    let text = stdout(&dpgs(&["--n", "3", "--p", "2", "--q", "3", "--omega", "0.1875", "shoot"]));
    let alpha: f64 = field(&text, "alpha").parse().unwrap();
    assert!(alpha > 0.5 && alpha < 0.75);
    let oracle = rk4_ground_state(3.0);
    assert!((alpha - oracle).abs() < 1e-5, "alpha {alpha} vs RK4 {oracle}");
    for name in ["B_gt_beta", "beta_lt_alpha", "alpha_lt_c", "B_lt_alpha"] {
        assert!(text.lines().any(|l| l.starts_with("ok") && l.contains(name)), "{name}\n{text}");
    }
}

#[test]
fn shoot_one_dimensional_alpha_is_beta() {
    let out = dpgs(&["--n", "1", "--p", "2", "--q", "3", "--omega", "0.1875", "shoot", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let alpha = doc["alpha"].as_f64().unwrap();
    let beta = 2.0 * (1.0 / 3.0 - (1.0f64 / 9.0 - 3.0 / 32.0).sqrt());
    assert!((alpha - beta).abs() < 1e-6, "alpha {alpha}");
    assert_eq!(doc["overall"], true);
}

#[test]
fn shoot_writes_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = dpgs(&["--n", "3", "shoot", "--trajectory", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&path).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["r", "u", "du", "P", "Sigma_u"]);
    let r: Vec<f64> = reader
        .records()
        .map(|rec| rec.unwrap()[0].parse().unwrap())
        .collect();
    assert!(r.len() > 100);
    assert!(r.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn shoot_solver_failure_exits_3() {
    // With r_max = 2 no shot reaches u = 0, so the endpoints never bracket.
    assert_eq!(dpgs(&["--r-max", "2", "shoot"]).status.code(), Some(3));
}

#[test]
fn verify_canonical_report() {
    let out = dpgs(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["overall"], true);
    let checks = doc["checks"].as_array().unwrap();
    let residual = checks.iter().find(|c| c["name"] == "pohozaev_residual").unwrap();
    assert!(residual["lhs"].as_f64().unwrap() <= 1e-4);
    assert!(residual["margin"].as_f64().unwrap() >= 0.0);
    for key in ["n", "p", "q", "omega"] {
        assert!(doc["params"][key].is_number());
    }
    for key in ["b", "c", "beta", "theta", "B", "C"] {
        assert!(doc["critical_points"][key].is_number());
    }
    assert_eq!(doc["controls"]["rtol"], 1e-10);
}

#[test]
fn verify_two_dimensional_equality() {
    let doc = json(&dpgs(&["--n", "2", "verify"]));
    let check = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "B_equals_beta")
        .unwrap()
        .clone();
    assert_eq!(check["passed"], true);
}

#[test]
fn verify_folds_existence_failure_into_report() {
    let out = dpgs(&["--omega", "0.23", "verify"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["overall"], false);
    assert_eq!(doc["checks"][0]["name"], "existence");
}

#[test]
fn verify_rejects_q_below_p() {
    assert_eq!(dpgs(&["--q", "1.5", "--p", "2", "verify"]).status.code(), Some(64));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(dpgs(&["--bogus", "verify"]).status.code(), Some(64));
    assert_eq!(dpgs(&[]).status.code(), Some(64));
    assert_eq!(dpgs(&["--n", "0", "shoot"]).status.code(), Some(64));
    assert_eq!(dpgs(&["--format", "xml", "verify"]).status.code(), Some(64));
    assert_eq!(dpgs(&["sweep"]).status.code(), Some(64));
    assert_eq!(dpgs(&["--sweep", "omega:0.1:0.2:1", "sweep"]).status.code(), Some(64));
    let help = dpgs(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("critical-points"));
}

#[test]
fn omega_sweep_rows_keep_alpha_above_b() {
    let out = dpgs(&["--n", "3", "--p", "2", "--q", "3", "--sweep", "omega:0.01:0.22:20", "sweep"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = sweep_rows(&out);
    assert_eq!(rows.len(), 20);
    for row in &rows {
        assert_ne!(row[4], "skipped");
        assert!(row[11].parse::<f64>().unwrap() > 0.0, "{row:?}");
        assert_eq!(row[13], "true", "{row:?}");
    }
}

#[test]
fn dimension_sweep_shows_split() {
    let rows = sweep_rows(&dpgs(&["--sweep", "n:1:4:4", "sweep"]));
    let gap: Vec<f64> = rows
        .iter()
        .map(|r| r[8].parse::<f64>().unwrap() - r[6].parse::<f64>().unwrap())
        .collect();
    assert!(gap[0] < 0.0);
    assert!(gap[1].abs() <= 1e-10);
    assert!(gap[2] > 0.0 && gap[3] > 0.0);
}

#[test]
fn sweep_marks_points_without_ground_state() {
    let out = dpgs(&["--sweep", "omega:0.2:0.23:4", "sweep"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = sweep_rows(&out);
    let last = rows.last().unwrap();
    assert_eq!(last[3].parse::<f64>().unwrap(), 0.23);
    assert!(last[4..].iter().all(|x| x == "skipped"));
    assert!(rows[..3].iter().all(|r| r[13] == "true"));

    assert_eq!(dpgs(&["--sweep", "omega:0.23:0.3:3", "sweep"]).status.code(), Some(2));
}

#[test]
fn sweep_json_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let out = dpgs(&["--sweep", "q:2.5:3:2", "sweep", "--format", "json", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert_eq!(doc["sweep"]["var"], "q");
    assert!(doc["controls"]["alpha_tol"].is_number());
}

#[test]
fn sample_verify_is_seeded() {
    let a = dpgs(&["sample-verify", "--count", "3", "--seed", "11", "--format", "csv"]);
    let b = dpgs(&["sample-verify", "--count", "3", "--seed", "11", "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let rows = sweep_rows(&a);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[6] == "true"), "{rows:?}");
    let other = dpgs(&["sample-verify", "--count", "3", "--seed", "12", "--format", "csv"]);
    assert_ne!(a.stdout, other.stdout);
}
