use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_intrinsic"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let mut all = vec!["generate"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.join(name);
    fs::write(&path, &out.stdout).unwrap();
    path
}

const TWO: &str = r#"{"vertices": ["a", "b"], "measure": [1, 1], "edges": [[0, 1, 1]]}"#;

#[test]
fn check_two_vertex_graph() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.json", TWO);
    let ok = write(dir.path(), "ok.csv", "a,b\n0,1\n1,0\n");
    let bad = write(dir.path(), "bad.csv", "a,b\n0,1.1\n1.1,0\n");

    let report = json(&run(&["--input", g.to_str().unwrap(), "check", "--metric", ok.to_str().unwrap()]));
    assert_eq!(report["verdict"], "intrinsic");
    assert_eq!(report["max_load"], 1.0);

    let report = json(&run(&["--input", g.to_str().unwrap(), "check", "--metric", bad.to_str().unwrap()]));
    assert_eq!(report["verdict"], "not intrinsic");
    assert_eq!(report["worst_vertex"], 0);
    assert!((report["max_load"].as_f64().unwrap() - 1.21).abs() < 1e-12);
    assert_eq!(report["tolerances"]["eps_feas"], 1e-9);
}

#[test]
fn check_rejects_triangle_violation_before_loads() {
    let dir = TempDir::new().unwrap();
    let g = write(
        dir.path(),
        "g.json",
        r#"{"vertices": ["a","b","c"], "measure": [1,1,1], "edges": [[0,1,1],[1,2,1]]}"#,
    );
    let m = write(dir.path(), "m.csv", "a,b,c\n0,0.1,5\n0.1,0,0.1\n5,0.1,0\n");
    let out = run(&["--input", g.to_str().unwrap(), "check", "--metric", m.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangle"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn parse_errors_name_their_position() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.json", "{\"vertices\": [\"a\", \"b\"],\n \"measure\": [1, 1],\n \"edges\": [[0, 1, 1,]]}");
    let out = run(&["--input", g.to_str().unwrap(), "star"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&out.stderr));

    let g = write(dir.path(), "ok.json", TWO);
    let m = write(dir.path(), "m.csv", "a,b\n0,1\n1,x\n");
    let out = run(&["--input", g.to_str().unwrap(), "check", "--metric", m.to_str().unwrap()]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(!out.status.success());
    assert!(err.contains("line 3, field 2"), "{err}");

    let dup = write(dir.path(), "dup.json", r#"{"vertices": ["a","b"], "measure": [1,1], "edges": [[0,1,1],[0,1,1]]}"#);
    let out = run(&["--input", dup.to_str().unwrap(), "star"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate"));
}

#[test]
fn kappa_on_compliant_star() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "star.json", &["star", "--leaves", "1,1", "--center", "2", "--weights", "1,1"]);
    let report = json(&run(&["--input", g.to_str().unwrap(), "kappa"]));
    assert_eq!(report["kappa_intrinsic"], true);
    assert_eq!(report["all_converged"], true);
    let m = &report["metric"];
    for (x, y, want) in [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 2.0)] {
        let got = m[x][y].as_f64().unwrap();
        assert!((got - want).abs() <= 1e-7, "κ({x},{y}) = {got}");
    }
    for pair in report["pairs"].as_array().unwrap() {
        assert!(pair["kappa"].as_f64().unwrap() <= pair["universal_bound"].as_f64().unwrap() + 1e-8);
        for key in ["value", "converged", "iterations", "max_violation", "stationarity"] {
            assert!(pair["report"].get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn kappa_on_unit_triangle_is_not_intrinsic() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "tri.json", &["complete", "--n", "3"]);
    let out = run(&["--input", g.to_str().unwrap(), "kappa", "--format", "csv"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("kappa intrinsic: no"), "{err}");
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((row[1] - 0.8944271909999159).abs() <= 1e-7, "{row:?}");
}

#[test]
fn kappa_metric_round_trips_through_check() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "p.json", &["path", "--measure", "1,2,0.5,3"]);
    let csv_path = dir.path().join("k.csv");
    let report = json(&run(&[
        "--input",
        g.to_str().unwrap(),
        "kappa",
        "--metric-out",
        csv_path.to_str().unwrap(),
    ]));
    let check = json(&run(&["--input", g.to_str().unwrap(), "check", "--metric", csv_path.to_str().unwrap()]));
    assert_eq!(check["max_load"], report["max_load"]);
    assert_eq!(check["worst_vertex"], report["worst_vertex"]);

    let stdout = run(&["--input", g.to_str().unwrap(), "kappa", "--format", "csv"]).stdout;
    assert_eq!(stdout, fs::read(&csv_path).unwrap());
}

#[test]
fn kappa_rejects_disconnected_graph() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.json", r#"{"vertices": ["a","b","c"], "measure": [1,1,1], "edges": [[0,1,1]]}"#);
    let out = run(&["--input", g.to_str().unwrap(), "kappa"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("disconnected"));
}

#[test]
fn non_convergence_exits_nonzero_with_partial_report() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "tri.json", &["complete", "--n", "3"]);
    let out = run(&["--input", g.to_str().unwrap(), "--max-iterations", "3", "kappa"]);
    assert_eq!(out.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["all_converged"], false);
    assert_eq!(report["tolerances"]["max_iterations"], 3);
}

#[test]
fn tolerances_must_be_positive() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.json", TWO);
    let out = run(&["--input", g.to_str().unwrap(), "--tol-solve", "0", "kappa"]);
    assert!(!out.status.success());
}

#[test]
fn maximal_runs_are_certified() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "p4.json", &["path", "--n", "4"]);
    let g = g.to_str().unwrap();
    let end = json(&run(&["--input", g, "maximal", "--objective", "pair:0,1"]));
    let middle = json(&run(&["--input", g, "maximal", "--objective", "pair:1,2"]));
    let all = json(&run(&["--input", g, "maximal"]));
    for report in [&end, &middle, &all] {
        assert_eq!(report["report"]["converged"], true);
        assert_eq!(report["intrinsic"], true);
        assert_eq!(report["certified"], true);
        assert_eq!(report["certificate"].as_array().unwrap().len(), 6);
    }
    let diff = (end["metric"][0][1].as_f64().unwrap() - middle["metric"][0][1].as_f64().unwrap()).abs()
        .max((end["metric"][1][2].as_f64().unwrap() - middle["metric"][1][2].as_f64().unwrap()).abs());
    assert!(diff > 1e-3);

    let weights = json(&run(&["--input", g, "maximal", "--objective", "weights:1,1,1,1,1,1"]));
    assert_eq!(weights["objective_value"], all["objective_value"]);
    let bad = run(&["--input", g, "maximal", "--objective", "weights:1,1"]);
    assert!(!bad.status.success());
}

#[test]
fn maximal_rejects_non_intrinsic_floor() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "g.json", TWO);
    let floor = write(dir.path(), "f.csv", "a,b\n0,2\n2,0\n");
    let out = run(&["--input", g.to_str().unwrap(), "maximal", "--floor", floor.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not intrinsic"));
}

#[test]
fn star_decision_json() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "s.json", &["star", "--leaves", "1,2", "--center", "2", "--weights", "1,1"]);
    let d = json(&run(&["--input", g.to_str().unwrap(), "star"]));
    assert_eq!(d["is_star"], true);
    assert_eq!(d["centers"], serde_json::json!([0]));
    assert_eq!(d["condition_per_center"], serde_json::json!([false]));
    assert_eq!(d["verdict"], false);
    let g = generate(dir.path(), "p.json", &["path", "--n", "4"]);
    let d = json(&run(&["--input", g.to_str().unwrap(), "star"]));
    assert_eq!(d["is_star"], false);
    assert_eq!(d["reason"], "not a star");
}

fn partial_sums(alpha: &str) -> (Vec<f64>, String) {
    let report = json(&run(&["radial", "series", "--antitree", "--alpha", alpha, "--radii", "1000"]));
    let sums = report["rows"].as_array().unwrap().iter().map(|r| r["partial_sum_iii"].as_f64().unwrap()).collect();
    (sums, report["verdict_iii"].as_str().unwrap().to_string())
}

#[test]
fn antitree_series_verdicts() {
    let (sums, verdict) = partial_sums("3");
    assert_eq!(verdict, "converges");
    let n = sums.len();
    assert!(sums[n - 1] - sums[n / 2] < 0.05 * sums[n - 1]);

    let (sums, verdict) = partial_sums("2");
    assert_eq!(verdict, "diverges");
    // log growth: doubling the radius adds about the same amount
    let at = |r: usize| sums[r - 1];
    let (a, b) = (at(250) - at(125), at(500) - at(250));
    assert!(a > 0.1 && (a - b).abs() < 0.05 * a, "{a} {b}");
}

#[test]
fn tree_cutoffs_have_bounded_gradient() {
    let out = run(&["radial", "cutoffs", "--tree", "--sizes", "1,2,4,8,16", "--n", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,chi,gradient_sq"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 5);
    assert_eq!((rows[0][1], rows[2][1], rows[4][1]), (1.0, 1.0, 0.0));
    assert!(rows.iter().all(|r| r[2] <= 2.0));
}

#[test]
fn profile_csv_from_input_graph() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "t.json", &["antitree", "--sizes", "1,2,3"]);
    let out = run(&["--input", g.to_str().unwrap(), "radial", "profile", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "r,sphere_mass,kappa_plus,kappa_minus,boundary,term_iii,term_v,partial_sum_iii,partial_sum_v"
    );
    assert_eq!(lines[1], "0,1,2,0,2,,,,");
    assert!(lines[2].starts_with("1,2,3,1,6,"));
    assert_eq!(lines[3], "2,3,,2,,,,,");

    let truncated = run(&["--input", g.to_str().unwrap(), "--horizon", "1", "radial", "profile", "--format", "csv"]);
    assert_eq!(String::from_utf8(truncated.stdout).unwrap().lines().count(), 3);
}

#[test]
fn radial_detection_failure_names_witnesses() {
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "p.json", &["path", "--measure", "1,1,2"]);
    let out = run(&["--input", g.to_str().unwrap(), "radial", "profile", "--root", "1"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("vertices 0 and 2"), "{err}");
}

#[test]
fn radial_metric_and_radialize() {
    let report = json(&run(&["radial", "metric", "--antitree", "--alpha", "1", "--radii", "3000", "--rho", "0.5"]));
    assert!(report["gradient_budget"].as_f64().unwrap() <= 1.0 + 1e-9);
    let sigma = report["sigma_from_root"].as_array().unwrap();
    assert_eq!(sigma[0], 0.0);
    assert!(report["ball"]["closes_at"].is_u64());

    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "f.json", "[1, 0.5, 0.25, 0.75, 0, 0.5, 0.1]");
    let r = json(&run(&["radial", "radialize", "--tree", "--sizes", "1,2,4", "--function", f.to_str().unwrap()]));
    assert_eq!(r["ray"], serde_json::json!([0, 1, 3]));
    assert_eq!(r["forward_bound_holds"], true);
    assert_eq!(r["weak_bound_holds"], true);
}

#[test]
fn generated_graphs_reload() {
    let dir = TempDir::new().unwrap();
    for (name, args) in [
        ("tree", vec!["tree", "--sizes", "1,3,6"]),
        ("cycle", vec!["cycle", "--n", "5"]),
        ("ni", vec!["no-intrinsic", "--n", "6"]),
    ] {
        let g = generate(dir.path(), name, &args);
        let d = json(&run(&["--input", g.to_str().unwrap(), "star"]));
        assert_eq!(d["is_star"], false, "{name}");
    }
}

#[test]
fn hidden_oracle_subcommand() {
    let help = run(&["--help"]);
    assert!(!String::from_utf8_lossy(&help.stdout).contains("oracle"));
    let dir = TempDir::new().unwrap();
    let g = generate(dir.path(), "tri.json", &["complete", "--n", "3"]);
    let r = json(&run(&["--input", g.to_str().unwrap(), "oracle", "kappa", "--x", "0", "--y", "1"]));
    assert!((r["lower_bound"].as_f64().unwrap() - 0.8944271909999159).abs() < 1e-6);
    let h = std::f64::consts::FRAC_1_SQRT_2.to_string();
    let values = format!("0,{h},0,{h},0");
    let r = json(&run(&["oracle", "z-segment", "--values", &values]));
    assert_eq!(r["holds"], true);
}
