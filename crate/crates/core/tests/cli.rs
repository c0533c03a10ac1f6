use std::process::{Command, Output};

use serde_json::Value;

const CUBIC: &str = "6*x1^3+36*x1^2*x2+66*x1*x2^2+36*x2^3+11*x1^2+42*x1*x2+36*x2^2+6*x1+11*x2+1";
const QUARTIC: &str = "24*x1^4+133.6609*x1^3*x2+50*x1^3+253.8824*x1^2*x2^2+196.9412*x1^2*x2+35*x1^2+190.4498*x1*x2^3+230.4498*x1*x2^2+87.6125*x1*x2+10*x1+48*x2^4+80*x2^3+48*x2^2+12*x2+1";
const NON_RZ: &str = "6*x1^3+37.97*x1^2*x2+71.94*x1*x2^2+36*x2^3+11*x1^2+42.99*x1*x2+36*x2^2+6*x1+11*x2+1";

fn detrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detrep")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn analyze_cubic_passes() {
    let out = detrep(&["analyze", "--input", CUBIC]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("all necessary conditions pass"));
}

#[test]
fn analyze_reports_majorization_failure() {
    let p = CUBIC.replace("66*x1*x2^2", "63.9*x1*x2^2");
    let out = detrep(&["analyze", "--json", "--input", &p]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["passed"], false);
    assert!(v["summary"].as_str().unwrap().starts_with("majorization fails"));
}

#[test]
fn garbage_is_an_input_error() {
    assert_eq!(detrep(&["analyze", "--input", "x1^^2+"]).status.code(), Some(2));
    assert_eq!(detrep(&["solve", "--input", "1+x1*y"]).status.code(), Some(2));
    assert_eq!(detrep(&["solve"]).status.code(), Some(2));
}

#[test]
fn max_degree_is_enforced() {
    assert_eq!(detrep(&["analyze", "--max-degree", "2", "--input", CUBIC]).status.code(), Some(2));
}

#[test]
fn reads_a_file() {
    let dir = std::env::temp_dir().join(format!("detrep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cubic.txt");
    std::fs::write(&path, format!("{CUBIC}\n")).unwrap();
    let out = detrep(&["solve", "--json", "--input", path.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["representations"].as_array().unwrap().len(), 2);
}

#[test]
fn solve_cubic_two_representations() {
    let out = detrep(&["solve", "--json", CUBIC]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "found");
    let reps = v["representations"].as_array().unwrap();
    assert_eq!(reps.len(), 2);
    for r in reps {
        assert!(r["residual"].as_f64().unwrap() <= 1e-5);
        assert_eq!(r["A2"].as_array().unwrap().len(), 3);
    }
}

#[test]
fn solve_quartic_finds_a_witness() {
    let out = detrep(&["solve", "--json", QUARTIC]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["route"], "relaxation");
    assert!(!v["representations"].as_array().unwrap().is_empty());
}

#[test]
fn non_rz_is_not_found_with_witness() {
    let out = detrep(&["solve", "--json", NON_RZ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "not_found");
    assert_eq!(v["proven_infeasible"], false);
    assert!(v["rz"]["witness"].is_array());
}

#[test]
fn hermitian_feasibility_is_attached() {
    let v = json(&detrep(&["solve", "--json", "--hermitian-feasibility", CUBIC]));
    assert_eq!(v["hermitian"]["feasible"], true);
}

#[test]
fn solve_output_is_deterministic() {
    for p in [CUBIC, QUARTIC, NON_RZ] {
        let a = detrep(&["solve", "--json", "--all", p]);
        let b = detrep(&["solve", "--json", "--all", p]);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn range_sweep_csv() {
    let out = detrep(&["range", "--sweep", "f12", "--csv", "--step", "0.5", CUBIC]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("f12,majorized,representations\n"));
    assert!(text.lines().count() > 5);
}

#[test]
fn range_two_by_two_orbit() {
    let v = json(&detrep(&["range", "--u1", "2,1", "--w1", "3,-1"]));
    assert_eq!(v["layout"].as_array().unwrap().len(), 1);
    let hull = v["hull"].as_array().unwrap();
    assert_eq!(hull.len(), 2);
    let mut vals: Vec<f64> = hull.iter().map(|h| h["values"][0].as_f64().unwrap()).collect();
    vals.sort_by(f64::total_cmp);
    // f11 = u^c . Q w over the two permutations
    assert_eq!(vals, vec![1.0 * 3.0 + 2.0 * -1.0, 2.0 * 3.0 + 1.0 * -1.0]);
}

#[test]
fn range_extremes() {
    let v = json(&detrep(&["range", "--extremes", CUBIC]));
    assert!(v["extremes"].is_object());
    assert!(v["membership"].is_object());
}
