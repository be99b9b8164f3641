use std::process::Command;

const LINE: &str = r#"{
    "name": "line",
    "base_dim": 1,
    "rank": 1,
    "chart": { "half_widths": [1.0], "resolution": 64 },
    "metric": { "kind": "morphism", "g": [["x1^2"]] },
    "degrees": [1],
    "probe_points": [[[0, 0]]]
}"#;

const CHERNEX: &str = r#"{
    "name": "chernex",
    "base_dim": 2,
    "rank": 2,
    "chart": { "half_widths": [1.0], "resolution": 20 },
    "metric": { "kind": "morphism", "g": [["x1", "0"], ["0", "x2"]] },
    "eps_schedule": [1, 0.25],
    "degrees": [1, 2],
    "probe_points": [[[0, 0], [0, 0]]],
    "curves": [{ "components": ["t", "0"], "resolution": 64 }]
}"#;

fn lab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_segre-lab")).args(args).output().expect("binary runs")
}

fn scenario(dir: &tempfile::TempDir, text: &str) -> String {
    let path = dir.path().join("scenario.json");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn segre_writes_reports_and_converges() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(&dir, LINE);
    let out = dir.path().join("out");
    let o = lab(&["segre", "--scenario", &s, "--out", out.to_str().unwrap(), "--jobs", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("line_segre.json")).unwrap()).unwrap();
    let s1 = &report["segre"][0];
    assert_eq!(s1["degree"], 1);
    assert_eq!(s1["decomposition"]["fixed"][0]["mult"], 2);
    let nu = s1["lelong"][0]["value"].as_f64().unwrap();
    assert!((nu - 2.0).abs() < 0.1, "{nu}");
    let csv = std::fs::read_to_string(out.join("line_s1_convergence.csv")).unwrap();
    assert!(csv.starts_with("eps,resolved,mass_box0,probe_difference"));
    assert!(out.join("line_lelong.csv").exists());
}

#[test]
fn short_schedules_report_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(&dir, LINE);
    let out = dir.path().join("out");
    let o = lab(&["segre", "--scenario", &s, "--out", out.to_str().unwrap(), "--eps", "1,1/4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn chern_and_lelong_on_a_coarse_grid() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(&dir, CHERNEX);
    let out = dir.path().join("out");
    let o = lab(&["chern", "--scenario", &s, "--out", out.to_str().unwrap(), "--mode", "alternative_Z"]);
    assert!(matches!(o.status.code(), Some(0 | 2)), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("chernex_chern.json")).unwrap()).unwrap();
    assert_eq!(report["primary"]["mode"], "alternative_Z");
    assert_eq!(report["secondary"]["mode"], "series");
    assert!(out.join("chernex_chern_difference.csv").exists());

    let o = lab(&["lelong", "--scenario", &s, "--out", out.to_str().unwrap()]);
    assert!(matches!(o.status.code(), Some(0 | 2)));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("chernex_lelong.json")).unwrap()).unwrap();
    assert_eq!(report["curves"][0]["predicted"], 1);
}

#[test]
fn bad_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(&dir, &LINE.replace("\"degrees\": [1]", "\"degrees\": [2]"));
    assert_eq!(lab(&["segre", "--scenario", &s]).status.code(), Some(1));
    assert_eq!(lab(&["segre", "--scenario", "/nonexistent.json"]).status.code(), Some(1));
    let s = scenario(&dir, LINE);
    assert_eq!(lab(&["segre", "--scenario", &s, "--mode", "sideways"]).status.code(), Some(1));
    assert_eq!(lab(&["segre", "--scenario", &s, "--eps", "0.1,0.5"]).status.code(), Some(1));
}

#[test]
fn inversion_suite_reports_json() {
    let o = lab(&["verify", "--suite", "inversion"]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["criteria"][0]["id"], 1);
}
