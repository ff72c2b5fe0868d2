use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::Duration;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_varmorrey"))
}

fn case(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("cases")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_case(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const CHI_P2: &str = r#"{
    "domain": { "shape": "interval", "bounds": [-1, 1], "resolution": 1000 },
    "theorem": "MainMorrey",
    "gamma": 0.5,
    "p": { "kind": "constant", "value": 2.0 },
    "lambda": { "kind": "constant", "value": 0.0 }
}"#;

#[test]
fn check_exit_codes() {
    let o = run(&["check", case("pinned.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("overall: admissible"));

    let o = run(&["check", case("a_greater_than_b.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let row = stdout(&o)
        .lines()
        .find(|l| l.starts_with("condA"))
        .unwrap()
        .to_string();
    assert!(row.contains("NO"), "{row}");
}

#[test]
fn check_reports_missing_key_and_bad_json() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(case("pinned.json")).unwrap();
    let missing = write_case(
        dir.path(),
        "missing.json",
        &text.replace("\"gamma\": 0.5,", ""),
    );
    let o = run(&["check", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("gamma"), "{}", stderr(&o));

    let broken = write_case(dir.path(), "broken.json", "{\n  \"domain\": [1, 2,\n");
    let o = run(&["check", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stderr(&o).contains("line") && stderr(&o).contains("column"),
        "{}",
        stderr(&o)
    );

    let unknown = write_case(
        dir.path(),
        "unknown.json",
        &text.replace("\"seed\"", "\"sead\""),
    );
    let o = run(&["check", unknown.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sead"));
}

#[test]
fn check_json_is_machine_readable() {
    let o = run(&[
        "check",
        "--json",
        case("a_greater_than_b.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["overall"], Value::Bool(false));
    let cond_a = v["conditions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "condA")
        .unwrap();
    assert_eq!(cond_a["satisfied"], Value::Bool(false));
}

#[test]
fn norm_command() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_case(dir.path(), "chi.json", CHI_P2);
    let o = run(&["norm", path.to_str().unwrap(), "--function", "one"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = stdout(&o).lines().next().unwrap().to_string();
    let value: f64 = first.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((value - 2f64.sqrt()).abs() < 1e-3, "{first}");

    let o = run(&["norm", "--json", path.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let leb = v["lebesgue"]["value"].as_f64().unwrap();
    let mor = v["morrey"]["value"].as_f64().unwrap();
    assert!((leb - mor).abs() <= 1e-6 * leb);

    let o = run(&[
        "norm",
        "--json",
        path.to_str().unwrap(),
        "--function",
        "zero",
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lebesgue"]["value"].as_f64(), Some(0.0));
    assert!(run(&["norm", path.to_str().unwrap(), "--function", "zero"])
        .stdout
        .starts_with(b"lebesgue  0.000000"));
}

#[test]
fn ratio_writes_report_only_when_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&[
        "ratio",
        case("pinned.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.exists());
    let sup: f64 = stdout(&o)
        .lines()
        .find(|l| l.starts_with("sup_ratio"))
        .and_then(|l| l.split_whitespace().nth(1))
        .unwrap()
        .parse()
        .unwrap();
    assert!(sup > 0.0);

    let bad = dir.path().join("bad.json");
    let o = run(&[
        "ratio",
        case("a_greater_than_b.json").to_str().unwrap(),
        "--out",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!bad.exists());

    let o = run(&[
        "ratio",
        case("a_greater_than_b.json").to_str().unwrap(),
        "--out",
        bad.to_str().unwrap(),
        "--allow-inadmissible",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let reports: Value = serde_json::from_slice(&std::fs::read(&bad).unwrap()).unwrap();
    assert_eq!(reports[0]["admissible"], Value::Bool(false));
    assert_eq!(reports[0]["evaluated"], Value::Bool(true));
    assert_eq!(reports[0]["members"].as_array().unwrap().len(), 4);
}

#[test]
fn sweep_lattice_gives_one_report_per_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = run(&[
        "sweep",
        case("weight_lattice.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("case-002 done"));
    let v: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    let a: Vec<f64> = reports
        .iter()
        .map(|r| r["case"]["a"].as_f64().unwrap())
        .collect();
    assert_eq!(a, vec![-0.2, -0.1, 0.0]);
}

#[test]
fn refine_prints_stability_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("refine.json");
    let o = run(&[
        "refine",
        "--json",
        case("pinned.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["refinement"].as_array().unwrap().len(), 3);
    assert!(v["stability"].as_f64().unwrap() < 0.02);

    let o = run(&[
        "refine",
        case("pinned.json").to_str().unwrap(),
        "--resolutions",
        "250",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn commands_leave_case_file_untouched() {
    let before = std::fs::read(case("pinned.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let path = case("pinned.json");
    let (p, o) = (path.to_str().unwrap(), out.to_str().unwrap());
    for args in [
        vec!["check", p],
        vec!["norm", p],
        vec!["ratio", p, "--out", o],
    ] {
        run(&args);
    }
    assert_eq!(std::fs::read(case("pinned.json")).unwrap(), before);
}

#[test]
fn interrupted_sweep_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("interrupted.csv");
    let mut child = bin()
        .args([
            "sweep",
            case("pinned_suite_2d.json").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    std::thread::sleep(Duration::from_millis(300));
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["check"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
