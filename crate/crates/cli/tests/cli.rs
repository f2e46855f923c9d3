use std::process::{Command, Output};

const COMMANDS: [&str; 13] = [
    "exp",
    "log",
    "euler",
    "ratios",
    "saddle",
    "exponent-fit",
    "split",
    "cr-bound",
    "theorem-demo",
    "counterexample",
    "class",
    "oracle",
    "radius",
];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expsmooth"))
        .args(args)
        .env_remove("EXPSMOOTH_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn every_command_passes_its_selftest() {
    for cmd in COMMANDS {
        let out = run(&[cmd, "--selftest"]);
        let text = stdout(&out);
        assert!(out.status.success(), "{cmd}: {text}");
        assert!(
            text.lines().count() >= 1 && text.lines().all(|l| l.starts_with("PASS")),
            "{cmd}: {text}"
        );
    }
}

#[test]
fn json_report_echoes_config() {
    let out = run(&["exp", "--rule", "1/n!", "--order", "6"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["command"], "exp");
    assert_eq!(v["config"]["order"], 6);
    assert_eq!(v["config"]["backend"], "exact");
    assert!(v["result"].is_object());
}

#[test]
fn csv_output_has_config_line_and_header() {
    let out = run(&["oracle", "--class", "broom", "--n", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    assert_eq!(lines.next().unwrap(), "class,n,side,scope,count");
    assert_eq!(lines.last().unwrap(), "broom,4,labelled,total,25");
}

#[test]
fn bad_rule_is_a_usage_error() {
    let out = run(&["exp", "--rule", "not-a-rule"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_file_reports_location() {
    let dir = std::env::temp_dir().join(format!("expsmooth-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\"kind\":\n").unwrap();
    let out = run(&["exp", "--rule", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn failed_hypothesis_is_a_computation_error() {
    let out = run(&[
        "theorem-demo",
        "--rule",
        "n^n/n!",
        "--theta",
        "1/2",
        "--order",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("expsmooth-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.json");
    let out = run(&[
        "ratios",
        "--rule",
        "1/n!",
        "--order",
        "12",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["config"]["command"], "ratios");
}

#[test]
fn precision_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_expsmooth"))
        .args(["saddle", "--poly", "x", "--n", "10"])
        .env("EXPSMOOTH_PRECISION", "128")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["precision"], 128);
}

#[test]
fn job_count_does_not_change_results() {
    let args = ["oracle", "--class", "height1-forests", "--n", "6"];
    let one = run(&[&args[..], &["--jobs", "1"]].concat());
    let many = run(&[&args[..], &["--jobs", "4"]].concat());
    let strip = |o: &Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("config");
        v
    };
    assert_eq!(strip(&one), strip(&many));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["counterexample", "--t", "n^n/n!", "--stages", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
