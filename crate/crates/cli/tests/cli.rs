use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn cspiso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cspiso"))
        .args(args)
        .env_remove("CSPISO_TERM_CAP")
        .env_remove("CSPISO_CATALOG_CAP")
        .env_remove("CSPISO_SPAN_BOUND")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn zeval_counts_homomorphisms() {
    let o = cspiso(&["zeval", "--functions", &fixture("k2.json"), "--instance", &fixture("edge.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "2");
    let pinned = |pin: &str| {
        let o = cspiso(&["zeval", "--functions", &fixture("k2.json"), "--instance", &fixture("edge_labeled.json"), "--pin", pin]);
        stdout(&o).trim().to_string()
    };
    assert_eq!(pinned("1=1,2=2"), "1");
    assert_eq!(pinned("1=2,2=2"), "0");
}

#[test]
fn iso_exit_codes() {
    let o = cspiso(&["iso", "--f", &fixture("diag.json"), "--g", &fixture("diag_swapped.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[2, 1] (1 2)");
    let o = cspiso(&["iso", "--f", &fixture("diag.json"), "--g", &fixture("eq.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "none");
}

#[test]
fn distinguish_reports_witness_or_sigma() {
    let o = cspiso(&["--format", "json", "distinguish", "--f", &fixture("eq.json"), "--g", &fixture("diag.json")]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["outcome"], "witness");
    assert_ne!(v["z_f"], v["z_g"]);
    assert_eq!(v["simple"], true);
    let o = cspiso(&["distinguish", "--f", &fixture("diag.json"), "--g", &fixture("diag_swapped.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("isomorphic via σ=[2, 1]"));
    let o = cspiso(&[
        "distinguish",
        "--f",
        &fixture("diag.json"),
        "--g",
        &fixture("diag_swapped.json"),
        "--pin-f",
        "1=1",
        "--pin-g",
        "1=1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn twins_lists_classes() {
    let o = cspiso(&["--format", "json", "twins", "--f", &fixture("k2.json")]);
    assert_eq!(json(&o)["classes"], serde_json::json!([[1], [2]]));
}

#[test]
fn gadget_commands() {
    let o = cspiso(&["--format", "json", "sigmat", "--gadget", &fixture("three_blocks.json")]);
    let v = json(&o);
    assert_eq!((v["rows"].as_u64(), v["cols"].as_u64()), (Some(8), Some(4)));
    let o = cspiso(&["--format", "json", "decompose", "--gadget", &fixture("three_blocks.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["matches"], true);
    assert_eq!(v["stages"].as_array().map(Vec::len), Some(6));
    assert_eq!(v["stages"][0], "S_(1 2)");
}

#[test]
fn intertwiners_certify_small_span() {
    let o = cspiso(&["intertwiners", "--f", &fixture("k2.json"), "--k", "1", "--l", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("status: certified"));
}

#[test]
fn selftest_is_deterministic() {
    let a = cspiso(&["--format", "json", "--seed", "5", "selftest", "--cases", "3"]);
    let b = cspiso(&["--format", "json", "--seed", "5", "selftest", "--cases", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["passed"], true);
}

#[test]
fn input_errors_exit_two() {
    let o = cspiso(&["zeval", "--functions", &fixture("malformed.json"), "--instance", &fixture("edge.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    let o = cspiso(&["twins", "--f", &fixture("bad_weight.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("$.weights[1]"), "{}", stderr(&o));
    assert_eq!(cspiso(&[]).status.code(), Some(2));
    assert_eq!(cspiso(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn caps_exit_three() {
    let o = cspiso(&["--term-cap", "1", "zeval", "--functions", &fixture("k2.json"), "--instance", &fixture("edge.json")]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_cspiso"))
        .args(["zeval", "--functions", &fixture("k2.json"), "--instance", &fixture("edge.json")])
        .env("CSPISO_TERM_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}
