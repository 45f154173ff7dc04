use std::process::{Command, Output};

fn nlbreak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlbreak")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn channel_file(name: &str) -> String {
    format!("{}/examples/channels/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn volume_with_nothing_accepted_reports_null_fractions() {
    let o = nlbreak(&["volume", "--samples", "1", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o).trim(),
        r#"{"mode":"full","seed":7,"samples_drawn":1,"cp_accepted":0,"eb_count":0,"nlb_mes_count":0,"snlb_count":0,"fractions":{"eb":null,"nlb_mes":null,"snlb":null}}"#
    );
}

#[test]
fn volume_golden_counts() {
    let o = nlbreak(&["volume", "--samples", "1e3", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cp_accepted"], 28);
    assert_eq!(v["eb_count"], 20);
    assert_eq!(v["nlb_mes_count"], 28);
    assert_eq!(v["snlb_count"], 28);
}

#[test]
fn volume_independent_of_workers() {
    let run = |w: &str| stdout(&nlbreak(&["volume", "--samples", "25000", "--unital", "--workers", w]));
    let one = run("1");
    assert_eq!(one, run("3"));
    let v: serde_json::Value = serde_json::from_str(&one).unwrap();
    assert_eq!(v["cp_accepted"], 8288);
    assert_eq!(v["eb_count"], 4099);
}

#[test]
fn volume_csv_and_table() {
    let csv = stdout(&nlbreak(&["--format", "csv", "volume", "--samples", "1", "--seed", "7"]));
    assert!(csv.lines().count() >= 2, "{csv}");
    let table = stdout(&nlbreak(&["--format", "table", "volume", "--samples", "1", "--seed", "7"]));
    assert!(table.contains("undefined"), "{table}");
}

#[test]
fn analyze_channel_file() {
    let o = nlbreak(&["analyze", "--channel", &channel_file("nonunital_strong_breaker.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["nlb_mes"], true);
    assert_eq!(v["snlb"], true);
    assert!((v["c_ratio"].as_f64().unwrap() - 0.887).abs() < 5e-4);
}

#[test]
fn analyze_family_and_inline_json() {
    let o = nlbreak(&["analyze", "--family", "ampdamp", "--p", "0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["choi_m"].as_f64().unwrap() - 1.4).abs() < 1e-12);

    let o = nlbreak(&["analyze", "--channel", r#"{"t":[0,0,0],"lambda":[1,1,1]}"#]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["nlb_mes"], false);
}

#[test]
fn non_cp_channel_is_a_compute_error() {
    let o = nlbreak(&["analyze", "--channel", r#"{"t":[0.5,0,0],"lambda":[1,1,1]}"#]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(nlbreak(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(nlbreak(&["volume", "--samples", "many"]).status.code(), Some(2));
    assert_eq!(nlbreak(&["analyze", "--family", "ampdamp", "--p", "1.5"]).status.code(), Some(2));
}

#[test]
fn sweep_emits_csv_rows() {
    let o = nlbreak(&[
        "--format",
        "csv",
        "sweep",
        "--family",
        "ampdamp",
        "--from",
        "0.6",
        "--to",
        "0.7",
        "--step",
        "0.1",
        "--angle-step",
        "0.5",
        "--lambda-step",
        "0.25",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("p,best_m,schmidt_lambda,alpha,beta,gamma"));
    let rows: Vec<_> = lines.filter(|l| l.starts_with("0.")).collect();
    assert_eq!(rows.len(), 2, "{out}");
}

#[test]
fn verify_paper_single_criterion() {
    let o = nlbreak(&["verify-paper", "--only", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("\"passed\":true"));
}
