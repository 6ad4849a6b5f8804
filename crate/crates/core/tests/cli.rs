use std::path::Path;
use std::process::{Command, Output};

fn c13(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_c13")).args(args).output().expect("run c13")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn sweep_into(dir: &Path, h: &str) -> String {
    let out = dir.join(format!("h{h}.jsonl"));
    let o = c13(&["sweep", "--max-height", h, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out.to_str().unwrap().to_string()
}

#[test]
fn curve_report_for_reference_parameter() {
    let o = c13(&["curve", "--t", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("K = Q(√17)"));
    assert!(s.contains("j = -60698457/40960"));
    assert_eq!(s.lines().last(), Some("c_E = 169, v13(c_E) = 2"));
}

#[test]
fn negative_fraction_parameter() {
    let o = c13(&["curve", "--t", "-1/2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("v13(c_E) = 4\n"));
}

#[test]
fn degenerate_parameter_exits_zero() {
    for t in ["0", "1"] {
        let o = c13(&["curve", "--t", t]);
        assert_eq!(o.status.code(), Some(0));
        let s = stdout(&o);
        assert!(s.contains("degenerate"), "{s}");
        assert!(!s.contains("c_E ="));
    }
}

#[test]
fn curve_json_is_one_record() {
    let o = c13(&["curve", "--t", "1/2", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["c_E"], "169");
    assert_eq!(v["d"], 17);
    assert_eq!(v["schema_version"], 1);
    assert!(v["timing"].is_null());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(c13(&[]).status.code(), Some(2));
    assert_eq!(c13(&["curve", "--t", "abc"]).status.code(), Some(2));
    assert_eq!(c13(&["sweep", "--max-height", "1", "--out", "/dev/null"]).status.code(), Some(2));
    assert_eq!(c13(&["verify-parity", "--in", "/nonexistent/x.jsonl"]).status.code(), Some(2));
    assert_eq!(c13(&["search-v13-4"]).status.code(), Some(2));
}

#[test]
fn verification_commands_on_fresh_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let f = sweep_into(dir.path(), "5");
    let o = c13(&["verify-parity", "--in", &f]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
    let o = c13(&["unique-v13-2", "--in", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("v13 = 2 at t in {-1, 1/2, 2}"));
}

#[test]
fn corrupted_record_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let f = sweep_into(dir.path(), "2");
    let text = std::fs::read_to_string(&f).unwrap();
    let bad = text.replacen("\"v13\":2", "\"v13\":3", 1);
    assert_ne!(bad, text);
    std::fs::write(&f, bad).unwrap();
    let o = c13(&["verify-parity", "--in", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("v13 = 3"));
    assert_eq!(c13(&["unique-v13-2", "--in", &f]).status.code(), Some(1));
}

#[test]
fn factor_budget_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_c13"))
        .args(["curve", "--t", "2"])
        .env("C13_FACTOR_BUDGET", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_c13"))
        .args(["curve", "--t", "2"])
        .env("C13_FACTOR_BUDGET", "50000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn search_reports_each_candidate() {
    let o = c13(&["search-v13-4", "--fermat", "1", "--special189", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let recs: Vec<serde_json::Value> =
        stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 12);
    let t3 = recs.iter().find(|r| r["t"] == "3").unwrap();
    assert_eq!(t3["v13"], 4);
    assert_eq!(t3["status"], "ok");
}

#[test]
fn selftest_passes() {
    let o = c13(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
