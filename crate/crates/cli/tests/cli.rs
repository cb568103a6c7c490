use std::process::{Command, Output};

use serde_json::Value;

fn dcover(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dcover"))
        .args(args)
        .env_remove("DCOVER_WORKERS")
        .output()
        .expect("spawn dcover")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn classify_stable_cycle() {
    let out = dcover(&["classify", "C5", "1,4"]);
    assert_eq!(code(&out), 0);
    let rec = json(&out);
    assert_eq!(rec["stable"], true);
    assert_eq!(rec["in_s1"], true);
    assert_eq!(rec["in_s2"], true);
    assert_eq!(rec["b_order"], "10");
    assert_eq!(rec["schema_version"], 1);
}

#[test]
fn classify_four_cycle_is_trivially_unstable() {
    let out = dcover(&["classify", "C4", "1,3"]);
    assert_eq!(code(&out), 0);
    let rec = json(&out);
    assert_eq!(rec["stable"], false);
    let reasons: Vec<&str> = rec["trivial_instability_reasons"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(reasons.contains(&"bipartite-with-nontrivial-aut"));
    assert!(reasons.contains(&"twins"));
}

#[test]
fn classify_rejects_open_sets_unless_symmetrized() {
    let out = dcover(&["classify", "C5", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("inverse-closed"));
    let out = dcover(&["classify", "C5", "1", "--symmetrize"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["set"], serde_json::json!([1, 4]));
}

#[test]
fn classify_tuple_literals_and_csv() {
    let out = dcover(&["classify", "C2xC10", "(0,1),(0,9),(1,0)", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("group,set_hex"));
    assert!(lines.next().unwrap().starts_with("C2xC10,"));
    assert_eq!(code(&dcover(&["classify", "C2xC10", "(1,0"])), 2);
    assert_eq!(code(&dcover(&["classify", "D4", "1"])), 2);
}

#[test]
fn exhaustive_census_of_c7() {
    let out = dcover(&["census", "C7", "--exhaustive"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["census"]["counts"]["examined"], 16);
    assert_eq!(v["census"]["counts"]["nontrivially_unstable"], 0);
}

#[test]
fn exhaustive_census_of_c2xc10_is_worker_independent() {
    let run = |w: &str| {
        let out = dcover(&["census", "C2xC10", "--exhaustive", "--workers", w, "--format", "csv"]);
        assert_eq!(code(&out), 0);
        out.stdout
    };
    let one = run("1");
    let text = String::from_utf8(one.clone()).unwrap();
    assert!(text.lines().any(|l| l == "C2xC10,examined,4096,1.000000000,0.000000000"));
    assert_eq!(one, run("4"));
}

#[test]
fn sampled_census_of_c105() {
    let out = dcover(&["census", "C105", "--samples", "1000", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["census"]["counts"]["examined"], 1000);
    assert_eq!(v["census"]["mode"]["kind"], "monte-carlo");
    assert_eq!(v["census"]["mode"]["seed"], 7);
}

#[test]
fn worker_count_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_dcover"))
        .args(["census", "C6", "--samples", "300", "--seed", "3", "--format", "csv"])
        .env("DCOVER_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let base = dcover(&["census", "C6", "--samples", "300", "--seed", "3", "--format", "csv"]);
    assert_eq!(out.stdout, base.stdout);
    assert_eq!(code(&dcover(&["census", "C6", "--exhaustive", "--workers", "0"])), 2);
}

#[test]
fn census_jsonl_and_unlabeled() {
    let out = dcover(&["census", "C5", "--exhaustive", "--format", "jsonl"]);
    assert_eq!(code(&out), 0);
    let lines: Vec<Value> = String::from_utf8(out.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().all(|r| r["group"] == "C5" && r["schema_version"] == 1));
    let out = dcover(&["census", "C5", "--exhaustive", "--unlabeled"]);
    let v = json(&out);
    assert_eq!(v["unlabeled"]["hol_orbits"], 6);
    assert_eq!(code(&dcover(&["census", "C5", "--samples", "4", "--seed", "1", "--unlabeled"])), 2);
}

#[test]
fn strict_census_flags_indeterminate_results() {
    let out = dcover(&["census", "C10", "--exhaustive", "--strict", "--format", "csv"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("indeterminate"));
    assert_eq!(code(&dcover(&["census", "C5", "--exhaustive", "--strict"])), 0);
}

#[test]
fn census_writes_output_file() {
    let dir = std::env::temp_dir().join(format!("dcover-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("c3.json");
    let out = dcover(&["census", "C3", "--exhaustive", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["census"]["counts"]["examined"], 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bounds_row_at_fifty_thousand() {
    let out = dcover(&["bounds", "--r", "50000", "--delta", "0.001"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = text.lines();
    let header: Vec<&str> = rdr.next().unwrap().split(',').collect();
    let row: Vec<&str> = rdr.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "first_below_second").unwrap();
    assert_eq!(row[0], "50000");
    assert_eq!(row[col], "true");
    assert!(rdr.next().is_none());
}

#[test]
fn bounds_grid_and_json() {
    let out = dcover(&["bounds", "--grid"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1 + 21 * 4);
    let out = dcover(&["bounds", "--r", "2^200", "--delta", "1/10", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["profiles"][0]["r"], "2^200");
    assert!(v["profiles"][0]["k_log2"].is_number());
}

#[test]
fn bounds_reject_bad_input() {
    assert_eq!(code(&dcover(&["bounds", "--delta", "0.7"])), 2);
    assert_eq!(code(&dcover(&["bounds", "--r", "100"])), 2);
    assert_eq!(code(&dcover(&["bounds", "--r", "1.5", "--delta", "0.1"])), 2);
    assert_eq!(code(&dcover(&["bounds", "--r", "100", "--delta", "0.1", "--precision", "8"])), 2);
}

#[test]
fn check_lemmas_small_limit() {
    let out = dcover(&["check-lemmas", "--order-limit", "4", "--format", "json"]);
    let v = json(&out);
    let rows = v["checks"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["group"] == "C2xC2"));
    // the closed form overcounts stabilized sets for non-square involutions
    let failing: Vec<&Value> = rows.iter().filter(|r| r["failures"].as_u64().unwrap() > 0).collect();
    assert!(failing.iter().all(|r| r["check"] == "stabilized-count-equality"));
    assert_eq!(code(&out), if failing.is_empty() { 0 } else { 1 });
    let table = dcover(&["check-lemmas", "--order-limit", "3"]);
    assert!(String::from_utf8(table.stdout).unwrap().contains("checks,"));
}
