use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hassett(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hassett"))
        .args(args)
        .env_remove("MODULI_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = hassett(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("structured output is JSON")
}

fn code(args: &[&str]) -> i32 {
    hassett(args).status.code().expect("exit code")
}

#[test]
fn chambers_examples() {
    let r = json(&["chambers", "5", "--by-type"]);
    assert_eq!(r["schema"], "hassett-report/1");
    assert_eq!(r["command"], "chambers");
    assert_eq!(r["results"]["total"], 76);
    let hist = &r["results"]["by_type"];
    for (t, k) in [("A", 1), ("B", 10), ("C", 30), ("D", 20), ("E", 10), ("F", 5)] {
        assert_eq!(hist[t], k, "type {t}");
    }
    assert_eq!(r["walls"]["subsets"].as_array().unwrap().len(), 10);
    assert_eq!(r["walls"]["subsets"][0], serde_json::json!([1, 2, 3]));

    let r = json(&["chambers", "4", "--count-only"]);
    assert_eq!(r["results"]["total"], 1);
    assert!(r["results"].get("chambers").is_none());

    let r = json(&["chambers", "5"]);
    let list = r["results"]["chambers"].as_array().unwrap();
    assert_eq!(list.len(), 76);
    assert_eq!(list[0]["signs"], "++++++++++");
    assert_eq!(list[0]["representative"][0], "1/2");
}

#[test]
fn classify_examples() {
    let r = json(&["classify", "1,1,1,1,1"]);
    assert_eq!(r["results"]["chamber"]["type"], "A");
    assert_eq!(r["results"]["surface"]["degree"], 5);

    let r = json(&["classify", "1,1,3/10,3/10,3/10"]);
    assert_eq!(r["results"]["chamber"]["type"], "B");
    assert_eq!(r["results"]["surface"]["degree"], 6);
    assert_eq!(r["results"]["surface"]["minus_one_count"], 6);

    let r = json(&["classify", "1,1,1/3,1/3,1/3"]);
    assert_eq!(r["results"]["status"], "on_wall");
    assert_eq!(r["results"]["walls"], serde_json::json!([[3, 4, 5]]));

    let out = hassett(&["classify", "1/2,1/2,1/3,1/3,1/3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sum > 2"));
    assert_eq!(code(&["classify", "1,1,x,1,1"]), 2);
}

#[test]
fn verify_suites_pass() {
    for suite in ["intersections", "eq1", "theorem", "table1", "section5"] {
        let r = json(&["verify", suite]);
        assert_eq!(r["passed"], true, "{suite}");
        assert_eq!(r["results"]["failed"], 0, "{suite}");
    }
    let r = json(&["verify", "theorem", "--beta", "3/4", "--alpha", "1"]);
    let check = &r["results"]["checks"][0];
    assert_eq!(check["detail"]["certified"], 76);
    assert_eq!(r["inputs"]["beta"], "3/4");

    let r = json(&["verify", "table1"]);
    let counts: Vec<i64> = r["results"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["detail"]["survivors"][0].as_i64().unwrap())
        .collect();
    assert_eq!(counts, vec![10, 6, 3, 1, 0, 0]);

    let r = json(&["verify", "intersections"]);
    let m = &r["results"]["checks"][0]["detail"]["matrix"];
    assert_eq!(m[9][9], "-1");
    assert_eq!(m[9][0], "1");
}

#[test]
fn verify_input_errors() {
    assert_eq!(code(&["verify", "nonsense"]), 2);
    assert_eq!(code(&["verify", "theorem", "--beta", "1/2"]), 2);
    assert_eq!(code(&["verify", "eq1", "--alpha", "1/0"]), 2);
    assert_eq!(code(&["verify", "section5", "--alpha", "5"]), 2);
    assert_eq!(code(&["verify", "section5", "--alpha", "9/20"]), 0);
}

#[test]
fn git_examples() {
    let r = json(&["git", "2/3,1/3,1/3,1/3,1/3", "--semistable"]);
    assert_eq!(r["results"]["semistable_pair_count"], 4);
    assert_eq!(r["results"]["semistable_pairs"][0]["t"], serde_json::json!([1, 2]));
    assert_eq!(r["results"]["typical"], false);

    let r = json(&["git", "1,1,1,1,1", "--match"]);
    assert_eq!(r["results"]["normalized"][0], "2/5");
    assert_eq!(r["results"]["chamber"]["type"], "A");

    let r = json(&["git", "1/2,1/2,1/2,1/4,1/4"]);
    assert_eq!(r["results"]["typical"], false);
    assert_eq!(code(&["git", "1/2,1/2,1/2,1/4,1/4", "--match"]), 2);
    assert_eq!(code(&["git", "1,0,1,1,1"]), 2);
}

#[test]
fn dag_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dag.dot");
    let r = json(&["dag", "--dot", path.to_str().unwrap()]);
    assert_eq!(r["results"]["vertices"], 76);
    assert_eq!(r["results"]["type_a_out_degree"], 10);
    assert_eq!(r["results"]["sink_types"], serde_json::json!({"E": 10, "F": 5}));
    let dot = fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph contraction {"));
    assert_eq!(dot.matches(" -> ").count() as u64, r["results"]["edges"].as_u64().unwrap());

    assert_eq!(code(&["dag", "--dot", "/nonexistent-dir/x.dot"]), 2);
    assert_eq!(code(&["dag", "6"]), 2);
}

fn chambers_with_cache(cache: &Path) -> Output {
    hassett(&["chambers", "5", "--cache", cache.to_str().unwrap()])
}

#[test]
fn cache_round_trip_and_staleness() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested").join("c5.json");
    let fresh = chambers_with_cache(&path);
    assert!(String::from_utf8_lossy(&fresh.stderr).contains("cache: wrote"));
    let cached = chambers_with_cache(&path);
    assert!(String::from_utf8_lossy(&cached.stderr).contains("cache: loaded"));
    assert_eq!(fresh.stdout, cached.stdout);

    fs::write(&path, "{\"schema\": \"something-else\"}").unwrap();
    let stale = chambers_with_cache(&path);
    assert!(String::from_utf8_lossy(&stale.stderr).contains("recomputing"));
    assert_eq!(stale.stdout, fresh.stdout);
    assert!(String::from_utf8_lossy(&chambers_with_cache(&path).stderr).contains("cache: loaded"));
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hassett"))
        .args(["chambers", "4", "--count-only"])
        .env("MODULI_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("chambers-n4.json").exists());
}

#[test]
fn rejects_bad_n_and_threads() {
    assert_eq!(code(&["chambers", "3"]), 2);
    assert_eq!(code(&["chambers", "8"]), 2);
    assert_eq!(code(&["chambers", "6", "--by-type"]), 2);
    assert_eq!(code(&["--threads", "0", "chambers", "4"]), 2);
}

#[test]
fn text_format() {
    let out = hassett(&["--format", "text", "git", "2/3,1/3,1/3,1/3,1/3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("git ok (hassett-report/1)\n"));
    assert!(text.contains("  semistable_pair_count: 4\n"));
    assert!(text.contains("  normalized: [2/3, 1/3, 1/3, 1/3, 1/3]\n"));
}
