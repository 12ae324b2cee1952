use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const ORIENTATION: &str =
    r#"{"assignment":{"1":[3,0],"2":[2,1],"3":[2,1],"4":[1,2],"5":[1,2],"6":[0,3]}}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmhodge"))
        .args(args)
        .env_remove("CMHODGE_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_stdout(out: &Output, path: &Path) {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    std::fs::write(path, &out.stdout).unwrap();
}

#[test]
fn nondegenerate_example() {
    let out = run(&["nondeg", "--conductor", "7", "--weight", "3", "--orientation", ORIENTATION]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["orbit_rank"], 3);
    assert_eq!(v["verdict"], "nondegenerate");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn enumerates_24_orientations() {
    let out = run(&["orient", "enumerate", "--conductor", "7", "--weight", "3", "--hodge", "1,2,2,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["orientations"].as_array().unwrap().len(), 24);
    assert_eq!(v["count"], 24);
}

#[test]
fn even_weight_is_a_domain_error() {
    let out = run(&["nondeg", "--conductor", "7", "--weight", "2", "--orientation", ORIENTATION]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["error"]["reason"], "odd weight required");
}

#[test]
fn usage_errors_exit_2() {
    let out = run(&["nondeg", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["reason"], "usage");
    let out = run(&["field"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["nondeg", "--conductor", "7", "--weight", "5", "--orientation", r#"{"weight":3,"assignment":{}}"#]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn field_errors_map_to_exit_codes() {
    let out = run(&["field", "--conductor", "6"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "field",
        "--field",
        r#"{"flavor":"abstract","labels":[1,2,3,4],"generators":[[1,2,3,4]],"conjugation":[2,1,4,3]}"#,
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["error"]["reason"], "not transitive");
}

#[test]
fn abstract_fields_are_described() {
    let out = run(&[
        "field",
        "--field",
        r#"{"flavor":"abstract","labels":[1,2,3,4],"generators":[[2,3,4,1]],"conjugation":[3,4,1,2]}"#,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["group_order"], 4);
    assert_eq!(v["conjugate_pairs"], serde_json::json!([[1, 3], [2, 4]]));
}

#[test]
fn element_files_round_trip_between_commands() {
    let dir = tempfile::tempdir().unwrap();
    let nil = dir.path().join("n.json");
    let root = dir.path().join("x.json");
    let avg = dir.path().join("a.json");
    let base = ["--conductor", "7", "--weight", "3", "--orientation", ORIENTATION];

    write_stdout(&run(&[&["element", "nilpotent"][..], &base].concat()), &nil);
    write_stdout(&run(&[&["element", "root"][..], &base, &["--i", "1", "--j", "-2"]].concat()), &root);
    let p = nil.to_str().unwrap();
    write_stdout(&run(&["element", "average", "--element", root.to_str().unwrap()]), &avg);

    let esc = json(&run(&["escape", "--element", p]));
    assert_eq!(esc["closure_dimension"], 21);
    assert_eq!(esc["status"], "applicable");

    let part = json(&run(&["partition", "--element", avg.to_str().unwrap()]));
    assert_eq!(part["block_verdict"]["is_block_system"], true);

    let x = json(&run(&["partition", "--element", root.to_str().unwrap()]));
    assert_eq!(x["nilpotent_check"]["nilpotency_degree"], 2);

    let cl = json(&run(&["closure", "--element", root.to_str().unwrap(), p]));
    assert_eq!(cl["full_dimension"], 21);

    // a non-rational element cannot enter the escape check
    let out = run(&["escape", "--element", root.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["reason"], "not rational");
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cmhodge"))
        .args(["grading", "--conductor", "7", "--weight", "3", "--orientation", ORIENTATION])
        .env("CMHODGE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let saved = std::fs::read(dir.path().join("grading.json")).unwrap();
    assert_eq!(saved, out.stdout);
    assert_eq!(json(&out)["pair_values"], serde_json::json!([3, 1, 1]));
}

#[test]
fn sweeps_do_not_depend_on_jobs() {
    let args = ["rigidity", "--conductor", "7", "--weight", "5", "--hodge", "1,1,1,1,1,1"];
    let one = run(&[&args[..], &["--jobs", "1"]].concat());
    let four = run(&[&args[..], &["--jobs", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(json(&one)["count"], 48);
}

#[test]
fn selftest_is_byte_identical() {
    let (a, b) = std::thread::scope(|s| {
        let a = s.spawn(|| run(&["selftest", "--jobs", "2"]));
        let b = s.spawn(|| run(&["selftest", "--jobs", "2"]));
        (a.join().unwrap(), b.join().unwrap())
    });
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 9);
}
