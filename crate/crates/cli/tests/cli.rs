use std::process::{Command, Output};

use gwcycle::ClassVector;

fn gwcycle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwcycle"))
        .args(args)
        .env_remove("GWCYCLE_RAYS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim().to_string()
}

#[test]
fn fourpoint_conic_count() {
    let o = gwcycle(&["gw-fourpoint", "--space", "Q3", "--degree", "2", "--insertions", "L0,L0,L1,L1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1");
}

#[test]
fn class_json_round_trips() {
    let o = gwcycle(&[
        "class", "--space", "Q3", "--degree", "1", "--insertions", "H3,H1,H1,H1,H1", "--n", "5",
        "--format", "json",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let v = ClassVector::from_json(&text).unwrap();
    assert_eq!(v.to_json(), text);
    assert!(text.contains(r#""coeffs":["#));
}

#[test]
fn csv_and_threads() {
    let o = gwcycle(&[
        "pushforward", "--space", "P3", "--degree", "2", "--insertions", "H1,H1,H1,H1,H3,H3,H3",
        "--format", "csv", "--threads", "3",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("basis,coeff\nd13,1\n"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn quantum_product() {
    let o = gwcycle(&["qh-mult", "--space", "Q5", "H2", "H3"]);
    assert_eq!(stdout(&o), "H5 + 2*q*H0");
    let o = gwcycle(&["qh-mult", "--space", "Q3", "H3", "H3", "--format", "json"]);
    assert_eq!(stdout(&o), r#"{"product":"4*q^2*H0"}"#);
}

#[test]
fn fcurve_degree_and_npoint() {
    let o = gwcycle(&[
        "fcurve-deg", "--space", "Q3", "--degree", "2", "--insertions", "H1,H1,H1,H2,H2,H3",
        "--fcurve", "F{1,4,6|2|3|5}",
    ]);
    assert_eq!(stdout(&o), "8");
    let o = gwcycle(&["gw-npoint", "--space", "Q5", "--degree", "1", "--insertions", "H1,H5,H4"]);
    assert_eq!(stdout(&o), "4");
}

#[test]
fn nef_check_with_ray_file() {
    let dir = std::env::temp_dir().join(format!("gwcycle-rays-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rays.json");
    let table = gwcycle::RayTable::builtin().subset(&["R5'", "R16"]).unwrap();
    std::fs::write(&path, table.to_json()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gwcycle"))
        .args(["nef-check", "--vector", "1,1,2,1,1,2,2,1,2,1,1,1,3,0,1,1", "--format", "json"])
        .env("GWCYCLE_RAYS", &path)
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["f_nef"], true);
    assert_eq!(v["decomposition"]["R16"], "1");
    assert_eq!(v["contracted"].as_array().unwrap().len(), 12);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_codes() {
    assert_eq!(gwcycle(&["nonsense"]).status.code(), Some(2));
    let bad_class = gwcycle(&["gw-npoint", "--space", "Q3", "--degree", "1", "--insertions", "H1,Z4"]);
    assert_eq!(bad_class.status.code(), Some(2));
    let bad_space = gwcycle(&["gw-npoint", "--space", "X3", "--degree", "1", "--insertions", "H1"]);
    assert_eq!(bad_space.status.code(), Some(2));
    let wrong_codim = gwcycle(&["gw-fourpoint", "--space", "Q3", "--degree", "1", "--insertions", "H3,H3,H3,H3"]);
    assert_eq!(wrong_codim.status.code(), Some(1));
    let short = gwcycle(&["class", "--space", "Q3", "--degree", "1", "--insertions", "H1,H1"]);
    assert_eq!(short.status.code(), Some(1));
}

#[test]
fn verify_lists_every_criterion() {
    let o = gwcycle(&["verify", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let criteria = v["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 10);
    let all = criteria.iter().all(|c| c["passed"] == true);
    assert_eq!(v["passed"], all);
    assert_eq!(o.status.code(), Some(if all { 0 } else { 1 }));
}
