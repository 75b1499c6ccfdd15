use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sqz-verify"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sqz-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_passes_and_writes_report() {
    let path = tmp("small.json");
    let out = run(&["verify", "--pair", "4,2", "--pair", "9,3", "--report", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: sqz_verifier::report::Report =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report.instances.len(), 8);
    assert_eq!(report.summary.fail, 0);
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let a = tmp("a.json");
    let b = tmp("b.json");
    for p in [&a, &b] {
        let out = run(&["verify", "--pair", "8,4", "--seed", "7", "--report", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let load = |p: &PathBuf| -> sqz_verifier::report::Report {
        serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
    };
    assert_eq!(load(&a).deterministic_json(), load(&b).deterministic_json());
}

#[test]
fn injected_faults_exit_one() {
    let out = run(&["verify", "--pair", "9,3", "--fault", "cup-omega-sign"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta"));
    let out = run(&["verify", "--pair", "9,3", "--fault", "induced-projection-sign"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("butterfly"));
}

#[test]
fn usage_and_io_errors_exit_two() {
    assert_eq!(run(&["verify", "--pair", "8,2"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let out = run(&["verify", "--pair", "4,2", "--report", "/nonexistent/dir/r.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["cech", "--cover", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn illusie_examples() {
    let out = run(&["illusie", "--nprime", "4", "--n", "2", "--module", "Z/2", "--coeff", "Z/2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let orders: Vec<u64> = v["groups"].as_array().unwrap().iter().map(|g| g["order"].as_u64().unwrap()).collect();
    assert_eq!(orders, vec![1, 2, 2, 1]);
    let out = run(&["illusie", "--nprime", "8", "--n", "4", "--module", "2", "--coeff", r#"{"gens":1,"relations":[[2]]}"#]);
    let v = json(&out);
    let orders: Vec<u64> = v["groups"].as_array().unwrap().iter().map(|g| g["order"].as_u64().unwrap()).collect();
    assert_eq!(orders, vec![2, 2, 2, 2]);
    assert_eq!(v["maps"][1]["matrix"], serde_json::json!([[0]]));
}

#[test]
fn ext_theta_deform() {
    let v = json(&run(&["ext", "--p", "2", "--n", "4", "--module", "Z/2", "--coeff", "Z/2"]));
    assert_eq!(v["order"], 2);
    let v = json(&run(&["theta", "--nprime", "4", "--n", "2", "--module", "Z/2", "--coeff", "Z/2"]));
    assert_eq!(v["surjective"], true);
    let base = ["deform", "--nprime", "8", "--n", "4", "--module", "Z/2", "--coeff", "Z/2", "--u"];
    let v = json(&run(&[&base[..], &["[[1]]"]].concat()));
    assert_eq!(v["deforms"], false);
    let v = json(&run(&[&base[..], &["[[0]]"]].concat()));
    assert_eq!(v["deforms"], true);
    let v = json(&run(&["deform", "--nprime", "4", "--n", "2", "--module", "Z/2", "--coeff", "Z/2", "--u", "[[1]]"]));
    assert_eq!(v["middle"], serde_json::json!([4]));
    assert_eq!(v["beta"]["middle"], serde_json::json!([4]));
}

#[test]
fn cech_file() {
    let out = run(&["cech", "--cover", &data("covers.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let covers = v["covers"].as_array().unwrap();
    assert_eq!(covers.len(), 3);
    assert!(covers.iter().all(|c| c["cech"]["status"] == "PASS"));
    assert_eq!(covers[0]["shearing"]["status"], "PASS");
}

#[test]
fn butterfly_operations() {
    for op in ["validate", "invert", "compose"] {
        let out = run(&["butterfly", op, "--nprime", "8", "--n", "4", "--module", "Z/2", "--coeff", "Z/2+Z/2"]);
        assert_eq!(out.status.code(), Some(0), "{op}");
        let v = json(&out);
        assert!(v["results"].as_array().unwrap().iter().all(|r| r["status"] == "PASS"), "{op}");
    }
    let out = run(&["butterfly", "validate", "--file", &data("periodic.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(run(&["butterfly", "validate"]).status.code(), Some(2));
}
