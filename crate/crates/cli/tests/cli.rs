use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"))
        .display()
        .to_string()
}

fn gsp(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gsp")).args(args).output().unwrap();
    (
        out.status.success(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn analyze_generic_json() {
    let (ok, out, _) = gsp(&["analyze", &fixture("generic-6-6")]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["initial_monomials"], 24);
    assert_eq!(v["condition"]["group"], "a");
    assert!(v["condition"]["statement"].as_str().unwrap().contains("no special geometric condition"));
}

#[test]
fn analyze_is_deterministic() {
    let a = gsp(&["analyze", &fixture("octahedral-3-3"), "--auto-reduce"]).1;
    let b = gsp(&["analyze", &fixture("octahedral-3-3"), "--auto-reduce"]).1;
    assert_eq!(a, b);
}

#[test]
fn analyze_text_shows_stages() {
    let (ok, out, _) = gsp(&["analyze", &fixture("octahedral-3-3"), "--format", "text"]);
    assert!(ok);
    assert!(out.contains("polynomial:       2 monomials: [abce][abdf][cdef] - [abcf][acde][bdef]"));
    assert!(out.contains("group c"));
}

#[test]
fn manual_entities() {
    let path = std::env::temp_dir().join(format!("gsp-manual-{}.json", std::process::id()));
    std::fs::write(
        &path,
        r#"{"entities": [
            {"kind": "plane", "labels": ["a", "c", "e"]},
            {"kind": "plane", "labels": ["b", "c", "d"]},
            {"kind": "plane", "labels": ["d", "e", "f"]},
            {"kind": "plane", "labels": ["a", "b", "f"]}
        ]}"#,
    )
    .unwrap();
    let (ok, out, err) = gsp(&["condition", &fixture("octahedral-3-3"), "--manual", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert!(ok, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["group"], "c");
    assert_eq!(v["verified"], "verified");
}

#[test]
fn evaluate_thresholds() {
    let f = fixture("generic-6-6");
    let generic = gsp(&["evaluate", &f, "--pose", "0,0,0,1,0,0,0"]).1;
    let v: serde_json::Value = serde_json::from_str(&generic).unwrap();
    assert_eq!(v["near_singular"], false);
    let flat = gsp(&["evaluate", &f, "--pose", "0,0,-1.5,1,0,0,0"]).1;
    assert_eq!(serde_json::from_str::<serde_json::Value>(&flat).unwrap()["near_singular"], true);
    let loose = gsp(&["evaluate", &f, "--pose", "0,0,0,1,0,0,0", "--epsilon", "0.5"]).1;
    assert_eq!(serde_json::from_str::<serde_json::Value>(&loose).unwrap()["near_singular"], true);
}

#[test]
fn entities_command() {
    let (ok, out, _) = gsp(&["entities", &fixture("equivalent-screws"), "--pose", "0,0,-1,1,0,0,0"]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["anchors"]["S1"], serde_json::json!([0.0, 0.0, 0.0]));
    assert_eq!(v["legs"].as_array().unwrap().len(), 6);
}

#[test]
fn invalid_file_fails_with_violations() {
    let path = std::env::temp_dir().join(format!("gsp-bad-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"name":"x","kind":"gsp","anchors":[],"legs":[["a","b"]]}"#).unwrap();
    let (ok, _, err) = gsp(&["analyze", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert!(!ok);
    assert!(err.contains("expected 6 legs") && err.contains("unknown label a"));
    let (ok, _, err) = gsp(&["analyze", "/nonexistent/robot.json"]);
    assert!(!ok && err.contains("failed to read"));
}

#[test]
fn busy_port_is_a_startup_error() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = listener.local_addr().unwrap().port().to_string();
    let (ok, _, err) = gsp(&["serve", "--port", &port]);
    assert!(!ok);
    assert!(err.contains("cannot listen"), "{err}");
}
