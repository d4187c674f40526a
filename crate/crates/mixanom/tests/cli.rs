//! End-to-end checks of the command-line driver.

use std::process::Command;

fn mixanom(args: &[&str]) -> (String, String, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_mixanom"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code(),
    )
}

#[test]
fn catalog_lists_six_models() {
    let (stdout, _, code) = mixanom(&["catalog"]);
    assert_eq!(code, Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc.as_array().unwrap().len(), 6);
    let (csv, _, code) = mixanom(&["catalog", "--format", "csv"]);
    assert_eq!(code, Some(0));
    assert_eq!(csv.trim_end().lines().count(), 7, "header + six rows:\n{csv}");
}

#[test]
fn anomaly_output_is_deterministic_and_nontrivial() {
    let args = ["anomaly", "--model", "example2", "-L", "12"];
    let (a, _, code) = mixanom(&args);
    assert_eq!(code, Some(0));
    let (b, _, _) = mixanom(&args);
    assert_eq!(a, b, "byte-identical output across runs");
    let doc: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(doc["indicator"], "-1");
    assert_eq!(doc["trivial_class"], false);
    assert_eq!(doc["table"]["entries"].as_array().unwrap().len(), 64);
}

#[test]
fn steady_solves_a_sector() {
    let (stdout, stderr, code) = mixanom(&[
        "steady", "--model", "example3", "-L", "6", "--bc", "obc", "--sector", "x=+1",
    ]);
    assert_eq!(code, Some(0), "{stderr}");
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["degeneracy"], 4);
    assert!(doc["states"].as_array().unwrap().len() >= 1);
}

#[test]
fn observe_reports_boundary_correlation() {
    let (stdout, stderr, code) = mixanom(&[
        "observe", "--model", "example1", "-L", "6", "--bc", "obc", "--sector", "q=1",
        "--obs", "Z0", "--obs", "Z5", "--format", "csv",
    ]);
    assert_eq!(code, Some(0), "{stderr}");
    let connected_row = stdout
        .lines()
        .find(|l| l.starts_with("\"connected("))
        .expect("connected row present");
    assert!(connected_row.ends_with(",1,1"), "{connected_row}");
}

#[test]
fn verify_accepts_steady_state_and_rejects_nonsteady() {
    let dir = std::env::temp_dir().join("mixanom-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    // maximally mixed state is steady for the dephasing-type model
    let good = dir.join("good.json");
    std::fs::write(
        &good,
        serde_json::json!({
            "n_sites": 6,
            "coefficients": "exact",
            "terms": [{"word": "I", "coeff": "1"}]
        })
        .to_string(),
    )
    .unwrap();
    let (stdout, _, code) =
        mixanom(&["verify", "--model", "example1", "-L", "6", "--state", good.to_str().unwrap()]);
    assert_eq!(code, Some(0), "{stdout}");
    assert!(stdout.contains("= 0 exactly"));
    let bad = dir.join("bad.json");
    std::fs::write(
        &bad,
        serde_json::json!({
            "n_sites": 6,
            "coefficients": "exact",
            "terms": [{"word": "X0", "coeff": "1/2"}, {"word": "I", "coeff": "1"}]
        })
        .to_string(),
    )
    .unwrap();
    let (stdout, _, code) =
        mixanom(&["verify", "--model", "example1", "-L", "6", "--state", bad.to_str().unwrap()]);
    assert_eq!(code, Some(1), "{stdout}");
    assert!(stdout.contains("!= 0"));
}

#[test]
fn reproduce_runs_a_claim_and_rejects_unknown_ids() {
    let (stdout, _, code) =
        mixanom(&["reproduce", "boundary-ssb-ex1", "-L", "6", "--q", "1"]);
    assert_eq!(code, Some(0), "{stdout}");
    assert!(stdout.contains("PASS"));
    assert!(stdout.contains("(-1)^(2q)"));
    let (_, stderr, code) = mixanom(&["reproduce", "no-such-claim"]);
    assert_eq!(code, Some(2));
    assert!(stderr.contains("unknown claim id"));
}
