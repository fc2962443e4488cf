//! The reduced suite on its own, so its wall time is not shared with other
//! tests.

use std::process::Command;
use std::time::Instant;

#[test]
fn quick_suite_passes_within_a_minute() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_wentzell"))
        .args(["verify", "--quick", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let stdout = String::from_utf8_lossy(&out.stdout);
    println!("{stdout}");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(secs < 60.0, "quick suite took {secs:.1} s");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["quick"], true);
    assert_eq!(report["all_passed"], true);
    assert_eq!(report["skipped"], serde_json::json!([9, 10]));
    assert_eq!(report["checks"].as_array().unwrap().len(), 11);
}
