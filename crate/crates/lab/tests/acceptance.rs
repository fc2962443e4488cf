//! Acceptance criteria 1–13 at full size, one line per criterion.

use wentzell_lab::verify::{run_all, VerifyOptions, CHECK_IDS};

#[test]
fn acceptance_criteria() {
    let report = run_all(&VerifyOptions::default(), |c| {
        println!(
            "criterion {:>2} {:<28} {} measured {:.4e} tolerance {:.4e} ({:.1} s) {}",
            c.id,
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.measured,
            c.tolerance,
            c.seconds,
            c.detail
        );
    });
    assert_eq!(report.checks.len(), CHECK_IDS.len());
    assert!(report.skipped.is_empty());
    let failed: Vec<u32> = report.checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
