//! Runs every reproduction criterion and prints one line per criterion.

use std::io::Write;
use std::path::PathBuf;

use beauville::verify::{run_all, Status, VerifyOptions};

#[test]
fn acceptance() {
    let opts = VerifyOptions {
        z5_cubed: true,
        zn_values: vec![5, 7, 11],
        group_files: Some(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/small_groups")),
        only: std::env::var("ACCEPTANCE_ONLY")
            .ok()
            .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect()),
    };
    let outcomes = run_all(&opts);
    // Written to the raw handle so the summary shows up even when output is captured.
    let mut err = std::io::stderr().lock();
    for o in &outcomes {
        writeln!(err, "{o}").unwrap();
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| o.status == Status::Fail).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
