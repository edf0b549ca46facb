//! Every acceptance criterion at its stated tolerance and time budget.
//! Run with `cargo test --release -p tpms-oh --test acceptance -- --nocapture`.

use tpms_oh::verify::run_all;

#[test]
fn acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let reports = run_all(dir.path());
    for r in &reports {
        println!("{}", r.summary_line());
    }
    let failed: Vec<usize> = reports.iter().filter(|r| !r.pass()).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
