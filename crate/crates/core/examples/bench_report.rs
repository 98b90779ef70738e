//! Running a suite programmatically and writing the report.

use bourgain_lab::bench::{emit_report, run_suite, ExperimentConfig, Format, SuiteName};
use bourgain_lab::Result;

fn main() -> Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.params.insert("trials".into(), "10".into());
    let report = run_suite(SuiteName::Systems, &cfg)?;
    println!(
        "{} passed, {} failed, {} logged; exit code {}",
        report.summary.passed, report.summary.failed, report.summary.logged, report.exit_code
    );
    for row in report.ledger.iter().take(5) {
        println!("  {} {} = {:.4} (bound {:?})", row.entry, row.metric, row.value, row.bound);
    }

    let dir = std::env::temp_dir();
    let json = dir.join("bourgain-lab-systems.json");
    let csv = dir.join("bourgain-lab-systems.csv");
    emit_report(&report, Format::Json, &json)?;
    emit_report(&report, Format::Csv, &csv)?;
    println!("wrote {} and {}", json.display(), csv.display());

    // A deliberately bad constant trips a failure.
    cfg.override_constant("c0=1")?;
    let bad = run_suite(SuiteName::Systems, &cfg)?;
    for f in bad.failures() {
        println!("with c0 = 1: FAIL {}", f.name);
    }
    Ok(())
}
