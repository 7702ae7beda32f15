// Full analysis report with theorem checks, written as JSON.

use paretoscope::diagnose::{run_report, AnalysisReport, ReportOptions};
use paretoscope::problem::builtin;
use paretoscope::solver::SolverConfig;

pub fn run() -> paretoscope::Result<()> {
    let p = builtin("convex_quadratic")?;
    let opts = ReportOptions { resolution: 12, probe_trials: 2000, ..ReportOptions::default() };
    let report = run_report(&p, &SolverConfig::default(), &opts)?;
    for r in &report.results {
        for c in &r.checks {
            println!(
                "{:<32} {:<14} consistent={} ({})",
                format!("{:?}", c.theorem_id),
                format!("{:?}", c.mode),
                c.consistent,
                c.conclusion_observed.evidence
            );
        }
    }
    let json = report.to_json()?;
    assert_eq!(AnalysisReport::from_json(&json)?, report);
    println!("report: {} bytes, schema version {}", json.len(), report.schema_version);
    for n in &report.notes {
        println!("note: {n}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> paretoscope::Result<()> {
    run()
}
