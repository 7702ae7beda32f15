// A user-defined problem read from JSON and analysed end to end.

use paretoscope::diagnose::{run_report, ReportOptions};
use paretoscope::problem::ProblemFile;
use paretoscope::solver::SolverConfig;

const PROBLEM: &str = r#"{
  "name": "shifted_paraboloids",
  "n": 2,
  "m": 2,
  "objectives": ["(x1 - 1)^2 + x2^2", "(x1 + 1)^2 + x2^2"],
  "feasible": { "variant": "whole_space" },
  "tags": { "convexity": "convex_polynomial", "lower_bound": "bounded_below_by_zero" }
}"#;

pub fn run() -> paretoscope::Result<()> {
    let p = serde_json::from_str::<ProblemFile>(PROBLEM)?.into_problem()?;
    let cfg = SolverConfig {
        radii: vec![4.0, 16.0],
        ..SolverConfig::default()
    };
    let opts = ReportOptions { resolution: 8, probe_trials: 2000, ..ReportOptions::default() };
    let report = run_report(&p, &cfg, &opts)?;
    for r in &report.results {
        let a = &r.analysis;
        println!(
            "{}: {} component(s), {} unbounded, domain closed: {}",
            r.kind.label(),
            a.components.len(),
            a.unbounded_components(),
            a.domain.is_closed()
        );
    }
    println!("inconsistent checks: {}", report.inconsistent_checks());
    Ok(())
}

#[allow(dead_code)]
fn main() -> paretoscope::Result<()> {
    run()
}
