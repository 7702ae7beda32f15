// SVG figure of an analysis; the path defaults to a file in the temp directory.

use paretoscope::diagnose::{run_report, KindSelection, ReportOptions};
use paretoscope::problem::builtin;
use paretoscope::solver::SolverConfig;
use paretoscope::svg::render_report;

pub fn run() -> paretoscope::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("paretoscope_quartic.svg"));
    let p = builtin("nonconvex_quartic")?;
    let opts = ReportOptions {
        resolution: 16,
        kinds: KindSelection::Sum,
        ..ReportOptions::default()
    };
    let report = run_report(&p, &SolverConfig::default(), &opts)?;
    let svg = render_report(&report);
    std::fs::write(&out, &svg).map_err(|source| paretoscope::Error::Io { path: out.clone(), source })?;
    println!("wrote {} ({} bytes)", out.display(), svg.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> paretoscope::Result<()> {
    run()
}
