// Sampling a solution mapping over the simplex and reading its structure.

use paretoscope::mapping::{analyze_graph, AnalysisSource, ComponentOptions, SolverContinuation};
use paretoscope::problem::builtin;
use paretoscope::scalarize::ScalarizationKind;
use paretoscope::solver::{solve_simplex, SolverConfig};

pub fn run() -> paretoscope::Result<()> {
    let p = builtin("monotone_affine")?;
    let cfg = SolverConfig::default();
    let kind = ScalarizationKind::WeightedSum;
    let g = solve_simplex(&p, kind, 12, &cfg)?;
    let cont = SolverContinuation { problem: &p, kind, cfg: &cfg };
    let a = analyze_graph(&g, &cont, AnalysisSource::Solver, ComponentOptions::defaults_for(&cfg));

    println!("domain: {}/{} weights in {} grid component(s)", a.dom_weights, a.grid_weights, a.domain_components);
    println!("closedness: {:?}", a.domain);
    for c in &a.components {
        println!(
            "component {}: {} points from {} weights, max |x| {:.2}, reached {:.1}, bounded at scale: {}",
            c.id,
            c.members.len(),
            c.inverse_weights.len(),
            c.max_norm,
            c.extension_norm,
            c.bounded_at_scale
        );
    }
    println!("closed-graph constant {:.3}", a.closed_graph_constant);
    Ok(())
}

#[allow(dead_code)]
fn main() -> paretoscope::Result<()> {
    run()
}
