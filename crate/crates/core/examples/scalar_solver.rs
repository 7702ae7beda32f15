// One scalarized problem at a time: minimizer sets and escape verdicts.

use paretoscope::problem::builtin;
use paretoscope::scalarize::{ScalarizationKind, Weight};
use paretoscope::solver::{minimize_scalar, SolveOutcome, SolverConfig};

pub fn run() -> paretoscope::Result<()> {
    let p = builtin("nonconvex_quartic")?;
    let cfg = SolverConfig::default();
    for a in [0.0, 0.25, 0.5, 1.0] {
        let w = Weight::pair(a)?;
        match minimize_scalar(&p, ScalarizationKind::WeightedSum, &w, &cfg)? {
            SolveOutcome::Minimizers { points, value, clusters, .. } => {
                println!("xi1={a}: value {value:.6}, {} point(s) in {} cluster(s)", points.len(),
                    clusters.iter().max().map_or(0, |c| c + 1));
                for x in &points {
                    println!("    x = ({:.6}, {:.6})  x1^2 x2 = {:.6}", x[0], x[1], x[0] * x[0] * x[1]);
                }
            }
            SolveOutcome::Escaping { values_by_radius } => {
                println!("xi1={a}: no minimizer, window minima {values_by_radius:?}");
            }
            SolveOutcome::InfeasibleWindow => println!("xi1={a}: window misses the feasible set"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> paretoscope::Result<()> {
    run()
}
