// Randomized refutation of quasiconvexity.

use paretoscope::problem::{builtin, FeasibleSet};
use paretoscope::scalarize::{quasiconvexity_probe, QuasiconvexityVerdict};
use paretoscope::Expr;

pub fn run() -> paretoscope::Result<()> {
    let p = builtin("warburton_quasiconvex")?;
    for (k, g) in p.objectives.iter().enumerate() {
        let v = quasiconvexity_probe(g, &p.feasible, 10_000, k as u64);
        println!("f{} = {}: passed {}", k + 1, g.source(), v.passed());
    }

    let saddle = Expr::parse("-2*x1^2 + x2^2", 2)?;
    match quasiconvexity_probe(&saddle, &FeasibleSet::whole_space(2), 10_000, 7) {
        QuasiconvexityVerdict::Counterexample { x, y, t, excess } => {
            println!("{} fails between {x:.3?} and {y:.3?} at t={t:.3}, excess {excess:.3}", saddle.source())
        }
        QuasiconvexityVerdict::Pass { trials } => println!("no counterexample in {trials} trials"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> paretoscope::Result<()> {
    run()
}
