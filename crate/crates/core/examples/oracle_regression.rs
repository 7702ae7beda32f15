// Solver output against the closed-form solution maps of the builtins.

use paretoscope::oracle::compare_with_oracle;
use paretoscope::problem::{builtin, BUILTIN_NAMES};
use paretoscope::solver::{solve_simplex, SolverConfig};

pub fn run() -> paretoscope::Result<()> {
    let cfg = SolverConfig::default();
    for name in BUILTIN_NAMES {
        let p = builtin(name)?;
        let kind = p.oracle.as_ref().expect("builtins carry oracles").kind;
        let g = solve_simplex(&p, kind, 8, &cfg)?;
        let c = compare_with_oracle(&p, &g)?;
        println!(
            "{name:<22} {:<13} max hausdorff {:.2e}  ratio {:>8.3}  domain mismatches {}  {}",
            kind.label(),
            c.max_hausdorff,
            c.max_ratio,
            c.domain_mismatches,
            if c.all_ok { "agree" } else { "DISAGREE" }
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> paretoscope::Result<()> {
    run()
}
