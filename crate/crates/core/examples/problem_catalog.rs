// Builtin problems, objective evaluation and the JSON problem format.

use paretoscope::problem::{builtin, evaluate, ProblemFile, BUILTIN_NAMES};

pub fn run() -> paretoscope::Result<()> {
    for name in BUILTIN_NAMES {
        let p = builtin(name)?;
        let f = evaluate(&p, &p.feasible.witness)?;
        println!("{name:<22} n={} m={} f(witness)={f:?}", p.n, p.m);
    }

    // a problem written as JSON loads back to the same definition
    let quartic = builtin("nonconvex_quartic")?;
    let text = serde_json::to_string_pretty(&ProblemFile::from_problem(&quartic))?;
    let back: ProblemFile = serde_json::from_str(&text)?;
    let again = back.into_problem()?;
    assert_eq!(evaluate(&again, &[1.0, 1.0])?, evaluate(&quartic, &[1.0, 1.0])?);
    println!("round trip through {} bytes of JSON ok", text.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> paretoscope::Result<()> {
    run()
}
