//! Solver output against the closed-form solution maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::{dist, norm_inf, GraphSample};
use crate::problem::{oracle_eval, oracle_set_distance, VectorProblem};
use crate::solver::SolveOutcome;

/// Relative Hausdorff tolerance: `HAUSDORFF_TOL * (1 + |oracle points|_inf)`.
pub const HAUSDORFF_TOL: f64 = 5e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightComparison {
    pub weight: Vec<f64>,
    pub oracle_in_domain: bool,
    pub solver_in_domain: bool,
    pub hausdorff: Option<f64>,
    pub tolerance: Option<f64>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub weights: Vec<WeightComparison>,
    /// Largest `hausdorff / tolerance` over weights where both sides have a value.
    pub max_ratio: f64,
    pub max_hausdorff: f64,
    pub worst_weight: Option<Vec<f64>>,
    pub domain_mismatches: usize,
    pub all_ok: bool,
}

fn hausdorff(
    problem: &VectorProblem,
    w: &crate::scalarize::Weight,
    solver_pts: &[Vec<f64>],
    oracle_pts: &[Vec<f64>],
) -> Result<f64> {
    let mut h: f64 = 0.0;
    for x in solver_pts {
        let d = oracle_set_distance(problem, w, x)?.unwrap_or(f64::INFINITY);
        h = h.max(d);
    }
    for o in oracle_pts {
        let d = solver_pts
            .iter()
            .map(|x| dist(x, o))
            .fold(f64::INFINITY, f64::min);
        h = h.max(d);
    }
    Ok(h)
}

/// Compares every entry of `g` with the oracle map truncated to the final window.
/// The graph must sample the scalarization the oracle describes.
pub fn compare_with_oracle(problem: &VectorProblem, g: &GraphSample) -> Result<OracleComparison> {
    let oracle = problem
        .oracle
        .as_ref()
        .ok_or_else(|| Error::NoOracle(problem.name.clone()))?;
    if oracle.kind != g.kind {
        return Err(Error::Precondition(format!(
            "oracle describes {} but the graph samples {}",
            oracle.kind.label(),
            g.kind.label()
        )));
    }
    let r = g.final_radius();
    let mut out = Vec::with_capacity(g.entries.len());
    for e in &g.entries {
        let ov = oracle_eval(problem, &e.weight, r)?;
        let o_pts = ov.points();
        let oracle_in = !matches!(ov, crate::problem::OracleValue::Empty);
        let solver_in = e.outcome.in_domain();
        let (h, tol) = if oracle_in && solver_in {
            let h = hausdorff(problem, &e.weight, e.outcome.points(), o_pts)?;
            let scale = o_pts.iter().map(|p| norm_inf(p)).fold(0.0, f64::max);
            // an unmatched point leaves no finite distance; reported as missing
            (h.is_finite().then_some(h), Some(HAUSDORFF_TOL * (1.0 + scale)))
        } else {
            (None, None)
        };
        let class_ok = if oracle_in {
            solver_in
        } else {
            matches!(e.outcome, SolveOutcome::Escaping { .. })
        };
        let ok = class_ok && tol.is_none_or(|t| h.is_some_and(|h| h <= t));
        out.push(WeightComparison {
            weight: e.weight.coords.clone(),
            oracle_in_domain: oracle_in,
            solver_in_domain: solver_in,
            hausdorff: h,
            tolerance: tol,
            ok,
        });
    }
    let mut max_ratio: f64 = 0.0;
    let mut max_h: f64 = 0.0;
    let mut worst = None;
    for c in &out {
        if let (Some(h), Some(t)) = (c.hausdorff, c.tolerance) {
            max_h = max_h.max(h);
            if h / t > max_ratio {
                max_ratio = h / t;
                worst = Some(c.weight.clone());
            }
        }
    }
    if worst.is_none() {
        worst = out.iter().find(|c| !c.ok).map(|c| c.weight.clone());
    }
    let domain_mismatches = out
        .iter()
        .filter(|c| c.oracle_in_domain != c.solver_in_domain)
        .count();
    let all_ok = out.iter().all(|c| c.ok);
    Ok(OracleComparison {
        weights: out,
        max_ratio,
        max_hausdorff: max_h,
        worst_weight: worst,
        domain_mismatches,
        all_ok,
    })
}
