// Cross-module checks against independent oracles: brute-force minimization
// on fine grids, hand-derived stationary points and direct enumeration.

use paretoscope::diagnose::{run_report, AnalysisReport, KindSelection, ReportOptions};
use paretoscope::mapping::{
    analyze_graph, connected_components, AnalysisSource, ComponentOptions, SolverContinuation,
};
use paretoscope::problem::{builtin, evaluate, VectorProblem};
use paretoscope::scalarize::{
    grid_count, recover_weight, simplex_grid, weighted_max, weighted_sum, ScalarizationKind,
    Weight,
};
use paretoscope::solver::{minimize_scalar, solve_simplex, SolveOutcome, SolverConfig};
use proptest::prelude::*;

/// Brute-force minimum of a scalarization over a rectangle sampled at `k` points per axis.
fn brute_min(
    p: &VectorProblem,
    kind: ScalarizationKind,
    w: &Weight,
    lo: [f64; 2],
    hi: [f64; 2],
    k: usize,
) -> (f64, Vec<f64>) {
    let mut best = (f64::INFINITY, vec![]);
    for i in 0..k {
        for j in 0..k {
            let x = vec![
                lo[0] + (hi[0] - lo[0]) * i as f64 / (k - 1) as f64,
                lo[1] + (hi[1] - lo[1]) * j as f64 / (k - 1) as f64,
            ];
            if !p.contains(&x, 0.0).unwrap() {
                continue;
            }
            if let Ok(v) = kind.eval(p, w, &x) {
                if v < best.0 {
                    best = (v, x);
                }
            }
        }
    }
    best
}

fn single_point(o: &SolveOutcome) -> &[f64] {
    let pts = o.points();
    assert_eq!(pts.len(), 1, "{o:?}");
    &pts[0]
}

#[test]
fn grid_matches_enumerated_compositions() {
    for m in 1..=4usize {
        for n in 1..=6usize {
            // count compositions of n into m nonnegative parts by direct enumeration
            let mut count = 0;
            let mut stack = vec![(0usize, 0usize)];
            while let Some((parts, used)) = stack.pop() {
                if parts == m - 1 {
                    count += 1;
                    continue;
                }
                for k in 0..=n - used {
                    stack.push((parts + 1, used + k));
                }
            }
            assert_eq!(simplex_grid(m, n).len(), count, "m={m} n={n}");
            assert_eq!(grid_count(m, n), count);
        }
    }
}

#[test]
fn scalarizations_by_hand() {
    let p = builtin("rectangle_identity").unwrap();
    let w = Weight::new(vec![0.25, 0.75]).unwrap();
    let x = [-0.5, 0.5];
    assert_eq!(weighted_sum(&p, &w, &x).unwrap(), 0.25 * -0.5 + 0.75 * 0.5);
    assert_eq!(weighted_max(&p, &w, &x).unwrap(), 0.375);
}

#[test]
fn convex_quadratic_matches_stationary_point() {
    // grad of a(x1^2 - x2) + (1-a)(x2^2 - x1) vanishes at x1 = (1-a)/(2a), x2 = a/(2(1-a))
    let p = builtin("convex_quadratic").unwrap();
    let cfg = SolverConfig::default();
    for a in [0.2, 0.5, 0.7] {
        let w = Weight::pair(a).unwrap();
        let o = minimize_scalar(&p, ScalarizationKind::WeightedSum, &w, &cfg).unwrap();
        let x = single_point(&o);
        assert!((x[0] - (1.0 - a) / (2.0 * a)).abs() < 1e-5, "{a}: {x:?}");
        assert!((x[1] - a / (2.0 * (1.0 - a))).abs() < 1e-5, "{a}: {x:?}");
    }
}

#[test]
fn linear_fractional_solver_matches_brute_force() {
    // the weighted-sum argmin of the stated objectives, found by exhaustive search
    let p = builtin("linear_fractional").unwrap();
    let cfg = SolverConfig::default();
    for a in [0.25, 0.6] {
        let w = Weight::pair(a).unwrap();
        let (bv, bx) = brute_min(&p, ScalarizationKind::WeightedSum, &w, [0.0, 0.0], [8.0, 8.0], 801);
        let o = minimize_scalar(&p, ScalarizationKind::WeightedSum, &w, &cfg).unwrap();
        let SolveOutcome::Minimizers { value, .. } = &o else {
            panic!("{o:?}")
        };
        assert!(*value <= bv + 1e-9, "{a}: solver {value} brute {bv}");
        let x = single_point(&o);
        assert!((x[0] - bx[0]).abs() < 1e-2 && (x[1] - bx[1]).abs() < 1e-2, "{x:?} vs {bx:?}");
    }
}

#[test]
fn warburton_weighted_max_matches_brute_force() {
    let p = builtin("warburton_quasiconvex").unwrap();
    let cfg = SolverConfig::default();
    let w = Weight::pair(0.25).unwrap();
    let (bv, _) = brute_min(&p, ScalarizationKind::WeightedMax, &w, [2.0, 0.0], [12.0, 4.0], 401);
    let o = minimize_scalar(&p, ScalarizationKind::WeightedMax, &w, &cfg).unwrap();
    let SolveOutcome::Minimizers { value, .. } = &o else {
        panic!("{o:?}")
    };
    assert!((value - bv).abs() < 1e-6, "solver {value} brute {bv}");
    // on x1 = 2 both weighted terms equal 1/3 at x2 = 1/2
    assert!((value - 1.0 / 3.0).abs() < 1e-6);
}

#[test]
fn rectangle_weighted_max_is_bottom_edge_inside() {
    let p = builtin("rectangle_identity").unwrap();
    let cfg = SolverConfig::default();
    let w = Weight::pair(0.5).unwrap();
    let o = minimize_scalar(&p, ScalarizationKind::WeightedMax, &w, &cfg).unwrap();
    let pts = o.points();
    assert!(pts.len() > 10);
    for x in pts {
        assert!(x[1].abs() < 1e-6 && (-1.0 - 1e-9..=1e-9).contains(&x[0]), "{x:?}");
    }
    let span = pts.iter().map(|x| x[0]).fold(f64::INFINITY, f64::min);
    assert!(span < -0.99);
}

#[test]
fn quartic_branches_lie_on_the_curve() {
    let p = builtin("nonconvex_quartic").unwrap();
    let g = solve_simplex(&p, ScalarizationKind::WeightedSum, 8, &SolverConfig::default()).unwrap();
    for e in &g.entries {
        for x in e.outcome.points() {
            assert!((x[0] * x[0] * x[1] - 1.0).abs() < 1e-6, "{x:?}");
            // stationarity of a(x1^4 - 2x2) + (1-a)(x2^2 - 2x1^2) in x2: x2 = a/(1-a)
            let a = e.weight.coords[0];
            assert!((x[1] - a / (1.0 - a)).abs() < 1e-6);
        }
    }
}

#[test]
fn analysis_partitions_the_image() {
    let p = builtin("monotone_affine").unwrap();
    let cfg = SolverConfig::default();
    let kind = ScalarizationKind::WeightedSum;
    let g = solve_simplex(&p, kind, 10, &cfg).unwrap();
    let cont = SolverContinuation { problem: &p, kind, cfg: &cfg };
    let a = analyze_graph(&g, &cont, AnalysisSource::Solver, ComponentOptions::defaults_for(&cfg));
    let total: usize = g.entries.iter().map(|e| e.outcome.points().len()).sum();
    let mut seen: Vec<usize> = a.components.iter().flat_map(|c| c.members.clone()).collect();
    seen.sort_unstable();
    assert_eq!(seen, (0..total).collect::<Vec<_>>());
}

#[test]
fn report_round_trips_through_json() {
    let p = builtin("warburton_quasiconvex").unwrap();
    let opts = ReportOptions {
        resolution: 6,
        kinds: KindSelection::Max,
        probe_trials: 500,
        ..ReportOptions::default()
    };
    let r = run_report(&p, &SolverConfig::default(), &opts).unwrap();
    let text = r.to_json().unwrap();
    let back = AnalysisReport::from_json(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.to_json().unwrap(), text);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recovered_weight_matches_harmonic_formula(f in prop::collection::vec(1e-3f64..1e3, 2..6)) {
        let xi = recover_weight(&f).unwrap();
        let inv: f64 = f.iter().map(|v| 1.0 / v).sum();
        for (x, v) in xi.coords.iter().zip(&f) {
            prop_assert!((x - (1.0 / v) / inv).abs() <= 1e-12);
        }
    }

    #[test]
    fn weighted_sum_is_bounded_by_m_times_weighted_max(a in 0.0f64..=1.0, x1 in -3.0f64..3.0, x2 in -3.0f64..3.0) {
        // each of the m terms of the sum is at most the largest one
        let p = builtin("nonconvex_quartic").unwrap();
        let w = Weight::pair(a).unwrap();
        let x = [x1, x2];
        let s = weighted_sum(&p, &w, &x).unwrap();
        prop_assert!(s <= 2.0 * weighted_max(&p, &w, &x).unwrap() + 1e-9 * s.abs().max(1.0));
    }

    #[test]
    fn components_shrink_as_eps_grows(pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..40), e in 0.05f64..2.0) {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|(a, b)| vec![a, b]).collect();
        prop_assert!(connected_components(&pts, 2.0 * e).len() <= connected_components(&pts, e).len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn solver_minimizers_are_feasible_and_no_worse_than_witness(name_idx in 0usize..6, a in 0.05f64..0.95) {
        let name = paretoscope::problem::BUILTIN_NAMES[name_idx];
        let p = builtin(name).unwrap();
        let cfg = SolverConfig { radii: vec![4.0, 16.0], lattice_per_axis: 65, ..SolverConfig::default() };
        let w = Weight::pair(a).unwrap();
        for kind in [ScalarizationKind::WeightedSum, ScalarizationKind::WeightedMax] {
            let o = minimize_scalar(&p, kind, &w, &cfg).unwrap();
            if let SolveOutcome::Minimizers { points, value, .. } = &o {
                let at_witness = kind.eval(&p, &w, &p.feasible.witness).unwrap();
                prop_assert!(*value <= at_witness + 1e-9);
                for x in points {
                    prop_assert!(p.contains(x, 1e-9).unwrap());
                    let f = evaluate(&p, x).unwrap();
                    prop_assert!(kind.combine(&w, &f) <= value + 1e-4 * value.abs().max(1.0));
                }
            }
        }
    }
}
