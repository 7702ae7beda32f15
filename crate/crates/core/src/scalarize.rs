//! Weighted-sum and weighted-max scalarizations over the standard simplex.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::problem::{contains, evaluate, FeasibleKind, FeasibleSet, VectorProblem};

/// Coordinates at or below this count as zero when classifying interior weights.
pub const INTERIOR_EPS: f64 = 1e-12;
/// Objective values at or below this select the unit-vector branch of [`recover_weight`].
pub const ZERO_EPS: f64 = 1e-9;
const SUM_TOL: f64 = 1e-12;

/// A point of the standard simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub coords: Vec<f64>,
    pub is_interior: bool,
}

impl Weight {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Precondition("weight must have at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::Precondition(format!(
                "weight coordinates must be nonnegative: {coords:?}"
            )));
        }
        let s: f64 = coords.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::Precondition(format!("weight sums to {s}, not 1")));
        }
        let is_interior = coords.iter().all(|&c| c > INTERIOR_EPS);
        Ok(Weight { coords, is_interior })
    }

    pub fn m(&self) -> usize {
        self.coords.len()
    }

    /// The k-th vertex of the simplex.
    pub fn unit(m: usize, k: usize) -> Self {
        let mut coords = vec![0.0; m];
        coords[k] = 1.0;
        Weight {
            coords,
            is_interior: m == 1,
        }
    }

    /// Integer lattice coordinates at resolution `n`.
    pub fn grid_index(&self, n: usize) -> Vec<i64> {
        self.coords.iter().map(|c| (c * n as f64).round() as i64).collect()
    }

    /// Two-criteria convenience: `(a, 1 - a)`.
    pub fn pair(a: f64) -> Result<Self> {
        Weight::new(vec![a, 1.0 - a])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarizationKind {
    WeightedSum,
    WeightedMax,
}

impl ScalarizationKind {
    pub fn eval(self, problem: &VectorProblem, w: &Weight, x: &[f64]) -> Result<f64> {
        match self {
            ScalarizationKind::WeightedSum => weighted_sum(problem, w, x),
            ScalarizationKind::WeightedMax => weighted_max(problem, w, x),
        }
    }

    /// Combine precomputed objective values.
    pub fn combine(self, w: &Weight, fvals: &[f64]) -> f64 {
        let terms = w.coords.iter().zip(fvals).map(|(a, f)| a * f);
        match self {
            ScalarizationKind::WeightedSum => terms.sum(),
            ScalarizationKind::WeightedMax => terms.fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ScalarizationKind::WeightedSum => "weighted_sum",
            ScalarizationKind::WeightedMax => "weighted_max",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ScalarizationKind::WeightedSum => "Θ₁",
            ScalarizationKind::WeightedMax => "Θ₂",
        }
    }
}

fn check_m(problem: &VectorProblem, w: &Weight) -> Result<()> {
    if w.m() != problem.m {
        return Err(Error::Dimension {
            expected: problem.m,
            got: w.m(),
        });
    }
    Ok(())
}

/// `Σ ξᵢ fᵢ(x)`.
pub fn weighted_sum(problem: &VectorProblem, w: &Weight, x: &[f64]) -> Result<f64> {
    check_m(problem, w)?;
    let f = evaluate(problem, x)?;
    Ok(ScalarizationKind::WeightedSum.combine(w, &f))
}

/// `max ξᵢ fᵢ(x)`.
pub fn weighted_max(problem: &VectorProblem, w: &Weight, x: &[f64]) -> Result<f64> {
    check_m(problem, w)?;
    let f = evaluate(problem, x)?;
    Ok(ScalarizationKind::WeightedMax.combine(w, &f))
}

/// Weight that equalizes the products `ξᵢ fᵢ` for a nonnegative value vector.
pub fn recover_weight(fvals: &[f64]) -> Result<Weight> {
    if fvals.is_empty() {
        return Err(Error::Precondition("empty value vector".into()));
    }
    if let Some(v) = fvals.iter().find(|v| v.is_nan() || **v < 0.0 || !v.is_finite()) {
        return Err(Error::Precondition(format!(
            "recover_weight needs finite nonnegative values, got {v}"
        )));
    }
    if let Some(k) = fvals.iter().position(|&v| v <= ZERO_EPS) {
        return Ok(Weight::unit(fvals.len(), k));
    }
    // Scale by the smallest entry first so the reciprocals stay O(1).
    let fmin = fvals.iter().cloned().fold(f64::INFINITY, f64::min);
    let inv: Vec<f64> = fvals.iter().map(|v| fmin / v).collect();
    let s: f64 = inv.iter().sum();
    let coords: Vec<f64> = inv.iter().map(|v| v / s).collect();
    Ok(Weight {
        is_interior: coords.iter().all(|&c| c > INTERIOR_EPS),
        coords,
    })
}

/// All simplex weights with coordinates in `{0, 1/N, .., 1}`, lexicographically ordered.
pub fn simplex_grid(m: usize, n: usize) -> Vec<Weight> {
    assert!(m >= 1 && n >= 1, "simplex_grid needs m >= 1 and N >= 1");
    let mut out = Vec::new();
    let mut k = vec![0usize; m];
    fill(&mut k, 0, n, n, &mut out);
    out
}

fn fill(k: &mut Vec<usize>, pos: usize, left: usize, n: usize, out: &mut Vec<Weight>) {
    let m = k.len();
    if pos == m - 1 {
        k[pos] = left;
        let coords: Vec<f64> = k.iter().map(|&v| v as f64 / n as f64).collect();
        let is_interior = k.iter().all(|&v| v > 0);
        out.push(Weight { coords, is_interior });
        return;
    }
    for v in 0..=left {
        k[pos] = v;
        fill(k, pos + 1, left - v, n, out);
    }
}

/// Number of grid weights, `C(N+m-1, m-1)`.
pub fn grid_count(m: usize, n: usize) -> usize {
    let mut c: u128 = 1;
    for i in 0..(m - 1) as u128 {
        c = c * (n as u128 + 1 + i) / (i + 1);
    }
    c as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum WeakParetoVerdict {
    Dominated { witness: Vec<f64> },
    UndominatedAmongProbes,
}

/// Searches `probes` for a point strictly better than `x` in every objective.
pub fn is_weak_pareto(
    problem: &VectorProblem,
    x: &[f64],
    probes: &[Vec<f64>],
    tol: f64,
) -> Result<WeakParetoVerdict> {
    if !problem.contains(x, 1e-9)? {
        return Err(Error::Precondition(format!("point {x:?} is not feasible")));
    }
    let fx = evaluate(problem, x)?;
    Ok(dominance_search(problem, &fx, probes, tol))
}

/// Dominance search against precomputed `f(x)`; probes that fail to evaluate are skipped.
pub fn dominance_search(
    problem: &VectorProblem,
    fx: &[f64],
    probes: &[Vec<f64>],
    tol: f64,
) -> WeakParetoVerdict {
    for y in probes {
        let Ok(fy) = evaluate(problem, y) else { continue };
        if dominates(&fy, fx, tol) {
            return WeakParetoVerdict::Dominated { witness: y.clone() };
        }
    }
    WeakParetoVerdict::UndominatedAmongProbes
}

/// `fy` strictly better than `fx` in every coordinate by more than `tol`.
pub fn dominates(fy: &[f64], fx: &[f64], tol: f64) -> bool {
    fy.iter().zip(fx).all(|(a, b)| *a < *b - tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum QuasiconvexityVerdict {
    Pass { trials: usize },
    Counterexample {
        x: Vec<f64>,
        y: Vec<f64>,
        t: f64,
        /// `g(tx+(1-t)y) - max(g(x), g(y))`.
        excess: f64,
    },
}

impl QuasiconvexityVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, QuasiconvexityVerdict::Pass { .. })
    }
}

/// Default sampling window for [`quasiconvexity_probe`].
pub const PROBE_RADIUS: f64 = 16.0;
const QC_TOL: f64 = 1e-9;

/// Randomized refutation of quasiconvexity of `g` over `fs`.
pub fn quasiconvexity_probe(
    g: &Expr,
    fs: &FeasibleSet,
    trials: usize,
    seed: u64,
) -> QuasiconvexityVerdict {
    quasiconvexity_probe_in(g, fs, trials, seed, PROBE_RADIUS)
}

pub fn quasiconvexity_probe_in(
    g: &Expr,
    fs: &FeasibleSet,
    trials: usize,
    seed: u64,
    radius: f64,
) -> QuasiconvexityVerdict {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let Some(bounds) = fs.window_bounds(radius) else {
        return QuasiconvexityVerdict::Pass { trials: 0 };
    };
    for _ in 0..trials {
        let (Some(x), Some(y)) = (
            sample_feasible(fs, &bounds, &mut rng),
            sample_feasible(fs, &bounds, &mut rng),
        ) else {
            continue;
        };
        let t: f64 = rng.gen_range(f64::EPSILON..1.0);
        let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        if !matches!(fs.kind, FeasibleKind::Box { .. }) && !matches!(contains(fs, &z, 0.0), Ok(true))
        {
            continue;
        }
        let (Ok(gx), Ok(gy), Ok(gz)) = (g.eval(&x), g.eval(&y), g.eval(&z)) else {
            continue;
        };
        let hi = gx.max(gy);
        let excess = gz - hi;
        if excess > QC_TOL * hi.abs().max(1.0) {
            return QuasiconvexityVerdict::Counterexample { x, y, t, excess };
        }
    }
    QuasiconvexityVerdict::Pass { trials }
}

fn sample_feasible(fs: &FeasibleSet, bounds: &[(f64, f64)], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    for _ in 0..64 {
        let p: Vec<f64> = bounds
            .iter()
            .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
            .collect();
        if matches!(contains(fs, &p, 0.0), Ok(true)) {
            return Some(p);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{builtin, Tags};
    use proptest::prelude::*;
    use rand::Rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * (1.0 + b.abs())
    }

    #[test]
    fn weighted_sum_examples() {
        let q = builtin("nonconvex_quartic").unwrap();
        let e1 = Weight::pair(1.0).unwrap();
        let x = [0.3, -1.7];
        assert_eq!(
            weighted_sum(&q, &e1, &x).unwrap(),
            evaluate(&q, &x).unwrap()[0]
        );
        let h = Weight::pair(0.5).unwrap();
        assert_eq!(weighted_sum(&q, &h, &[1.0, 1.0]).unwrap(), -1.0);
        let c = builtin("convex_quadratic").unwrap();
        // ξ₁x₁² + (1−ξ₁)x₂² − (1−ξ₁)x₁ − ξ₁x₂ at ξ₁ = x₁ = x₂ = 1/2
        let by_hand = 0.5 * 0.25 + 0.5 * 0.25 - 0.5 * 0.5 - 0.5 * 0.5;
        assert!(close(weighted_sum(&c, &h, &[0.5, 0.5]).unwrap(), by_hand));
        assert!(close(by_hand, -0.25));
    }

    #[test]
    fn weighted_max_examples() {
        let r = builtin("rectangle_identity").unwrap();
        let e1 = Weight::pair(1.0).unwrap();
        let f = evaluate(&r, &[-0.25, 0.5]).unwrap();
        assert_eq!(weighted_max(&r, &e1, &[-0.25, 0.5]).unwrap(), f[0].max(0.0));
        let h = Weight::pair(0.5).unwrap();
        assert_eq!(weighted_max(&r, &h, &[-1.0, 1.0]).unwrap(), 0.5);
        let w = builtin("warburton_quasiconvex").unwrap();
        assert!(close(weighted_max(&w, &h, &[2.0, 0.0]).unwrap(), 1.0));
        assert!(weighted_max(&w, &Weight::new(vec![1.0]).unwrap(), &[2.0, 0.0]).is_err());
    }

    #[test]
    fn recover_weight_examples() {
        assert_eq!(recover_weight(&[1.0, 1.0]).unwrap().coords, vec![0.5, 0.5]);
        let w = recover_weight(&[1.0, 2.0]).unwrap();
        assert!(close(w.coords[0], 2.0 / 3.0) && close(w.coords[1], 1.0 / 3.0));
        assert_eq!(recover_weight(&[0.0, 5.0]).unwrap().coords, vec![1.0, 0.0]);
        assert!(!recover_weight(&[0.0, 5.0]).unwrap().is_interior);
        assert_eq!(recover_weight(&[3.0, 0.0, 0.0]).unwrap().coords, vec![0.0, 1.0, 0.0]);
        assert!(recover_weight(&[-1.0, 2.0]).is_err());
        let w = recover_weight(&[2.0, 2.0]).unwrap();
        assert_eq!(w.coords[0] * 2.0, 1.0);
    }

    #[test]
    fn simplex_grid_examples() {
        let g = simplex_grid(2, 2);
        let c: Vec<Vec<f64>> = g.iter().map(|w| w.coords.clone()).collect();
        assert_eq!(c, vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]);
        let g = simplex_grid(2, 4);
        assert_eq!(g.len(), 5);
        assert_eq!(g.iter().filter(|w| w.is_interior).count(), 3);
        let g = simplex_grid(3, 1);
        assert_eq!(g.len(), 3);
        assert!(g.iter().all(|w| !w.is_interior));
        assert_eq!(grid_count(3, 5), 21);
        assert_eq!(simplex_grid(3, 5).len(), 21);
        assert_eq!(simplex_grid(1, 3).len(), 1);
    }

    #[test]
    fn weak_pareto_examples() {
        let r = builtin("rectangle_identity").unwrap();
        let probes: Vec<Vec<f64>> = (0..=10)
            .flat_map(|i| (0..=10).map(move |j| vec![-1.0 + i as f64 / 10.0, j as f64 / 10.0]))
            .collect();
        assert_eq!(
            is_weak_pareto(&r, &[-1.0, 0.0], &probes, 1e-12).unwrap(),
            WeakParetoVerdict::UndominatedAmongProbes
        );
        assert_eq!(
            is_weak_pareto(&r, &[0.0, 1.0], &[vec![-1.0, 0.0]], 1e-12).unwrap(),
            WeakParetoVerdict::Dominated {
                witness: vec![-1.0, 0.0]
            }
        );
        let q = builtin("nonconvex_quartic").unwrap();
        assert_eq!(
            is_weak_pareto(&q, &[0.4, 2.0], &[vec![0.4, 2.0]], 0.0).unwrap(),
            WeakParetoVerdict::UndominatedAmongProbes
        );
        assert!(is_weak_pareto(&r, &[1.0, 0.0], &probes, 0.0).is_err());
    }

    #[test]
    fn quasiconvexity_examples() {
        let plane = FeasibleSet::whole_space(2);
        let lin = Expr::parse("x1", 2).unwrap();
        for seed in [0, 1, 99] {
            assert!(quasiconvexity_probe(&lin, &plane, 2000, seed).passed());
        }
        let w = builtin("warburton_quasiconvex").unwrap();
        assert!(quasiconvexity_probe(&w.objectives[0], &w.feasible, 10_000, 3).passed());
        let g = Expr::parse("-2*x1^2 + x2^2", 2).unwrap();
        match quasiconvexity_probe(&g, &plane, 1000, 1) {
            QuasiconvexityVerdict::Counterexample { x, y, t, excess } => {
                let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
                let gz = g.eval(&z).unwrap();
                assert!(gz > g.eval(&x).unwrap().max(g.eval(&y).unwrap()));
                assert!(excess > 0.0);
            }
            v => panic!("expected a counterexample, got {v:?}"),
        }
        // the hand counterexample
        let gm = g.eval(&[0.0, 0.0]).unwrap();
        assert!(gm > g.eval(&[-1.0, 0.0]).unwrap().max(g.eval(&[1.0, 0.0]).unwrap()));
    }

    #[test]
    fn quasiconvexity_probe_is_seeded() {
        let g = Expr::parse("-2*x1^2 + x2^2", 2).unwrap();
        let fs = FeasibleSet::whole_space(2);
        assert_eq!(
            quasiconvexity_probe(&g, &fs, 500, 42),
            quasiconvexity_probe(&g, &fs, 500, 42)
        );
    }

    #[test]
    fn weight_validation() {
        assert!(Weight::new(vec![0.5, 0.6]).is_err());
        assert!(Weight::new(vec![-0.1, 1.1]).is_err());
        assert!(Weight::new(vec![]).is_err());
        assert!(Weight::new(vec![0.25, 0.75]).unwrap().is_interior);
        let p = VectorProblem::new(
            "one",
            1,
            vec![Expr::parse("x1", 1).unwrap()],
            FeasibleSet::whole_space(1),
            Tags::default(),
        )
        .unwrap();
        assert_eq!(weighted_sum(&p, &Weight::new(vec![1.0]).unwrap(), &[3.0]).unwrap(), 3.0);
    }

    fn positive_vec() -> impl Strategy<Value = Vec<f64>> {
        prop_oneof![Just(2usize), Just(3usize), Just(5usize)]
            .prop_flat_map(|m| proptest::collection::vec(1e-6f64..1e6, m))
    }

    proptest! {
        #[test]
        fn recover_weight_equalizes(f in positive_vec()) {
            let w = recover_weight(&f).unwrap();
            let fmax = f.iter().cloned().fold(0.0, f64::max);
            let prods: Vec<f64> = w.coords.iter().zip(&f).map(|(a, b)| a * b).collect();
            for p in &prods {
                prop_assert!((p - prods[0]).abs() <= 1e-12 * fmax);
            }
            let target = 1.0 / f.iter().map(|v| 1.0 / v).sum::<f64>();
            let got = ScalarizationKind::WeightedMax.combine(&w, &f);
            prop_assert!((got - target).abs() <= 1e-9 * target.max(1.0));
        }

        #[test]
        fn recover_weight_is_scale_invariant(f in positive_vec(), c in 1e-3f64..1e3) {
            let a = recover_weight(&f).unwrap();
            let scaled: Vec<f64> = f.iter().map(|v| v * c).collect();
            let b = recover_weight(&scaled).unwrap();
            for (x, y) in a.coords.iter().zip(&b.coords) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }

        #[test]
        fn weighted_max_bounded_by_max_objective(f in positive_vec(), seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let raw: Vec<f64> = f.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let w = Weight { coords: raw.iter().map(|r| r / s).collect(), is_interior: true };
            let fmax = f.iter().cloned().fold(0.0, f64::max);
            prop_assert!(ScalarizationKind::WeightedMax.combine(&w, &f) <= fmax);
        }

        #[test]
        fn grid_weights_are_valid(m in 1usize..5, n in 1usize..12) {
            let g = simplex_grid(m, n);
            prop_assert_eq!(g.len(), grid_count(m, n));
            for w in &g {
                let s: f64 = w.coords.iter().sum();
                prop_assert!((s - 1.0).abs() <= 1e-12);
                prop_assert_eq!(w.is_interior, w.coords.iter().all(|&c| c > INTERIOR_EPS));
            }
            for pair in g.windows(2) {
                prop_assert!(pair[0].coords < pair[1].coords);
            }
        }
    }
}
