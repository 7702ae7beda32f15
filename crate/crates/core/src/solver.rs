//! Lattice plus pattern-descent minimization of one scalarized subproblem
//! inside a sequence of expanding windows.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::{GraphEntry, GraphSample};
use crate::problem::{cartesian, evaluate, lattice_axis, FeasibleKind, VectorProblem};
use crate::scalarize::{simplex_grid, ScalarizationKind, Weight};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub radii: Vec<f64>,
    pub lattice_per_axis: usize,
    pub refine_steps: usize,
    pub value_tol: f64,
    pub point_tol: f64,
    pub escape_decrease_min: f64,
    pub near_opt_band: f64,
    /// Above this many deduplicated minimizers a weight keeps a farthest-first subset.
    pub max_points_per_weight: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            radii: vec![4.0, 16.0, 64.0, 256.0],
            lattice_per_axis: 129,
            refine_steps: 60,
            value_tol: 1e-6,
            point_tol: 1e-6,
            escape_decrease_min: 1e-3,
            near_opt_band: 1e-4,
            max_points_per_weight: 20_000,
        }
    }
}

/// Cap on lattice points per window; the per-axis count shrinks in higher dimension.
const LATTICE_BUDGET: f64 = 200_000.0;
const MAX_SEEDS: usize = 32;
const MAX_WARM: usize = 16;
const MOVES_PER_STEP: usize = 1000;

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::Config("radii must be nonempty".into()));
        }
        if self.radii.iter().any(|r| r.is_nan() || *r <= 0.0 || !r.is_finite()) {
            return Err(Error::Config("radii must be positive and finite".into()));
        }
        if self.radii.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Config("radii must be strictly increasing".into()));
        }
        if self.lattice_per_axis < 3 {
            return Err(Error::Config("lattice_per_axis must be at least 3".into()));
        }
        let tols = [
            self.value_tol,
            self.point_tol,
            self.escape_decrease_min,
            self.near_opt_band,
        ];
        if tols.iter().any(|t| t.is_nan() || *t <= 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.max_points_per_weight == 0 {
            return Err(Error::Config("max_points_per_weight must be positive".into()));
        }
        Ok(())
    }

    pub fn final_radius(&self) -> f64 {
        *self.radii.last().expect("validated radii")
    }

    /// Lattice spacing of the first window.
    pub fn finest_cell(&self) -> f64 {
        2.0 * self.radii[0] / (self.lattice_per_axis - 1) as f64
    }

    /// Lattice points per axis used in dimension `n`.
    pub fn lattice_for_dim(&self, n: usize) -> usize {
        let cap = LATTICE_BUDGET.powf(1.0 / n as f64).floor() as usize;
        self.lattice_per_axis.min(cap.max(3))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveOutcome {
    Minimizers {
        points: Vec<Vec<f64>>,
        value: f64,
        value_unbounded_set: bool,
        /// Label of the connected piece of the near-optimal set each point belongs to.
        clusters: Vec<usize>,
    },
    Escaping { values_by_radius: Vec<f64> },
    InfeasibleWindow,
}

impl SolveOutcome {
    pub fn points(&self) -> &[Vec<f64>] {
        match self {
            SolveOutcome::Minimizers { points, .. } => points,
            _ => &[],
        }
    }

    pub fn clusters(&self) -> &[usize] {
        match self {
            SolveOutcome::Minimizers { clusters, .. } => clusters,
            _ => &[],
        }
    }

    pub fn in_domain(&self) -> bool {
        matches!(self, SolveOutcome::Minimizers { .. })
    }

    pub fn value_unbounded(&self) -> bool {
        matches!(
            self,
            SolveOutcome::Minimizers {
                value_unbounded_set: true,
                ..
            }
        )
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters().iter().max().map_or(0, |c| c + 1)
    }
}

#[derive(Debug, Clone)]
struct Cand {
    x: Vec<f64>,
    v: f64,
    /// Lattice spacing of the window the point was found in.
    cell: f64,
}

struct Ctx<'a> {
    problem: &'a VectorProblem,
    kind: ScalarizationKind,
    w: &'a Weight,
    sublevel: bool,
}

impl Ctx<'_> {
    fn value(&self, x: &[f64]) -> f64 {
        if self.sublevel && !matches!(self.problem.contains(x, 0.0), Ok(true)) {
            return f64::INFINITY;
        }
        match evaluate(self.problem, x) {
            Ok(f) => {
                let v = self.kind.combine(self.w, &f);
                if v.is_finite() {
                    v
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    }
}

fn band(best: f64, tol: f64) -> f64 {
    tol * best.abs().max(1.0)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn on_window_edge(x: &[f64], radius: f64, tol: f64) -> bool {
    x.iter().any(|v| radius - v.abs() <= tol * radius)
}

struct RadiusResult {
    best: Cand,
    near: Vec<Cand>,
    refined: Vec<Cand>,
}

fn pattern_directions(n: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; n];
            d[i] = s;
            dirs.push(d);
        }
    }
    if n <= 4 {
        for i in 0..n {
            for j in i + 1..n {
                for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let mut d = vec![0.0; n];
                    d[i] = si;
                    d[j] = sj;
                    dirs.push(d);
                }
            }
        }
    }
    dirs
}

fn refine(ctx: &Ctx, start: &Cand, bounds: &[(f64, f64)], h0: &[f64], dirs: &[Vec<f64>], steps: usize) -> Cand {
    let mut x = start.x.clone();
    let mut v = start.v;
    let mut h: Vec<f64> = h0.to_vec();
    let mut trial = vec![0.0; x.len()];
    for _ in 0..steps {
        for _ in 0..MOVES_PER_STEP {
            let mut best_v = v;
            let mut best_x: Option<Vec<f64>> = None;
            for d in dirs {
                for i in 0..x.len() {
                    trial[i] = (x[i] + d[i] * h[i]).clamp(bounds[i].0, bounds[i].1);
                }
                if trial == x {
                    continue;
                }
                let tv = ctx.value(&trial);
                if tv < best_v {
                    best_v = tv;
                    best_x = Some(trial.clone());
                }
            }
            match best_x {
                Some(bx) => {
                    x = bx;
                    v = best_v;
                }
                None => break,
            }
        }
        for (hi, xi) in h.iter_mut().zip(&x) {
            *hi *= 0.5;
            if *hi < 1e-15 * (1.0 + xi.abs()) {
                *hi = 0.0;
            }
        }
        if h.iter().all(|hi| *hi == 0.0) {
            break;
        }
    }
    Cand {
        x,
        v,
        cell: start.cell,
    }
}

fn solve_radius(
    ctx: &Ctx,
    cfg: &SolverConfig,
    radius: f64,
    warm: &[Cand],
) -> Option<RadiusResult> {
    let problem = ctx.problem;
    let n = problem.n;
    let bounds = problem.feasible.window_bounds(radius)?;
    let per_axis = cfg.lattice_for_dim(n);
    let axes: Vec<Vec<f64>> = bounds
        .iter()
        .map(|&(lo, hi)| lattice_axis(lo, hi, per_axis))
        .collect();
    let cell = 2.0 * radius / (per_axis - 1) as f64;
    let h0: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| {
            if hi > lo {
                (hi - lo) / (per_axis - 1) as f64
            } else {
                0.0
            }
        })
        .collect();
    let lattice = cartesian(&axes);
    let values: Vec<f64> = lattice.iter().map(|x| ctx.value(x)).collect();

    let mut cands: Vec<Cand> = Vec::new();
    let lens: Vec<usize> = axes.iter().map(Vec::len).collect();
    let mut local_min: Vec<usize> = Vec::new();
    for (idx, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            continue;
        }
        if is_lattice_local_min(idx, &values, &lens) {
            local_min.push(idx);
        }
    }
    local_min.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut seeds: Vec<Cand> = local_min
        .iter()
        .take(MAX_SEEDS)
        .map(|&i| Cand {
            x: lattice[i].clone(),
            v: values[i],
            cell,
        })
        .collect();
    let inside = |x: &[f64]| x.iter().zip(&bounds).all(|(v, (lo, hi))| lo <= v && v <= hi);
    for c in warm.iter().take(MAX_WARM) {
        if inside(&c.x) {
            seeds.push(Cand {
                x: c.x.clone(),
                v: c.v,
                cell: c.cell,
            });
        }
    }
    let witness = &problem.feasible.witness;
    if inside(witness) {
        let v = ctx.value(witness);
        if v.is_finite() {
            seeds.push(Cand {
                x: witness.clone(),
                v,
                cell,
            });
        }
    }
    if seeds.is_empty() {
        return None;
    }
    let dirs = pattern_directions(n);
    let refined: Vec<Cand> = seeds
        .iter()
        .map(|s| refine(ctx, s, &bounds, &h0, &dirs, cfg.refine_steps))
        .collect();
    let best = refined
        .iter()
        .min_by(|a, b| a.v.total_cmp(&b.v))
        .cloned()
        .expect("nonempty seeds");
    let near_band = band(best.v, cfg.near_opt_band);
    let lat_band = band(best.v, cfg.value_tol);
    cands.extend(refined.iter().filter(|c| c.v <= best.v + near_band).cloned());
    for (i, &v) in values.iter().enumerate() {
        if v <= best.v + lat_band {
            cands.push(Cand {
                x: lattice[i].clone(),
                v,
                cell,
            });
        }
    }
    Some(RadiusResult {
        best,
        near: cands,
        refined,
    })
}

fn is_lattice_local_min(idx: usize, values: &[f64], lens: &[usize]) -> bool {
    let v = values[idx];
    let mut stride = 1;
    let mut rem = idx;
    // lattice is row-major with the last axis fastest
    let mut coords = vec![0usize; lens.len()];
    for d in (0..lens.len()).rev() {
        coords[d] = rem % lens[d];
        rem /= lens[d];
    }
    for d in (0..lens.len()).rev() {
        if coords[d] > 0 && values[idx - stride] < v {
            return false;
        }
        if coords[d] + 1 < lens[d] && values[idx + stride] < v {
            return false;
        }
        stride *= lens[d];
    }
    true
}

/// Minimizes the chosen scalarization at `w` over K within `cfg.radii`.
pub fn minimize_scalar(
    problem: &VectorProblem,
    kind: ScalarizationKind,
    w: &Weight,
    cfg: &SolverConfig,
) -> Result<SolveOutcome> {
    cfg.validate()?;
    if w.m() != problem.m {
        return Err(Error::Dimension {
            expected: problem.m,
            got: w.m(),
        });
    }
    let ctx = Ctx {
        problem,
        kind,
        w,
        sublevel: matches!(problem.feasible.kind, FeasibleKind::Sublevel { .. }),
    };
    let mut per_radius: Vec<(f64, RadiusResult)> = Vec::new();
    let mut warm: Vec<Cand> = Vec::new();
    for &r in &cfg.radii {
        if let Some(res) = solve_radius(&ctx, cfg, r, &warm) {
            warm = vec![res.best.clone()];
            let mut rest = res.refined.clone();
            rest.sort_by(|a, b| a.v.total_cmp(&b.v));
            warm.extend(rest.into_iter().take(MAX_WARM - 1));
            per_radius.push((r, res));
        }
    }
    let final_r = cfg.final_radius();
    if per_radius.last().map(|(r, _)| *r) != Some(final_r) {
        return Ok(SolveOutcome::InfeasibleWindow);
    }
    let values: Vec<f64> = per_radius.iter().map(|(_, res)| res.best.v).collect();
    let hugs = per_radius
        .iter()
        .all(|(r, res)| on_window_edge(&res.best.x, *r, cfg.point_tol));
    let decreasing = values.windows(2).all(|p| {
        let need = (cfg.escape_decrease_min * p[0].abs().max(p[1].abs())).max(cfg.value_tol);
        p[0] - p[1] >= need
    });
    if per_radius.len() >= 2 && hugs && decreasing {
        return Ok(SolveOutcome::Escaping {
            values_by_radius: values,
        });
    }

    let best_v = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let keep = best_v + band(best_v, cfg.near_opt_band);
    let mut all: Vec<Cand> = per_radius
        .iter()
        .flat_map(|(_, res)| res.near.iter().filter(|c| c.v <= keep).cloned())
        .collect();
    all.sort_by(|a, b| a.v.total_cmp(&b.v).then_with(|| lex(&a.x, &b.x)));
    let mut kept = dedup(all, cfg.point_tol);
    if kept.len() > cfg.max_points_per_weight {
        kept = farthest_first(kept, cfg.max_points_per_weight);
    }
    let best_point = per_radius
        .iter()
        .map(|(_, res)| &res.best)
        .min_by(|a, b| a.v.total_cmp(&b.v))
        .expect("nonempty");
    let edge_hit = kept
        .iter()
        .any(|c| on_window_edge(&c.x, final_r, cfg.point_tol));
    let interior_best = !on_window_edge(&best_point.x, final_r, cfg.point_tol)
        || kept.iter().any(|c| !on_window_edge(&c.x, final_r, cfg.point_tol));
    let value_unbounded_set = edge_hit && interior_best;

    kept.sort_by(|a, b| lex(&a.x, &b.x));
    let clusters = cluster_labels(&ctx, &kept, best_v, cfg);
    Ok(SolveOutcome::Minimizers {
        points: kept.into_iter().map(|c| c.x).collect(),
        value: best_v,
        value_unbounded_set,
        clusters,
    })
}

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Uniform grid hash for radius queries.
pub(crate) struct SpatialHash {
    cell: f64,
    map: HashMap<Vec<i64>, Vec<usize>>,
}

impl SpatialHash {
    pub(crate) fn new(cell: f64) -> Self {
        SpatialHash {
            cell,
            map: HashMap::new(),
        }
    }

    fn key(&self, x: &[f64]) -> Vec<i64> {
        x.iter().map(|v| (v / self.cell).floor() as i64).collect()
    }

    pub(crate) fn insert(&mut self, x: &[f64], id: usize) {
        let k = self.key(x);
        self.map.entry(k).or_default().push(id);
    }

    /// Ids in cells adjacent to `x`; callers filter by exact distance.
    /// Covers every point within `cell` of `x`.
    pub(crate) fn near(&self, x: &[f64], out: &mut Vec<usize>) {
        out.clear();
        let base = self.key(x);
        let n = base.len();
        let mut offset = vec![-1i64; n];
        loop {
            let k: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(ids) = self.map.get(&k) {
                out.extend_from_slice(ids);
            }
            let mut d = 0;
            loop {
                if d == n {
                    return;
                }
                offset[d] += 1;
                if offset[d] <= 1 {
                    break;
                }
                offset[d] = -1;
                d += 1;
            }
        }
    }
}

/// Greedy retention in the given order; a point is dropped when a kept point
/// lies within `eps * (1 + |x|_inf)`.
fn dedup(cands: Vec<Cand>, eps: f64) -> Vec<Cand> {
    let max_norm = cands.iter().map(|c| norm_inf(&c.x)).fold(0.0, f64::max);
    let cell = eps * (1.0 + max_norm);
    let mut hash = SpatialHash::new(cell);
    let mut kept: Vec<Cand> = Vec::new();
    let mut buf = Vec::new();
    for c in cands {
        let thr = eps * (1.0 + norm_inf(&c.x));
        hash.near(&c.x, &mut buf);
        if buf.iter().any(|&i| dist(&kept[i].x, &c.x) <= thr) {
            continue;
        }
        hash.insert(&c.x, kept.len());
        kept.push(c);
    }
    kept
}

fn farthest_first(cands: Vec<Cand>, k: usize) -> Vec<Cand> {
    let mut chosen = vec![0usize];
    let mut dmin: Vec<f64> = cands.iter().map(|c| dist(&c.x, &cands[0].x)).collect();
    while chosen.len() < k {
        let (far, d) = dmin
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        if d <= 0.0 {
            break;
        }
        chosen.push(far);
        for (i, c) in cands.iter().enumerate() {
            dmin[i] = dmin[i].min(dist(&c.x, &cands[far].x));
        }
    }
    chosen.sort_unstable();
    chosen.into_iter().map(|i| cands[i].clone()).collect()
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    /// Dense labels in order of first appearance.
    pub(crate) fn labels(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut map = HashMap::new();
        (0..n)
            .map(|i| {
                let r = self.find(i);
                let next = map.len();
                *map.entry(r).or_insert(next)
            })
            .collect()
    }
}

const SEGMENT_SAMPLES: [f64; 5] = [1.0 / 6.0, 2.0 / 6.0, 0.5, 4.0 / 6.0, 5.0 / 6.0];

/// Nearby minimizers share a label when the value along the segment between
/// them never rises above both ends by more than `value_tol`.
fn cluster_labels(ctx: &Ctx, pts: &[Cand], best: f64, cfg: &SolverConfig) -> Vec<usize> {
    let n = ctx.problem.n;
    let slack = band(best, cfg.value_tol);
    let mut uf = UnionFind::new(pts.len());
    let mut cells: Vec<f64> = pts.iter().map(|c| c.cell).collect();
    cells.sort_by(f64::total_cmp);
    cells.dedup();
    let reach = 1.5 * (n as f64).sqrt();
    let mut buf = Vec::new();
    for &cell in &cells {
        let r = reach * cell;
        let mut hash = SpatialHash::new(r);
        for (i, c) in pts.iter().enumerate() {
            if c.cell == cell {
                hash.insert(&c.x, i);
            }
        }
        for (i, p) in pts.iter().enumerate() {
            if p.cell > cell {
                continue;
            }
            hash.near(&p.x, &mut buf);
            for &j in &buf {
                if j == i || dist(&p.x, &pts[j].x) > r || uf.find(i) == uf.find(j) {
                    continue;
                }
                let q = &pts[j].x;
                let keep = p.v.max(pts[j].v) + slack;
                let ok = SEGMENT_SAMPLES.iter().all(|&t| {
                    let z: Vec<f64> = p.x.iter().zip(q).map(|(a, b)| a + t * (b - a)).collect();
                    let feasible = match ctx.problem.feasible.kind {
                        FeasibleKind::Box { .. } | FeasibleKind::WholeSpace => true,
                        FeasibleKind::Sublevel { .. } => {
                            matches!(ctx.problem.contains(&z, 1e-9), Ok(true))
                        }
                    };
                    feasible && ctx.value(&z) <= keep
                });
                if ok {
                    uf.union(i, j);
                }
            }
        }
    }
    uf.labels()
}

/// Pattern descent from `x0` at weight `w` inside the final window, starting
/// with step `h0` on every axis. `None` when `x0` has no finite value.
pub fn local_descent(
    problem: &VectorProblem,
    kind: ScalarizationKind,
    w: &Weight,
    x0: &[f64],
    h0: f64,
    cfg: &SolverConfig,
) -> Option<(Vec<f64>, f64)> {
    let ctx = Ctx {
        problem,
        kind,
        w,
        sublevel: matches!(problem.feasible.kind, FeasibleKind::Sublevel { .. }),
    };
    let bounds = problem.feasible.window_bounds(cfg.final_radius())?;
    let x: Vec<f64> = x0
        .iter()
        .zip(&bounds)
        .map(|(v, (lo, hi))| v.clamp(*lo, *hi))
        .collect();
    let v = ctx.value(&x);
    if !v.is_finite() {
        return None;
    }
    let start = Cand { x, v, cell: h0 };
    let dirs = pattern_directions(problem.n);
    let h: Vec<f64> = vec![h0; problem.n];
    let end = refine(&ctx, &start, &bounds, &h, &dirs, cfg.refine_steps);
    Some((end.x, end.v))
}

/// Near-optimal slack used for a reported optimal value.
pub fn value_band(value: f64, cfg: &SolverConfig) -> f64 {
    band(value, cfg.near_opt_band)
}

/// Solves every weight, in input order.
pub fn solve_grid(
    problem: &VectorProblem,
    kind: ScalarizationKind,
    weights: &[Weight],
    cfg: &SolverConfig,
) -> Result<GraphSample> {
    if weights.is_empty() {
        return Err(Error::Precondition("solve_grid needs at least one weight".into()));
    }
    cfg.validate()?;
    let outcomes: Vec<SolveOutcome> = weights
        .par_iter()
        .map(|w| minimize_scalar(problem, kind, w, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(GraphSample {
        problem_name: problem.name.clone(),
        kind,
        resolution: infer_resolution(weights),
        cfg: cfg.clone(),
        entries: weights
            .iter()
            .cloned()
            .zip(outcomes)
            .map(|(weight, outcome)| GraphEntry { weight, outcome })
            .collect(),
    })
}

/// Solves over `simplex_grid(m, resolution)`.
pub fn solve_simplex(
    problem: &VectorProblem,
    kind: ScalarizationKind,
    resolution: usize,
    cfg: &SolverConfig,
) -> Result<GraphSample> {
    let mut g = solve_grid(problem, kind, &simplex_grid(problem.m, resolution), cfg)?;
    g.resolution = resolution;
    Ok(g)
}

/// Smallest N making every coordinate a multiple of 1/N.
fn infer_resolution(weights: &[Weight]) -> usize {
    (1..=10_000)
        .find(|&n| {
            weights.iter().all(|w| {
                w.coords
                    .iter()
                    .all(|c| ((c * n as f64) - (c * n as f64).round()).abs() < 1e-9)
            })
        })
        .unwrap_or(0)
}
