//! Sampled graphs of solution mappings: images, inverse images, components,
//! boundedness and domain verdicts.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{oracle_eval, OracleValue, VectorProblem};
use crate::scalarize::{simplex_grid, ScalarizationKind, Weight};
use crate::solver::{
    local_descent, minimize_scalar, value_band, SolveOutcome, SolverConfig, SpatialHash, UnionFind,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEntry {
    pub weight: Weight,
    pub outcome: SolveOutcome,
}

/// Sampled graph of one solution mapping over a simplex grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSample {
    pub problem_name: String,
    pub kind: ScalarizationKind,
    pub resolution: usize,
    pub cfg: SolverConfig,
    pub entries: Vec<GraphEntry>,
}

impl GraphSample {
    pub fn final_radius(&self) -> f64 {
        self.cfg.final_radius()
    }

    pub fn dom_indices(&self) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&i| self.entries[i].outcome.in_domain())
            .collect()
    }
}

/// A point of the image together with where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageRef {
    pub entry: usize,
    pub point: usize,
}

/// All minimizer points with their source weights, in entry order.
pub fn image_points(g: &GraphSample) -> Vec<(Vec<f64>, Weight)> {
    image_refs(g)
        .into_iter()
        .map(|r| (point_of(g, r).to_vec(), g.entries[r.entry].weight.clone()))
        .collect()
}

pub fn image_refs(g: &GraphSample) -> Vec<ImageRef> {
    let mut out = Vec::new();
    for (entry, e) in g.entries.iter().enumerate() {
        for point in 0..e.outcome.points().len() {
            out.push(ImageRef { entry, point });
        }
    }
    out
}

fn point_of(g: &GraphSample, r: ImageRef) -> &[f64] {
    &g.entries[r.entry].outcome.points()[r.point]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub id: usize,
    /// Indices into the image point list.
    pub members: Vec<usize>,
    pub min_point: Vec<f64>,
    pub max_norm: f64,
    /// Largest norm reached by verified approach continuation from this component.
    pub extension_norm: f64,
    pub bounded_at_scale: bool,
    pub inverse_weights: Vec<Weight>,
    pub inverse_closed_at_resolution: bool,
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn link_eps(uf: &mut UnionFind, points: &[&[f64]], eps: f64) {
    if points.is_empty() {
        return;
    }
    let mut hash = SpatialHash::new(eps);
    for (i, p) in points.iter().enumerate() {
        hash.insert(p, i);
    }
    let mut buf = Vec::new();
    for (i, p) in points.iter().enumerate() {
        hash.near(p, &mut buf);
        for &j in &buf {
            if j > i && uf.find(i) != uf.find(j) && dist(p, points[j]) <= eps {
                uf.union(i, j);
            }
        }
    }
}

fn components_from_labels(points: &[&[f64]], labels: &[usize]) -> Vec<Component> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    let mut comps: Vec<Component> = groups
        .into_values()
        .map(|members| {
            let min_point = members
                .iter()
                .map(|&i| points[i])
                .min_by(|a, b| lex(a, b))
                .expect("nonempty group")
                .to_vec();
            let max_norm = members.iter().map(|&i| norm_inf(points[i])).fold(0.0, f64::max);
            Component {
                id: 0,
                members,
                min_point,
                max_norm,
                extension_norm: 0.0,
                bounded_at_scale: true,
                inverse_weights: Vec::new(),
                inverse_closed_at_resolution: true,
            }
        })
        .collect();
    comps.sort_by(|a, b| {
        b.members
            .len()
            .cmp(&a.members.len())
            .then_with(|| lex(&a.min_point, &b.min_point))
    });
    for (id, c) in comps.iter_mut().enumerate() {
        c.id = id;
    }
    comps
}

/// Components of the graph linking points at Euclidean distance `<= eps_link`.
pub fn connected_components(points: &[Vec<f64>], eps_link: f64) -> Vec<Component> {
    let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();
    let mut uf = UnionFind::new(refs.len());
    link_eps(&mut uf, &refs, eps_link);
    components_from_labels(&refs, &uf.labels())
}

/// Local access to the solution mapping between grid weights.
pub trait Continuation: Sync {
    /// Full solution at `w`.
    fn solve(&self, w: &Weight) -> Result<SolveOutcome>;
    /// A solution near `from` at `w`, if one exists.
    fn step(&self, w: &Weight, from: &[f64], max_move: f64) -> Option<Vec<f64>>;
    /// Whether `x` belongs to the solution set described by `outcome` at `w`.
    fn accepts(&self, w: &Weight, x: &[f64], outcome: &SolveOutcome) -> bool;
}

pub struct SolverContinuation<'a> {
    pub problem: &'a VectorProblem,
    pub kind: ScalarizationKind,
    pub cfg: &'a SolverConfig,
}

impl Continuation for SolverContinuation<'_> {
    fn solve(&self, w: &Weight) -> Result<SolveOutcome> {
        minimize_scalar(self.problem, self.kind, w, self.cfg)
    }

    fn step(&self, w: &Weight, from: &[f64], max_move: f64) -> Option<Vec<f64>> {
        local_descent(self.problem, self.kind, w, from, max_move / 4.0, self.cfg).map(|(x, _)| x)
    }

    fn accepts(&self, w: &Weight, x: &[f64], outcome: &SolveOutcome) -> bool {
        let SolveOutcome::Minimizers { value, .. } = outcome else {
            return false;
        };
        match self.kind.eval(self.problem, w, x) {
            Ok(v) => v <= value + value_band(*value, self.cfg),
            Err(_) => false,
        }
    }
}

pub struct OracleContinuation<'a> {
    pub problem: &'a VectorProblem,
    pub radius: f64,
}

impl Continuation for OracleContinuation<'_> {
    fn solve(&self, w: &Weight) -> Result<SolveOutcome> {
        oracle_outcome(self.problem, w, self.radius)
    }

    fn step(&self, w: &Weight, from: &[f64], _max_move: f64) -> Option<Vec<f64>> {
        let v = oracle_eval(self.problem, w, self.radius).ok()?;
        v.points()
            .iter()
            .min_by(|a, b| dist(a, from).total_cmp(&dist(b, from)))
            .cloned()
    }

    fn accepts(&self, _w: &Weight, _x: &[f64], outcome: &SolveOutcome) -> bool {
        outcome.in_domain()
    }
}

/// Oracle value at `w` expressed as a solver outcome; weights outside the
/// printed domain become `Escaping` with no recorded values.
pub fn oracle_outcome(problem: &VectorProblem, w: &Weight, radius: f64) -> Result<SolveOutcome> {
    let oracle = problem
        .oracle
        .as_ref()
        .ok_or_else(|| Error::NoOracle(problem.name.clone()))?;
    Ok(match oracle_eval(problem, w, radius)? {
        OracleValue::Empty => SolveOutcome::Escaping {
            values_by_radius: Vec::new(),
        },
        OracleValue::Set {
            points,
            clusters,
            value_unbounded,
        } => {
            let value = points
                .iter()
                .filter_map(|x| oracle.kind.eval(problem, w, x).ok())
                .fold(f64::INFINITY, f64::min);
            SolveOutcome::Minimizers {
                points,
                value: if value.is_finite() { value } else { 0.0 },
                value_unbounded_set: value_unbounded,
                clusters,
            }
        }
    })
}

/// Graph sample built from the closed-form map instead of the solver.
pub fn oracle_graph(
    problem: &VectorProblem,
    resolution: usize,
    cfg: &SolverConfig,
) -> Result<GraphSample> {
    let oracle = problem
        .oracle
        .as_ref()
        .ok_or_else(|| Error::NoOracle(problem.name.clone()))?;
    let r = cfg.final_radius();
    let entries = simplex_grid(problem.m, resolution)
        .into_iter()
        .map(|weight| {
            let outcome = oracle_outcome(problem, &weight, r)?;
            Ok(GraphEntry { weight, outcome })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GraphSample {
        problem_name: problem.name.clone(),
        kind: oracle.kind,
        resolution,
        cfg: cfg.clone(),
        entries,
    })
}

fn lerp_weight(a: &Weight, b: &Weight, t: f64) -> Weight {
    let mut coords: Vec<f64> = a
        .coords
        .iter()
        .zip(&b.coords)
        .map(|(x, y)| (x + t * (y - x)).max(0.0))
        .collect();
    let s: f64 = coords.iter().sum();
    coords.iter_mut().for_each(|c| *c /= s);
    Weight {
        is_interior: coords.iter().all(|&c| c > crate::scalarize::INTERIOR_EPS),
        coords,
    }
}

const MIN_DT: f64 = 1.0 / (1u64 << 30) as f64;
const MAX_TRACK_STEPS: usize = 20_000;

struct Track {
    x: Vec<f64>,
    weight: Weight,
    reached_end: bool,
}

/// Follows a solution from `(wa, xa)` toward `wb` in moves of at most `max_move`.
/// Stops early once `stop_norm` is reached or the path leaves `limit_norm`.
fn track(
    cont: &dyn Continuation,
    wa: &Weight,
    xa: &[f64],
    wb: &Weight,
    max_move: f64,
    stop_norm: Option<f64>,
    limit_norm: f64,
) -> Option<Track> {
    let mut t = 0.0;
    let mut dt = 1.0f64;
    let mut x = xa.to_vec();
    let mut steps = 0;
    while t < 1.0 {
        steps += 1;
        if steps > MAX_TRACK_STEPS {
            return None;
        }
        let t_try = (t + dt).min(1.0);
        let w = lerp_weight(wa, wb, t_try);
        match cont.step(&w, &x, max_move) {
            Some(nx) if dist(&nx, &x) <= max_move => {
                t = t_try;
                x = nx;
                dt = (dt * 2.0).min(1.0);
                if norm_inf(&x) > limit_norm {
                    return None;
                }
                if stop_norm.is_some_and(|s| norm_inf(&x) >= s) {
                    return Some(Track {
                        x,
                        weight: w,
                        reached_end: t >= 1.0,
                    });
                }
            }
            _ => {
                dt *= 0.5;
                if dt < MIN_DT {
                    return None;
                }
            }
        }
    }
    Some(Track {
        x,
        weight: wb.clone(),
        reached_end: true,
    })
}

/// One representative point index per per-weight cluster.
fn cluster_reps(o: &SolveOutcome) -> Vec<(usize, usize)> {
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &c) in o.clusters().iter().enumerate() {
        seen.entry(c).or_insert(i);
    }
    seen.into_iter().collect()
}

/// Pairs `(point in a, point in b)` joined by verified continuation.
fn link_pair(
    cont: &dyn Continuation,
    a: &GraphEntry,
    b: &GraphEntry,
    eps: f64,
    limit_norm: f64,
) -> Vec<(usize, usize)> {
    let mut links = Vec::new();
    for (from, to, flip) in [(a, b, false), (b, a, true)] {
        let pts_to = to.outcome.points();
        for (_, rep) in cluster_reps(&from.outcome) {
            let x0 = &from.outcome.points()[rep];
            let Some(tr) = track(cont, &from.weight, x0, &to.weight, eps, None, limit_norm) else {
                continue;
            };
            if !tr.reached_end || !cont.accepts(&to.weight, &tr.x, &to.outcome) {
                continue;
            }
            let hit = pts_to
                .iter()
                .enumerate()
                .map(|(j, q)| (j, dist(q, &tr.x)))
                .filter(|(_, d)| *d <= eps)
                .min_by(|p, q| p.1.total_cmp(&q.1));
            if let Some((j, _)) = hit {
                links.push(if flip { (j, rep) } else { (rep, j) });
            }
        }
    }
    links
}

/// Grid neighbours (one lattice move on the simplex) of every entry.
pub fn grid_neighbors(g: &GraphSample) -> Vec<Vec<usize>> {
    let n = g.resolution;
    let index: HashMap<Vec<i64>, usize> = g
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.weight.grid_index(n), i))
        .collect();
    g.entries
        .iter()
        .map(|e| {
            let k = e.weight.grid_index(n);
            let m = k.len();
            let mut out = Vec::new();
            for i in 0..m {
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    let mut q = k.clone();
                    q[i] += 1;
                    q[j] -= 1;
                    if let Some(&idx) = index.get(&q) {
                        out.push(idx);
                    }
                }
            }
            out.sort_unstable();
            out
        })
        .collect()
}

/// Parameters of the component analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentOptions {
    pub eps_link: f64,
    pub rho: f64,
}

impl ComponentOptions {
    /// Four lattice cells of the first window, and half the final window.
    pub fn defaults_for(cfg: &SolverConfig) -> Self {
        ComponentOptions {
            eps_link: 4.0 * cfg.finest_cell(),
            rho: 0.5,
        }
    }
}

/// Components of the sampled image. Points are joined when they share a
/// per-weight cluster, lie within `eps_link`, or are joined by continuation
/// between grid-adjacent weights.
pub fn components(g: &GraphSample, cont: &dyn Continuation, eps_link: f64) -> Vec<Component> {
    let refs = image_refs(g);
    let pts: Vec<&[f64]> = refs.iter().map(|&r| point_of(g, r)).collect();
    let mut uf = UnionFind::new(pts.len());
    let mut offset = vec![0usize; g.entries.len()];
    let mut acc = 0;
    for (i, e) in g.entries.iter().enumerate() {
        offset[i] = acc;
        acc += e.outcome.points().len();
    }
    for (i, e) in g.entries.iter().enumerate() {
        let mut first: HashMap<usize, usize> = HashMap::new();
        for (p, &c) in e.outcome.clusters().iter().enumerate() {
            let id = offset[i] + p;
            match first.get(&c) {
                Some(&f) => {
                    uf.union(f, id);
                }
                None => {
                    first.insert(c, id);
                }
            }
        }
    }
    link_eps(&mut uf, &pts, eps_link);

    let nbrs = grid_neighbors(g);
    let pairs: Vec<(usize, usize)> = nbrs
        .iter()
        .enumerate()
        .flat_map(|(i, ns)| ns.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
        .filter(|&(i, j)| g.entries[i].outcome.in_domain() && g.entries[j].outcome.in_domain())
        .collect();
    let limit = 2.0 * g.final_radius();
    let links: Vec<Vec<(usize, usize, usize, usize)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            link_pair(cont, &g.entries[i], &g.entries[j], eps_link, limit)
                .into_iter()
                .map(|(p, q)| (i, p, j, q))
                .collect()
        })
        .collect();
    for (i, p, j, q) in links.into_iter().flatten() {
        uf.union(offset[i] + p, offset[j] + q);
    }
    let mut comps = components_from_labels(&pts, &uf.labels());
    for c in &mut comps {
        c.inverse_weights = inverse_image(g, c).unwrap_or_default();
    }
    comps
}

/// Grid weights contributing at least one point to `comp`, in grid order.
pub fn inverse_image(g: &GraphSample, comp: &Component) -> Result<Vec<Weight>> {
    let refs = image_refs(g);
    let mut hit = vec![false; g.entries.len()];
    for &m in &comp.members {
        let r = refs.get(m).ok_or_else(|| {
            Error::Precondition(format!("component member {m} is not an image point of this graph"))
        })?;
        hit[r.entry] = true;
    }
    Ok(g
        .entries
        .iter()
        .zip(hit)
        .filter(|(_, h)| *h)
        .map(|(e, _)| e.weight.clone())
        .collect())
}

fn entry_indices_of(g: &GraphSample, comp: &Component) -> Vec<usize> {
    let refs = image_refs(g);
    let mut idx: Vec<usize> = comp.members.iter().filter_map(|&m| refs.get(m).map(|r| r.entry)).collect();
    idx.sort_unstable();
    idx.dedup();
    idx
}

/// `false` when the component reaches `rho * R_final` or contains a weight
/// whose solution set is itself unbounded.
pub fn classify_boundedness(g: &GraphSample, comp: &Component, rho: f64) -> bool {
    let scale = rho * g.final_radius();
    let refs = image_refs(g);
    let far = comp
        .members
        .iter()
        .filter_map(|&m| refs.get(m))
        .any(|&r| norm_inf(point_of(g, r)) >= scale);
    let flagged = entry_indices_of(g, comp)
        .into_iter()
        .any(|i| g.entries[i].outcome.value_unbounded());
    !(far || flagged || comp.extension_norm >= scale)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DomainVerdict {
    ClosedAtResolution,
    NonClosedAtResolution { witnesses: Vec<Weight> },
}

impl DomainVerdict {
    pub fn is_closed(&self) -> bool {
        matches!(self, DomainVerdict::ClosedAtResolution)
    }
}

fn entry_norm(e: &GraphEntry) -> f64 {
    e.outcome.points().iter().map(|p| norm_inf(p)).fold(0.0, f64::max)
}

/// Witness entries: weights outside the domain approached along a grid line
/// by bounded-value domain weights whose solution norms grow toward them.
fn nonclosed_witnesses(g: &GraphSample) -> Vec<(usize, Vec<usize>)> {
    let n = g.resolution;
    let index: HashMap<Vec<i64>, usize> = g
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.weight.grid_index(n), i))
        .collect();
    let nbrs = grid_neighbors(g);
    let good = |i: usize| {
        let o = &g.entries[i].outcome;
        o.in_domain() && !o.value_unbounded() && !o.points().is_empty()
    };
    let mut out = Vec::new();
    for (w, e) in g.entries.iter().enumerate() {
        if e.outcome.in_domain() {
            continue;
        }
        let kw = e.weight.grid_index(n);
        let mut approach = Vec::new();
        for &d1 in &nbrs[w] {
            if !good(d1) {
                continue;
            }
            let k1 = g.entries[d1].weight.grid_index(n);
            let step: Vec<i64> = k1.iter().zip(&kw).map(|(a, b)| a - b).collect();
            let at = |j: i64| -> Option<usize> {
                let k: Vec<i64> = kw.iter().zip(&step).map(|(b, s)| b + j * s).collect();
                index.get(&k).copied().filter(|&i| good(i))
            };
            let Some(d2) = at(2) else { continue };
            let (n1, n2) = (entry_norm(&g.entries[d1]), entry_norm(&g.entries[d2]));
            if n1 <= n2 {
                continue;
            }
            if let Some(d3) = at(3) {
                let n3 = entry_norm(&g.entries[d3]);
                if n1 - n2 < n2 - n3 {
                    continue;
                }
            }
            approach.push(d1);
        }
        if !approach.is_empty() {
            out.push((w, approach));
        }
    }
    out
}

pub fn domain_closedness(g: &GraphSample) -> DomainVerdict {
    let w = nonclosed_witnesses(g);
    if w.is_empty() {
        DomainVerdict::ClosedAtResolution
    } else {
        DomainVerdict::NonClosedAtResolution {
            witnesses: w.into_iter().map(|(i, _)| g.entries[i].weight.clone()).collect(),
        }
    }
}

/// Domain weights whose solution set is bounded.
pub fn bounded_value_weights(g: &GraphSample) -> Vec<Weight> {
    g.entries
        .iter()
        .filter(|e| e.outcome.in_domain() && !e.outcome.value_unbounded())
        .map(|e| e.weight.clone())
        .collect()
}

/// Number of connected runs of domain weights in the grid adjacency.
pub fn domain_components(g: &GraphSample) -> usize {
    let nbrs = grid_neighbors(g);
    let mut uf = UnionFind::new(g.entries.len());
    for (i, ns) in nbrs.iter().enumerate() {
        for &j in ns {
            if g.entries[i].outcome.in_domain() && g.entries[j].outcome.in_domain() {
                uf.union(i, j);
            }
        }
    }
    let mut roots: Vec<usize> = g.dom_indices().into_iter().map(|i| uf.find(i)).collect();
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Continues each branch from the domain weights next to a non-closedness
/// witness toward it, recording the largest verified norm per image point.
fn approach_extensions(
    g: &GraphSample,
    cont: &dyn Continuation,
    eps: f64,
    target: f64,
) -> Vec<(usize, usize, f64)> {
    let jobs: Vec<(usize, usize, usize)> = nonclosed_witnesses(g)
        .into_iter()
        .flat_map(|(w, ds)| {
            ds.into_iter().flat_map(move |d| {
                cluster_reps(&g.entries[d].outcome)
                    .into_iter()
                    .map(move |(_, p)| (w, d, p))
            })
        })
        .collect();
    let limit = 2.0 * g.final_radius();
    jobs.par_iter()
        .filter_map(|&(w, d, p)| {
            let from = &g.entries[d];
            let x0 = &from.outcome.points()[p];
            let tr = track(cont, &from.weight, x0, &g.entries[w].weight, eps, Some(target), limit)?;
            let reached = norm_inf(&tr.x);
            if reached < target {
                return None;
            }
            let full = cont.solve(&tr.weight).ok()?;
            let tol = eps.max(5e-3 * (1.0 + reached));
            let confirmed = cont.accepts(&tr.weight, &tr.x, &full)
                && full.points().iter().any(|q| dist(q, &tr.x) <= tol);
            confirmed.then_some((d, p, reached))
        })
        .collect()
}

/// Largest `C` with `shift <= C / N` between adjacent bounded-value domain
/// weights inside one component.
pub fn closed_graph_constant(g: &GraphSample, comps: &[Component]) -> f64 {
    let refs = image_refs(g);
    let mut comp_of = vec![usize::MAX; refs.len()];
    for c in comps {
        for &m in &c.members {
            comp_of[m] = c.id;
        }
    }
    let mut by_entry: Vec<Vec<(usize, &[f64])>> = vec![Vec::new(); g.entries.len()];
    for (k, r) in refs.iter().enumerate() {
        by_entry[r.entry].push((comp_of[k], point_of(g, *r)));
    }
    let nbrs = grid_neighbors(g);
    let ok = |i: usize| g.entries[i].outcome.in_domain() && !g.entries[i].outcome.value_unbounded();
    let mut worst: f64 = 0.0;
    for (i, ns) in nbrs.iter().enumerate() {
        if !ok(i) {
            continue;
        }
        for &j in ns.iter().filter(|&&j| j > i && ok(j)) {
            for &(ci, p) in &by_entry[i] {
                let best = by_entry[j]
                    .iter()
                    .filter(|(cj, _)| *cj == ci)
                    .map(|(_, q)| dist(p, q))
                    .fold(f64::INFINITY, f64::min);
                if best.is_finite() {
                    worst = worst.max(best * g.resolution as f64);
                }
            }
        }
    }
    worst
}

/// Everything the diagnostics read from one graph sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingAnalysis {
    pub kind: ScalarizationKind,
    pub source: AnalysisSource,
    pub resolution: usize,
    pub options: ComponentOptions,
    pub dom_weights: usize,
    pub grid_weights: usize,
    pub domain: DomainVerdict,
    pub domain_components: usize,
    pub bounded_value_weights: Vec<Weight>,
    pub components: Vec<Component>,
    /// Every domain weight has exactly one solution cluster.
    pub single_valued: bool,
    /// Every domain weight has a single solution cluster of small diameter.
    pub values_connected: bool,
    pub closed_graph_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisSource {
    Solver,
    Oracle,
}

impl MappingAnalysis {
    pub fn unbounded_components(&self) -> usize {
        self.components.iter().filter(|c| !c.bounded_at_scale).count()
    }
}

/// Diameter below which a single cluster counts as one solution.
const SINGLE_POINT_DIAMETER: f64 = 1e-3;

fn cluster_diameter(o: &SolveOutcome) -> f64 {
    let pts = o.points();
    let mut lo = vec![f64::INFINITY; pts.first().map_or(0, Vec::len)];
    let mut hi = vec![f64::NEG_INFINITY; lo.len()];
    for p in pts {
        for (k, v) in p.iter().enumerate() {
            lo[k] = lo[k].min(*v);
            hi[k] = hi[k].max(*v);
        }
    }
    lo.iter().zip(&hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt()
}

pub fn analyze_graph(
    g: &GraphSample,
    cont: &dyn Continuation,
    source: AnalysisSource,
    options: ComponentOptions,
) -> MappingAnalysis {
    let mut comps = components(g, cont, options.eps_link);
    let target = options.rho * g.final_radius();
    let ext = approach_extensions(g, cont, options.eps_link, target);
    if !ext.is_empty() {
        let refs = image_refs(g);
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for c in &comps {
            for &m in &c.members {
                owner.insert((refs[m].entry, refs[m].point), c.id);
            }
        }
        for (d, p, norm) in ext {
            if let Some(&cid) = owner.get(&(d, p)) {
                let c = &mut comps[cid];
                c.extension_norm = c.extension_norm.max(norm);
            }
        }
    }
    let witnesses = nonclosed_witnesses(g);
    let nbrs = grid_neighbors(g);
    for c in comps.iter_mut() {
        c.bounded_at_scale = classify_boundedness(g, c, options.rho);
        let entries = entry_indices_of(g, c);
        c.inverse_closed_at_resolution = !witnesses
            .iter()
            .any(|(w, _)| nbrs[*w].iter().any(|d| entries.binary_search(d).is_ok()));
    }
    let dom: Vec<&GraphEntry> = g.entries.iter().filter(|e| e.outcome.in_domain()).collect();
    let single_valued = dom
        .iter()
        .all(|e| e.outcome.cluster_count() == 1 && cluster_diameter(&e.outcome) <= SINGLE_POINT_DIAMETER);
    let values_connected = dom.iter().all(|e| e.outcome.cluster_count() <= 1);
    MappingAnalysis {
        kind: g.kind,
        source,
        resolution: g.resolution,
        options,
        dom_weights: dom.len(),
        grid_weights: g.entries.len(),
        domain: domain_closedness(g),
        domain_components: domain_components(g),
        bounded_value_weights: bounded_value_weights(g),
        closed_graph_constant: closed_graph_constant(g, &comps),
        components: comps,
        single_valued,
        values_connected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::builtin;
    use crate::solver::solve_simplex;
    use proptest::prelude::*;

    fn synthetic(outcomes: Vec<SolveOutcome>) -> GraphSample {
        let n = outcomes.len() - 1;
        GraphSample {
            problem_name: "synthetic".into(),
            kind: ScalarizationKind::WeightedSum,
            resolution: n,
            cfg: SolverConfig::default(),
            entries: simplex_grid(2, n)
                .into_iter()
                .zip(outcomes)
                .map(|(weight, outcome)| GraphEntry { weight, outcome })
                .collect(),
        }
    }

    fn mins(points: Vec<Vec<f64>>) -> SolveOutcome {
        let clusters = (0..points.len()).collect();
        SolveOutcome::Minimizers {
            points,
            value: 0.0,
            value_unbounded_set: false,
            clusters,
        }
    }

    fn esc() -> SolveOutcome {
        SolveOutcome::Escaping {
            values_by_radius: vec![-1.0, -2.0],
        }
    }

    #[test]
    fn image_of_escaping_graph_is_empty() {
        let g = synthetic(vec![esc(), esc(), esc()]);
        assert!(image_points(&g).is_empty());
        assert!(bounded_value_weights(&g).is_empty());
        assert_eq!(domain_components(&g), 0);
        assert!(domain_closedness(&g).is_closed());
        assert!(connected_components(&[], 1.0).is_empty());
    }

    #[test]
    fn connected_components_examples() {
        assert_eq!(connected_components(&[vec![3.0, 4.0]], 0.1).len(), 1);
        let pts = vec![
            vec![0.0, 0.0],
            vec![5.0, 0.0],
            vec![0.05, 0.0],
            vec![0.1, 0.0],
        ];
        let c = connected_components(&pts, 0.06);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].members, vec![0, 2, 3]);
        assert_eq!(c[1].min_point, vec![5.0, 0.0]);
    }

    #[test]
    fn quartic_oracle_image_has_two_components() {
        let q = builtin("nonconvex_quartic").unwrap();
        let cfg = SolverConfig::default();
        let g = oracle_graph(&q, 32, &cfg).unwrap();
        let pts: Vec<Vec<f64>> = image_points(&g).into_iter().map(|(x, _)| x).collect();
        assert_eq!(pts.len(), 62);
        let eps = ComponentOptions::defaults_for(&cfg).eps_link;
        let cont = OracleContinuation { problem: &q, radius: cfg.final_radius() };
        let comps = components(&g, &cont, eps);
        assert_eq!(comps.len(), 2);
        for c in &comps {
            let inv = inverse_image(&g, c).unwrap();
            assert_eq!(inv.len(), 31);
            assert!(inv.iter().all(|w| w.is_interior));
        }
    }

    #[test]
    fn quartic_solver_image_count_at_eight() {
        let q = builtin("nonconvex_quartic").unwrap();
        let g = solve_simplex(&q, ScalarizationKind::WeightedSum, 8, &SolverConfig::default()).unwrap();
        assert_eq!(image_points(&g).len(), 14);
    }

    #[test]
    fn monotone_affine_oracle_domain() {
        let p = builtin("monotone_affine").unwrap();
        let g = oracle_graph(&p, 24, &SolverConfig::default()).unwrap();
        assert_eq!(domain_components(&g), 2);
        assert_eq!(bounded_value_weights(&g).len(), g.dom_indices().len());
        match domain_closedness(&g) {
            DomainVerdict::NonClosedAtResolution { witnesses } => {
                assert_eq!(witnesses.len(), 1);
                assert_eq!(witnesses[0].coords[0], 0.5);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn linear_fractional_oracle_domain_and_values() {
        let p = builtin("linear_fractional").unwrap();
        let cfg = SolverConfig::default();
        let g = oracle_graph(&p, 24, &cfg).unwrap();
        assert_eq!(domain_components(&g), 1);
        assert!(domain_closedness(&g).is_closed());
        let bv: Vec<f64> = bounded_value_weights(&g).iter().map(|w| w.coords[0]).collect();
        assert_eq!(bv.len(), g.dom_indices().len() - 2);
        assert!(!bv.iter().any(|a| (a - 0.5).abs() < 1e-12 || (a - 2.0 / 3.0).abs() < 1e-12));
        let cont = OracleContinuation { problem: &p, radius: cfg.final_radius() };
        let a = analyze_graph(&g, &cont, AnalysisSource::Oracle, ComponentOptions::defaults_for(&cfg));
        assert_eq!(a.components.len(), 2);
        assert_eq!(a.unbounded_components(), 2);
        let ray = a
            .components
            .iter()
            .find(|c| c.min_point[1].abs() < 1e-12)
            .expect("x2 = 0 component");
        let inv: Vec<f64> = ray.inverse_weights.iter().map(|w| w.coords[0]).collect();
        assert!(inv.iter().all(|&a| a <= 0.5 + 1e-12));
        assert_eq!(inv.len(), 13);
    }

    #[test]
    fn warburton_oracle_components() {
        let p = builtin("warburton_quasiconvex").unwrap();
        let cfg = SolverConfig::default();
        let g = oracle_graph(&p, 12, &cfg).unwrap();
        assert_eq!(domain_components(&g), 2);
        let cont = OracleContinuation { problem: &p, radius: cfg.final_radius() };
        let a = analyze_graph(&g, &cont, AnalysisSource::Oracle, ComponentOptions::defaults_for(&cfg));
        assert_eq!(a.components.len(), 2);
        assert!(a.components.iter().all(|c| !c.bounded_at_scale));
        assert!(a.single_valued);
    }

    #[test]
    fn rectangle_oracle_is_bounded_and_closed() {
        let p = builtin("rectangle_identity").unwrap();
        let cfg = SolverConfig::default();
        let g = oracle_graph(&p, 4, &cfg).unwrap();
        let cont = OracleContinuation { problem: &p, radius: cfg.final_radius() };
        let a = analyze_graph(&g, &cont, AnalysisSource::Oracle, ComponentOptions::defaults_for(&cfg));
        assert_eq!(a.components.len(), 1);
        assert!(a.components[0].bounded_at_scale);
        assert!(a.domain.is_closed());
        assert!(!a.single_valued);
        for (x, w) in image_points(&g) {
            if w.coords[1] > 0.0 {
                assert_eq!(x[1], 0.0);
            }
        }
    }

    #[test]
    fn synthetic_nonclosed_detection() {
        let g = synthetic(vec![
            esc(),
            mins(vec![vec![8.0, 0.0]]),
            mins(vec![vec![3.0, 0.0]]),
            mins(vec![vec![1.0, 0.0]]),
            mins(vec![vec![0.5, 0.0]]),
        ]);
        match domain_closedness(&g) {
            DomainVerdict::NonClosedAtResolution { witnesses } => {
                assert_eq!(witnesses[0].coords, vec![0.0, 1.0]);
            }
            v => panic!("{v:?}"),
        }
        // a domain that simply ends with constant solutions is closed
        let g = synthetic(vec![
            esc(),
            mins(vec![vec![1.0, 0.0]]),
            mins(vec![vec![1.0, 0.0]]),
            mins(vec![vec![1.0, 0.0]]),
        ]);
        assert!(domain_closedness(&g).is_closed());
    }

    #[test]
    fn classify_flags_value_unbounded_weights() {
        let mut o = mins(vec![vec![1.0, 0.0]]);
        if let SolveOutcome::Minimizers { value_unbounded_set, .. } = &mut o {
            *value_unbounded_set = true;
        }
        let g = synthetic(vec![o, mins(vec![vec![1.0, 0.1]])]);
        let c = connected_components(&[vec![1.0, 0.0], vec![1.0, 0.1]], 0.5);
        assert!(!classify_boundedness(&g, &c[0], 0.5));
        let g = synthetic(vec![mins(vec![vec![200.0, 0.0]]), esc()]);
        let c = connected_components(&[vec![200.0, 0.0]], 0.5);
        assert!(!classify_boundedness(&g, &c[0], 0.5));
        assert!(classify_boundedness(&g, &c[0], 0.9));
    }

    #[test]
    fn inverse_image_rejects_foreign_component() {
        let g = synthetic(vec![esc(), mins(vec![vec![0.0, 0.0]])]);
        let c = connected_components(&[vec![0.0], vec![1.0], vec![2.0]], 5.0);
        assert!(inverse_image(&g, &c[0]).is_err());
        let empty = Component {
            id: 0,
            members: vec![],
            min_point: vec![],
            max_norm: 0.0,
            extension_norm: 0.0,
            bounded_at_scale: true,
            inverse_weights: vec![],
            inverse_closed_at_resolution: true,
        };
        assert!(inverse_image(&g, &empty).unwrap().is_empty());
    }

    #[test]
    fn grid_neighbors_on_a_line() {
        let g = synthetic(vec![esc(), esc(), esc(), esc()]);
        let nb = grid_neighbors(&g);
        assert_eq!(nb[0], vec![1]);
        assert_eq!(nb[1], vec![0, 2]);
    }

    fn cloud() -> impl Strategy<Value = Vec<Vec<f64>>> {
        proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 2), 1..60)
    }

    proptest! {
        #[test]
        fn components_partition_the_points(pts in cloud(), eps in 0.05f64..3.0) {
            let comps = connected_components(&pts, eps);
            let mut all: Vec<usize> = comps.iter().flat_map(|c| c.members.clone()).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..pts.len()).collect::<Vec<_>>());
        }

        #[test]
        fn component_count_monotone_in_eps(pts in cloud(), a in 0.05f64..3.0, b in 0.05f64..3.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(connected_components(&pts, hi).len() <= connected_components(&pts, lo).len());
        }

        #[test]
        fn points_in_different_components_are_far(pts in cloud(), eps in 0.05f64..3.0) {
            let comps = connected_components(&pts, eps);
            for (i, a) in comps.iter().enumerate() {
                for b in &comps[i + 1..] {
                    for &p in &a.members {
                        for &q in &b.members {
                            prop_assert!(dist(&pts[p], &pts[q]) > eps);
                        }
                    }
                }
            }
        }
    }
}
