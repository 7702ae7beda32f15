//! Theorem-backed consistency checks over sampled solution mappings, and the
//! analysis report that bundles them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mapping::{
    analyze_graph, dist, grid_neighbors, oracle_graph, AnalysisSource, ComponentOptions,
    GraphSample, MappingAnalysis, OracleContinuation, SolverContinuation,
};
use crate::oracle::{compare_with_oracle, OracleComparison};
use crate::problem::{
    cartesian, contains, evaluate, lattice_axis, ConvexityTag, ProblemFile, VectorProblem,
};
use crate::scalarize::{
    dominates, quasiconvexity_probe_in, recover_weight, QuasiconvexityVerdict, ScalarizationKind,
    Weight, ZERO_EPS,
};
use crate::solver::{solve_simplex, SolverConfig};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Default simplex resolution of a report run.
pub const DEFAULT_RESOLUTION: usize = 24;
pub const DEFAULT_PROBE_TRIALS: usize = 10_000;

/// Slack allowed when comparing weighted-max values across probes.
const COVER_TOL: f64 = 1e-6;
/// Probe lattice points per axis in the plane; shrinks with dimension.
const PROBE_LATTICE: usize = 65;
const PROBE_BUDGET: f64 = 20_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    NonclosedImpliesUnbounded,
    ComponentsUnboundedConnectedDom,
    ComponentsUnboundedOpenO,
    DomImageComponentMatch,
    Theta2CoversSolw,
    IffQuasiconvex,
    IffConvex,
    ConvexPolynomialConnected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Asserted,
    Informational,
}

/// One named yes/no observation with a human-readable reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub holds: bool,
    pub evidence: String,
}

impl Verdict {
    fn new(name: &str, holds: bool, evidence: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            holds,
            evidence: evidence.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub theorem_id: TheoremId,
    pub kind: ScalarizationKind,
    pub hypotheses: Vec<Verdict>,
    pub conclusion_observed: Verdict,
    /// Extra observations that do not enter `consistent`.
    pub findings: Vec<Verdict>,
    pub consistent: bool,
    pub mode: CheckMode,
}

impl TheoremCheck {
    fn build(
        theorem_id: TheoremId,
        kind: ScalarizationKind,
        hypotheses: Vec<Verdict>,
        conclusion_observed: Verdict,
        findings: Vec<Verdict>,
    ) -> Self {
        let all = hypotheses.iter().all(|h| h.holds);
        TheoremCheck {
            theorem_id,
            kind,
            consistent: !all || conclusion_observed.holds,
            mode: if all {
                CheckMode::Asserted
            } else {
                CheckMode::Informational
            },
            hypotheses,
            conclusion_observed,
            findings,
        }
    }

    pub fn finding(&self, name: &str) -> Option<&Verdict> {
        self.findings.iter().find(|f| f.name == name)
    }
}

fn unbounded_evidence(a: &MappingAnalysis) -> String {
    format!(
        "{} of {} components reach rho*R or carry a value-unbounded weight",
        a.unbounded_components(),
        a.components.len()
    )
}

fn values_connected_verdict(a: &MappingAnalysis) -> Verdict {
    Verdict::new(
        "values_connected",
        a.values_connected,
        if a.values_connected {
            "every domain weight has one solution cluster".to_string()
        } else {
            "some domain weight has several separated solution clusters".to_string()
        },
    )
}

/// A non-closed domain forces an unbounded image.
pub fn check_nonclosed_implies_unbounded(a: &MappingAnalysis) -> TheoremCheck {
    let hyp = match &a.domain {
        crate::mapping::DomainVerdict::ClosedAtResolution => {
            Verdict::new("dom_nonclosed", false, "no escaping weight is approached by diverging solutions")
        }
        crate::mapping::DomainVerdict::NonClosedAtResolution { witnesses } => Verdict::new(
            "dom_nonclosed",
            true,
            format!(
                "missing weights approached by diverging solutions: {}",
                fmt_weights(witnesses)
            ),
        ),
    };
    let conclusion = Verdict::new(
        "image_unbounded",
        a.unbounded_components() > 0,
        unbounded_evidence(a),
    );
    // interior-weight clause: unboundedness already visible over ri of the simplex
    let interior = a
        .components
        .iter()
        .any(|c| !c.bounded_at_scale && c.inverse_weights.iter().any(|w| w.is_interior));
    let findings = vec![Verdict::new(
        "interior_image_unbounded",
        interior,
        "an unbounded component is reached from interior weights",
    )];
    TheoremCheck::build(
        TheoremId::NonclosedImpliesUnbounded,
        a.kind,
        vec![hyp],
        conclusion,
        findings,
    )
}

/// Whether every bounded-value weight only neighbours bounded-value weights
/// inside the domain.
fn o_open_on_grid(g: &GraphSample) -> (bool, Vec<Weight>) {
    let nbrs = grid_neighbors(g);
    let in_o = |i: usize| g.entries[i].outcome.in_domain() && !g.entries[i].outcome.value_unbounded();
    let mut bad = Vec::new();
    for (i, ns) in nbrs.iter().enumerate() {
        if in_o(i)
            && ns
                .iter()
                .any(|&j| g.entries[j].outcome.in_domain() && !in_o(j))
        {
            bad.push(g.entries[i].weight.clone());
        }
    }
    (bad.is_empty(), bad)
}

/// With connected values and either a connected domain or an open bounded-value
/// set, every component of a disconnected image is unbounded.
pub fn check_components_unbounded(g: &GraphSample, a: &MappingAnalysis) -> TheoremCheck {
    let vc = values_connected_verdict(a);
    let dom_connected = a.domain_components == 1;
    let route_a = Verdict::new(
        "dom_connected",
        dom_connected,
        format!("{} grid component(s) of the domain", a.domain_components),
    );
    let (open, bad) = o_open_on_grid(g);
    let route_b = Verdict::new(
        "o_open_in_dom",
        open,
        if open {
            "no bounded-value weight touches a value-unbounded domain weight".to_string()
        } else {
            format!("boundary weights of O inside dom: {}", fmt_weights(&bad))
        },
    );
    let (id, hyps) = if dom_connected {
        (TheoremId::ComponentsUnboundedConnectedDom, vec![vc, route_a])
    } else if open {
        (TheoremId::ComponentsUnboundedOpenO, vec![vc, route_b])
    } else {
        (TheoremId::ComponentsUnboundedConnectedDom, vec![vc, route_a, route_b])
    };
    let k = a.components.len();
    let holds = k < 2 || a.unbounded_components() == k;
    let conclusion = Verdict::new(
        "all_components_unbounded_if_disconnected",
        holds,
        format!("{k} component(s); {}", unbounded_evidence(a)),
    );
    TheoremCheck::build(id, a.kind, hyps, conclusion, Vec::new())
}

/// The image splits exactly as the domain does.
pub fn check_dom_image_component_match(a: &MappingAnalysis) -> TheoremCheck {
    let vc = values_connected_verdict(a);
    let all_bounded = a.bounded_value_weights.len() == a.dom_weights;
    let bv = Verdict::new(
        "values_bounded",
        all_bounded,
        format!(
            "{} of {} domain weights have bounded solution sets",
            a.bounded_value_weights.len(),
            a.dom_weights
        ),
    );
    let conclusion = Verdict::new(
        "component_counts_match",
        a.domain_components == a.components.len(),
        format!(
            "{} domain component(s), {} image component(s)",
            a.domain_components,
            a.components.len()
        ),
    );
    TheoremCheck::build(
        TheoremId::DomImageComponentMatch,
        a.kind,
        vec![vc, bv],
        conclusion,
        Vec::new(),
    )
}

/// Multi-scale lattice of feasible points inside each search window.
pub fn solw_probes(problem: &VectorProblem, cfg: &SolverConfig) -> Result<Vec<Vec<f64>>> {
    let per_window = PROBE_BUDGET / cfg.radii.len() as f64;
    let per_axis = (per_window.powf(1.0 / problem.n as f64).floor() as usize).clamp(3, PROBE_LATTICE);
    let mut out = Vec::new();
    for &r in &cfg.radii {
        let Some(bounds) = problem.feasible.window_bounds(r) else {
            continue;
        };
        let axes: Vec<Vec<f64>> = bounds
            .iter()
            .map(|&(lo, hi)| lattice_axis(lo, hi, per_axis))
            .collect();
        for p in cartesian(&axes) {
            if contains(&problem.feasible, &p, 0.0)? {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Objective values of the probes, with a fast strict-dominance query.
struct ProbeCloud {
    pts: Vec<Vec<f64>>,
    vals: Vec<Vec<f64>>,
    // bicriteria index: order by f1 and running minimum of f2
    order: Vec<usize>,
    prefix_min: Vec<f64>,
}

impl ProbeCloud {
    fn new(problem: &VectorProblem, probes: &[Vec<f64>]) -> Self {
        let mut pts = Vec::new();
        let mut vals = Vec::new();
        for p in probes {
            if let Ok(f) = evaluate(problem, p) {
                if f.iter().all(|v| v.is_finite()) {
                    pts.push(p.clone());
                    vals.push(f);
                }
            }
        }
        let mut order = Vec::new();
        let mut prefix_min = Vec::new();
        if problem.m == 2 {
            order = (0..vals.len()).collect();
            order.sort_by(|&a, &b| vals[a][0].total_cmp(&vals[b][0]));
            let mut m = f64::INFINITY;
            for &i in &order {
                m = m.min(vals[i][1]);
                prefix_min.push(m);
            }
        }
        ProbeCloud {
            pts,
            vals,
            order,
            prefix_min,
        }
    }

    fn tol(fx: &[f64]) -> f64 {
        COVER_TOL * (1.0 + fx.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }

    fn dominated(&self, fx: &[f64]) -> bool {
        let tol = Self::tol(fx);
        if fx.len() == 2 && !self.order.is_empty() {
            let k = self
                .order
                .partition_point(|&i| self.vals[i][0] < fx[0] - tol);
            return k > 0 && self.prefix_min[k - 1] < fx[1] - tol;
        }
        self.vals.iter().any(|fy| dominates(fy, fx, tol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolwOptions {
    /// Run without the nonnegativity tag, in informational mode.
    pub allow_untagged: bool,
    /// Distance beyond which a probe counts as absent from the interior image.
    pub absence_tol: f64,
}

/// Weighted-max images against weak Pareto probes: interior images are weakly
/// efficient, every weakly efficient probe is a weighted-max minimizer for its
/// recovered weight, and the two strict inclusions are looked for.
pub fn check_theta2_covers_solw(
    problem: &VectorProblem,
    g2: &GraphSample,
    probes: &[Vec<f64>],
    opts: SolwOptions,
) -> Result<TheoremCheck> {
    if g2.kind != ScalarizationKind::WeightedMax {
        return Err(Error::Precondition("cover check needs a weighted-max graph".into()));
    }
    let tagged = problem.tags.lower_bound.nonnegative();
    if !tagged && !opts.allow_untagged {
        return Err(Error::Precondition(format!(
            "problem `{}` is not tagged bounded below by zero",
            problem.name
        )));
    }
    let cloud = ProbeCloud::new(problem, probes);

    let mut interior_bad = None;
    let mut any_bad = None;
    let mut interior_pts: Vec<&[f64]> = Vec::new();
    for e in g2.entries.iter() {
        for x in e.outcome.points() {
            let fx = evaluate(problem, x)?;
            let dominated = cloud.dominated(&fx);
            if e.weight.is_interior {
                interior_pts.push(x);
                if dominated && interior_bad.is_none() {
                    interior_bad = Some(x.clone());
                }
            }
            if dominated && any_bad.is_none() {
                any_bad = Some(x.clone());
            }
        }
    }

    let solw: Vec<usize> = (0..cloud.pts.len())
        .filter(|&i| !cloud.dominated(&cloud.vals[i]))
        .collect();
    let mut cover_bad = None;
    let mut checked = 0usize;
    for &i in &solw {
        let fp = &cloud.vals[i];
        if fp.iter().any(|v| *v <= ZERO_EPS) {
            continue;
        }
        let xi = recover_weight(fp)?;
        let own = ScalarizationKind::WeightedMax.combine(&xi, fp);
        checked += 1;
        let beaten = cloud
            .vals
            .iter()
            .any(|fy| ScalarizationKind::WeightedMax.combine(&xi, fy) < own - COVER_TOL);
        if beaten {
            cover_bad = Some(cloud.pts[i].clone());
            break;
        }
    }
    let absent = solw.iter().map(|&i| &cloud.pts[i]).find(|p| {
        interior_pts
            .iter()
            .all(|q| dist(p, q) > opts.absence_tol)
    });

    let hyp = Verdict::new(
        "bounded_below_by_zero",
        tagged,
        format!("lower bound tag: {:?}", problem.tags.lower_bound),
    );
    let i_ok = interior_bad.is_none();
    let ii_ok = cover_bad.is_none();
    let conclusion = Verdict::new(
        "solw_equals_theta2_image",
        i_ok && ii_ok,
        format!(
            "interior images weakly efficient: {i_ok}; weakly efficient probes covered: {ii_ok}"
        ),
    );
    let findings = vec![
        Verdict::new(
            "interior_image_weakly_efficient",
            i_ok,
            match &interior_bad {
                None => format!("{} interior image points, none dominated", interior_pts.len()),
                Some(x) => format!("dominated interior image point {}", fmt_point(x)),
            },
        ),
        Verdict::new(
            "solw_covered_by_image",
            ii_ok,
            match &cover_bad {
                None => format!(
                    "{checked} of {} weakly efficient probes with positive values minimize at their recovered weight",
                    solw.len()
                ),
                Some(x) => format!("probe {} is beaten at its recovered weight", fmt_point(x)),
            },
        ),
        Verdict::new(
            "strict_image_exceeds_solw",
            any_bad.is_some(),
            match &any_bad {
                Some(x) => format!("image point {} is not weakly efficient", fmt_point(x)),
                None => "every image point is weakly efficient".to_string(),
            },
        ),
        Verdict::new(
            "strict_solw_exceeds_interior_image",
            absent.is_some(),
            match absent {
                Some(x) => format!(
                    "weakly efficient probe {} is farther than {} from the interior image",
                    fmt_point(x),
                    opts.absence_tol
                ),
                None => "every weakly efficient probe is near the interior image".to_string(),
            },
        ),
    ];
    Ok(TheoremCheck::build(
        TheoremId::Theta2CoversSolw,
        ScalarizationKind::WeightedMax,
        vec![hyp],
        conclusion,
        findings,
    ))
}

/// Unbounded image exactly when the domain is non-closed, under the convexity
/// hypothesis that matches the scalarization. `probe_passed` is the outcome of
/// the randomized convexity probe on the objectives, when one ran.
pub fn check_iff_unbounded(
    a: &MappingAnalysis,
    problem: &VectorProblem,
    probe_passed: Option<bool>,
) -> Result<TheoremCheck> {
    let c = problem.tags.convexity;
    let (id, tagged) = match a.kind {
        ScalarizationKind::WeightedMax => (TheoremId::IffQuasiconvex, c.implies_quasiconvex()),
        ScalarizationKind::WeightedSum => (TheoremId::IffConvex, c.implies_convex()),
    };
    if !tagged {
        return Err(Error::Precondition(format!(
            "problem `{}` lacks the convexity tag this check needs (has {c:?})",
            problem.name
        )));
    }
    let mut hyps = vec![Verdict::new("convexity_tag", true, format!("{c:?}"))];
    if a.kind == ScalarizationKind::WeightedMax {
        hyps.push(Verdict::new(
            "bounded_below_by_zero",
            problem.tags.lower_bound.nonnegative(),
            format!("lower bound tag: {:?}", problem.tags.lower_bound),
        ));
    }
    hyps.push(Verdict::new(
        "probe_finds_no_counterexample",
        probe_passed.unwrap_or(false),
        match probe_passed {
            Some(true) => "randomized probe passed on every objective",
            Some(false) => "randomized probe refuted the tag",
            None => "no probe was run",
        },
    ));
    let all_bounded = a.bounded_value_weights.len() == a.dom_weights;
    hyps.push(Verdict::new(
        "values_bounded",
        all_bounded,
        format!(
            "{} of {} domain weights have bounded solution sets",
            a.bounded_value_weights.len(),
            a.dom_weights
        ),
    ));
    let unbounded = a.unbounded_components() > 0;
    let nonclosed = !a.domain.is_closed();
    let conclusion = Verdict::new(
        "unbounded_iff_nonclosed",
        unbounded == nonclosed,
        format!("image unbounded: {unbounded}; domain non-closed: {nonclosed}"),
    );
    Ok(TheoremCheck::build(id, a.kind, hyps, conclusion, Vec::new()))
}

/// Convex polynomial objectives have a connected weak Pareto image.
pub fn check_convex_polynomial_connected(
    a: &MappingAnalysis,
    problem: &VectorProblem,
) -> Result<TheoremCheck> {
    if problem.tags.convexity != ConvexityTag::ConvexPolynomial {
        return Err(Error::Precondition(format!(
            "problem `{}` is not tagged convex_polynomial",
            problem.name
        )));
    }
    let all_bounded = a.bounded_value_weights.len() == a.dom_weights;
    let hyps = vec![
        Verdict::new("convex_polynomial_tag", true, "ConvexPolynomial"),
        Verdict::new(
            "values_bounded",
            all_bounded,
            format!(
                "{} of {} domain weights have bounded solution sets",
                a.bounded_value_weights.len(),
                a.dom_weights
            ),
        ),
    ];
    let k = a.components.len();
    let conclusion = Verdict::new("image_connected", k <= 1, format!("{k} component(s)"));
    Ok(TheoremCheck::build(
        TheoremId::ConvexPolynomialConnected,
        a.kind,
        hyps,
        conclusion,
        Vec::new(),
    ))
}

fn fmt_point(x: &[f64]) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn fmt_weights(ws: &[Weight]) -> String {
    let parts: Vec<String> = ws.iter().map(|w| fmt_point(&w.coords)).collect();
    parts.join(", ")
}

/// Which scalarizations a report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KindSelection {
    /// Weighted sum always; weighted max when the objectives are tagged
    /// nonnegative or the attached oracle describes it.
    #[default]
    Auto,
    Sum,
    Max,
    Both,
}

impl KindSelection {
    pub fn kinds(self, problem: &VectorProblem) -> Vec<ScalarizationKind> {
        use ScalarizationKind::*;
        match self {
            KindSelection::Sum => vec![WeightedSum],
            KindSelection::Max => vec![WeightedMax],
            KindSelection::Both => vec![WeightedSum, WeightedMax],
            KindSelection::Auto => {
                let max = problem.tags.lower_bound.nonnegative()
                    || problem.oracle.as_ref().is_some_and(|o| o.kind == WeightedMax);
                if max {
                    vec![WeightedSum, WeightedMax]
                } else {
                    vec![WeightedSum]
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub resolution: usize,
    pub seed: u64,
    pub kinds: KindSelection,
    pub eps_link: Option<f64>,
    pub rho: Option<f64>,
    pub probe_trials: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            resolution: DEFAULT_RESOLUTION,
            seed: 0,
            kinds: KindSelection::Auto,
            eps_link: None,
            rho: None,
            probe_trials: DEFAULT_PROBE_TRIALS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub solver: SolverConfig,
    pub resolution: usize,
    pub seed: u64,
    pub eps_link: f64,
    pub rho: f64,
    pub probe_trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub objective: usize,
    pub radius: f64,
    pub seed: u64,
    pub verdict: QuasiconvexityVerdict,
}

/// Evidence that weak Pareto and Pareto solutions coincide: a single
/// minimizer at every domain weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoEvidence {
    pub single_valued: bool,
    pub multi_valued_weights: Vec<Weight>,
    pub sol_equals_solw_asserted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub graph: GraphSample,
    pub analysis: MappingAnalysis,
    pub agreement: OracleComparison,
    pub checks: Vec<TheoremCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindReport {
    pub kind: ScalarizationKind,
    pub graph: GraphSample,
    pub analysis: MappingAnalysis,
    pub checks: Vec<TheoremCheck>,
    pub pareto_evidence: Option<ParetoEvidence>,
    /// The attached closed-form map, analysed the same way.
    pub oracle: Option<OracleReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub problem_name: String,
    pub problem: ProblemFile,
    pub config: ReportConfig,
    pub quasiconvexity: Vec<ProbeReport>,
    pub results: Vec<KindReport>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn result(&self, kind: ScalarizationKind) -> Option<&KindReport> {
        self.results.iter().find(|r| r.kind == kind)
    }

    /// Checks on the solver pipeline.
    pub fn all_checks(&self) -> impl Iterator<Item = &TheoremCheck> {
        self.results.iter().flat_map(|r| r.checks.iter())
    }

    /// Checks on the attached closed-form maps.
    pub fn oracle_checks(&self) -> impl Iterator<Item = &TheoremCheck> {
        self.results
            .iter()
            .flat_map(|r| r.oracle.iter().flat_map(|o| o.checks.iter()))
    }

    pub fn inconsistent_checks(&self) -> usize {
        self.all_checks().filter(|c| !c.consistent).count()
    }

    pub fn inconsistent_oracle_checks(&self) -> usize {
        self.oracle_checks().filter(|c| !c.consistent).count()
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    /// Parses a stored report, rejecting other schema versions before decoding
    /// the body.
    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        let found = v
            .get("schema_version")
            .and_then(|s| s.as_u64())
            .ok_or_else(|| Error::Config("report has no schema_version".into()))?;
        if found != SCHEMA_VERSION as u64 {
            return Err(Error::SchemaVersion {
                found: found.min(u32::MAX as u64) as u32,
                expected: SCHEMA_VERSION,
            });
        }
        Ok(serde_json::from_value(v)?)
    }
}

fn probe_seed(seed: u64, objective: usize, radius_idx: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((objective as u64) << 16 | radius_idx as u64)
}

fn run_probes(problem: &VectorProblem, cfg: &SolverConfig, opts: &ReportOptions) -> Vec<ProbeReport> {
    if problem.tags.convexity == ConvexityTag::None {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (k, g) in problem.objectives.iter().enumerate() {
        for (ri, &radius) in cfg.radii.iter().enumerate() {
            let seed = probe_seed(opts.seed, k, ri);
            out.push(ProbeReport {
                objective: k,
                radius,
                seed,
                verdict: quasiconvexity_probe_in(g, &problem.feasible, opts.probe_trials, seed, radius),
            });
        }
    }
    out
}

fn checks_for(
    problem: &VectorProblem,
    g: &GraphSample,
    a: &MappingAnalysis,
    probe_passed: Option<bool>,
    probes: Option<&[Vec<f64>]>,
) -> Result<Vec<TheoremCheck>> {
    let mut out = vec![
        check_nonclosed_implies_unbounded(a),
        check_components_unbounded(g, a),
        check_dom_image_component_match(a),
    ];
    if a.kind == ScalarizationKind::WeightedMax {
        if let Some(probes) = probes {
            out.push(check_theta2_covers_solw(
                problem,
                g,
                probes,
                SolwOptions {
                    allow_untagged: true,
                    absence_tol: a.options.eps_link,
                },
            )?);
        }
    }
    let c = problem.tags.convexity;
    let iff_applies = match a.kind {
        ScalarizationKind::WeightedMax => c.implies_quasiconvex(),
        ScalarizationKind::WeightedSum => c.implies_convex(),
    };
    if iff_applies {
        out.push(check_iff_unbounded(a, problem, probe_passed)?);
    }
    if c == ConvexityTag::ConvexPolynomial && a.kind == ScalarizationKind::WeightedSum {
        out.push(check_convex_polynomial_connected(a, problem)?);
    }
    Ok(out)
}

fn pareto_evidence(g: &GraphSample, a: &MappingAnalysis) -> ParetoEvidence {
    let multi: Vec<Weight> = g
        .entries
        .iter()
        .filter(|e| e.outcome.in_domain() && e.outcome.cluster_count() != 1)
        .map(|e| e.weight.clone())
        .collect();
    let single = a.single_valued && a.dom_weights > 0;
    ParetoEvidence {
        single_valued: single,
        multi_valued_weights: multi,
        sol_equals_solw_asserted: single,
    }
}

/// Builds graph samples, analyses, theorem checks and convexity probes for
/// `problem`. Deterministic in `(cfg, opts)`.
pub fn run_report(
    problem: &VectorProblem,
    cfg: &SolverConfig,
    opts: &ReportOptions,
) -> Result<AnalysisReport> {
    cfg.validate()?;
    problem.validate()?;
    if opts.resolution < 1 {
        return Err(Error::Config("resolution must be at least 1".into()));
    }
    let defaults = ComponentOptions::defaults_for(cfg);
    let copts = ComponentOptions {
        eps_link: opts.eps_link.unwrap_or(defaults.eps_link),
        rho: opts.rho.unwrap_or(defaults.rho),
    };
    if copts.eps_link.is_nan() || copts.eps_link <= 0.0 || !(0.0..1.0).contains(&copts.rho) || copts.rho == 0.0 {
        return Err(Error::Config("eps_link must be positive and rho in (0, 1)".into()));
    }
    let quasiconvexity = run_probes(problem, cfg, opts);
    let probe_passed = (!quasiconvexity.is_empty())
        .then(|| quasiconvexity.iter().all(|p| p.verdict.passed()));

    let kinds = opts.kinds.kinds(problem);
    let probes = if kinds.contains(&ScalarizationKind::WeightedMax) {
        Some(solw_probes(problem, cfg)?)
    } else {
        None
    };

    let mut results = Vec::new();
    for kind in kinds {
        let graph = solve_simplex(problem, kind, opts.resolution, cfg)?;
        let cont = SolverContinuation { problem, kind, cfg };
        let analysis = analyze_graph(&graph, &cont, AnalysisSource::Solver, copts);
        let checks = checks_for(problem, &graph, &analysis, probe_passed, probes.as_deref())?;
        let pareto = (kind == ScalarizationKind::WeightedMax).then(|| pareto_evidence(&graph, &analysis));
        let oracle = match &problem.oracle {
            Some(o) if o.kind == kind => {
                let og = oracle_graph(problem, opts.resolution, cfg)?;
                let ocont = OracleContinuation {
                    problem,
                    radius: cfg.final_radius(),
                };
                let oa = analyze_graph(&og, &ocont, AnalysisSource::Oracle, copts);
                let oc = checks_for(problem, &og, &oa, probe_passed, probes.as_deref())?;
                Some(OracleReport {
                    agreement: compare_with_oracle(problem, &graph)?,
                    graph: og,
                    analysis: oa,
                    checks: oc,
                })
            }
            _ => None,
        };
        results.push(KindReport {
            kind,
            graph,
            analysis,
            checks,
            pareto_evidence: pareto,
            oracle,
        });
    }

    let mut notes = vec![
        format!(
            "Closedness, boundedness and component verdicts are relative to resolution N = {}, \
             window radii {:?}, eps_link = {} and rho = {}; they are numerical evidence, not proofs.",
            opts.resolution, cfg.radii, copts.eps_link, copts.rho
        ),
        "Convex-case statements phrased for Phi_1 are applied to the weighted-sum map Theta_1."
            .to_string(),
    ];
    if problem.tags.convexity.implies_convex() {
        if let Some(r) = results.iter().find(|r| r.kind == ScalarizationKind::WeightedSum) {
            if r.analysis.components.len() > 1 {
                notes.push(format!(
                    "ATTENTION: the weighted-sum image of this convex-tagged problem splits into {} \
                     components. No convex problem with a disconnected weak Pareto set is known; \
                     confirm at higher resolution before trusting this.",
                    r.analysis.components.len()
                ));
            }
        }
    }
    if probe_passed == Some(false) {
        notes.push(
            "The randomized probe refuted the declared convexity tag; dependent checks are informational."
                .to_string(),
        );
    }
    for r in &results {
        if let Some(o) = &r.oracle {
            if !o.agreement.all_ok {
                notes.push(format!(
                    "Solver output for {} disagrees with the attached closed-form map at {} weight(s) \
                     ({} domain mismatches).",
                    r.kind.label(),
                    o.agreement.weights.iter().filter(|w| !w.ok).count(),
                    o.agreement.domain_mismatches
                ));
            }
            for c in o.checks.iter().filter(|c| !c.consistent) {
                notes.push(format!(
                    "The attached closed-form {} map fails the {:?} check: {}.",
                    r.kind.label(),
                    c.theorem_id,
                    c.conclusion_observed.evidence
                ));
            }
        }
    }

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        problem_name: problem.name.clone(),
        problem: ProblemFile::from_problem(problem),
        config: ReportConfig {
            solver: cfg.clone(),
            resolution: opts.resolution,
            seed: opts.seed,
            eps_link: copts.eps_link,
            rho: copts.rho,
            probe_trials: opts.probe_trials,
        },
        quasiconvexity,
        results,
        notes,
    })
}
