//! Vector optimization problems, feasible sets and the builtin catalog.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::scalarize::{ScalarizationKind, Weight};

/// Declared generalized-convexity class of all objectives over K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityTag {
    #[default]
    None,
    Quasiconvex,
    StrictlyQuasiconvex,
    Convex,
    ConvexPolynomial,
}

impl ConvexityTag {
    pub fn implies_quasiconvex(self) -> bool {
        !matches!(self, ConvexityTag::None)
    }

    pub fn implies_convex(self) -> bool {
        matches!(self, ConvexityTag::Convex | ConvexityTag::ConvexPolynomial)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LowerBoundTag {
    #[default]
    Unknown,
    BoundedBelowByZero,
    StrictlyBoundedBelowByZero,
}

impl LowerBoundTag {
    pub fn nonnegative(self) -> bool {
        !matches!(self, LowerBoundTag::Unknown)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Tags {
    #[serde(default)]
    pub convexity: ConvexityTag,
    #[serde(default)]
    pub lower_bound: LowerBoundTag,
}

/// Extended reals for box bounds: JSON numbers, or the strings `"inf"` / `"-inf"`.
mod ext_real {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let reprs: Vec<Repr> = v
            .iter()
            .map(|&x| {
                if x == f64::INFINITY {
                    Repr::Text("inf".into())
                } else if x == f64::NEG_INFINITY {
                    Repr::Text("-inf".into())
                } else {
                    Repr::Num(x)
                }
            })
            .collect();
        reprs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let reprs = Vec::<Repr>::deserialize(d)?;
        reprs
            .into_iter()
            .map(|r| match r {
                Repr::Num(x) => Ok(x),
                Repr::Text(t) => match t.as_str() {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => Err(D::Error::custom(format!("bad extended real `{other}`"))),
                },
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum FeasibleKind {
    WholeSpace,
    Box {
        #[serde(with = "ext_real")]
        lower: Vec<f64>,
        #[serde(with = "ext_real")]
        upper: Vec<f64>,
    },
    /// All constraints read `g_j(x) <= 0`.
    Sublevel { constraints: Vec<Expr> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSet {
    #[serde(flatten)]
    pub kind: FeasibleKind,
    pub witness: Vec<f64>,
}

impl FeasibleSet {
    pub fn whole_space(n: usize) -> Self {
        FeasibleSet {
            kind: FeasibleKind::WholeSpace,
            witness: vec![0.0; n],
        }
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>, witness: Vec<f64>) -> Self {
        FeasibleSet {
            kind: FeasibleKind::Box { lower, upper },
            witness,
        }
    }

    pub fn sublevel(constraints: Vec<Expr>, witness: Vec<f64>) -> Self {
        FeasibleSet {
            kind: FeasibleKind::Sublevel { constraints },
            witness,
        }
    }

    pub fn dim(&self) -> usize {
        self.witness.len()
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.witness.len() != n {
            return Err(Error::InvalidProblem(format!(
                "witness has length {}, expected {n}",
                self.witness.len()
            )));
        }
        match &self.kind {
            FeasibleKind::WholeSpace => {}
            FeasibleKind::Box { lower, upper } => {
                if lower.len() != n || upper.len() != n {
                    return Err(Error::InvalidProblem("box bounds must have length n".into()));
                }
                if lower.iter().zip(upper).any(|(l, u)| l > u || l.is_nan() || u.is_nan()) {
                    return Err(Error::InvalidProblem("box requires lower <= upper".into()));
                }
            }
            FeasibleKind::Sublevel { constraints } => {
                if let Some(c) = constraints.iter().find(|c| c.referenced_arity() > n) {
                    return Err(Error::InvalidProblem(format!(
                        "constraint `{c}` references variables beyond x{n}"
                    )));
                }
            }
        }
        if !contains(self, &self.witness, 0.0)? {
            return Err(Error::InvalidProblem("witness is not feasible".into()));
        }
        Ok(())
    }

    /// Per-axis bounds of `[-radius, radius]^n` intersected with the box hull of K.
    /// Returns `None` when the intersection is empty.
    pub fn window_bounds(&self, radius: f64) -> Option<Vec<(f64, f64)>> {
        let n = self.dim();
        let mut out = vec![(-radius, radius); n];
        if let FeasibleKind::Box { lower, upper } = &self.kind {
            for i in 0..n {
                let lo = lower[i].max(-radius);
                let hi = upper[i].min(radius);
                if lo > hi {
                    return None;
                }
                out[i] = (lo, hi);
            }
        }
        Some(out)
    }

    /// Clamps to the box for box sets; identity otherwise.
    pub fn project(&self, x: &mut [f64]) {
        if let FeasibleKind::Box { lower, upper } = &self.kind {
            for i in 0..x.len() {
                x[i] = x[i].clamp(lower[i], upper[i]);
            }
        }
    }
}

/// Membership test with slack `tol`.
pub fn contains(fs: &FeasibleSet, x: &[f64], tol: f64) -> Result<bool> {
    if x.len() != fs.dim() {
        return Err(Error::Dimension {
            expected: fs.dim(),
            got: x.len(),
        });
    }
    Ok(match &fs.kind {
        FeasibleKind::WholeSpace => true,
        FeasibleKind::Box { lower, upper } => x
            .iter()
            .zip(lower.iter().zip(upper))
            .all(|(&xi, (&l, &u))| l - tol <= xi && xi <= u + tol),
        FeasibleKind::Sublevel { constraints } => constraints
            .iter()
            .all(|g| matches!(g.eval(x), Ok(v) if v <= tol)),
    })
}

/// Where a piece of a closed-form solution map applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case")]
pub enum WeightRegion {
    /// `lo <= xi_{coord} <= hi`, with each end optionally open.
    Interval {
        coord: usize,
        lo: f64,
        hi: f64,
        lo_closed: bool,
        hi_closed: bool,
    },
    All,
}

const REGION_TOL: f64 = 1e-12;

impl WeightRegion {
    pub fn closed(coord: usize, lo: f64, hi: f64) -> Self {
        WeightRegion::Interval {
            coord,
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn open(coord: usize, lo: f64, hi: f64) -> Self {
        WeightRegion::Interval {
            coord,
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn half_open(coord: usize, lo: f64, hi: f64, lo_closed: bool) -> Self {
        WeightRegion::Interval {
            coord,
            lo,
            hi,
            lo_closed,
            hi_closed: !lo_closed,
        }
    }

    pub fn point(coord: usize, at: f64) -> Self {
        Self::closed(coord, at, at)
    }

    pub fn matches(&self, w: &Weight) -> bool {
        match self {
            WeightRegion::All => true,
            WeightRegion::Interval {
                coord,
                lo,
                hi,
                lo_closed,
                hi_closed,
            } => {
                let v = w.coords[*coord];
                let above = if *lo_closed {
                    v >= lo - REGION_TOL
                } else {
                    v > lo + REGION_TOL
                };
                let below = if *hi_closed {
                    v <= hi + REGION_TOL
                } else {
                    v < hi - REGION_TOL
                };
                above && below
            }
        }
    }
}

/// Closed-form value of a solution map on one region. Coordinates are
/// expressions in the weight variables `xi1..xim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "snake_case")]
pub enum OracleSet {
    Empty,
    /// Finitely many isolated points.
    Points { points: Vec<Vec<WeightExpr>> },
    /// `origin + t * direction`, `t >= 0`.
    Ray {
        origin: Vec<WeightExpr>,
        direction: Vec<f64>,
    },
    Segment {
        from: Vec<WeightExpr>,
        to: Vec<WeightExpr>,
    },
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

/// An expression over weight coordinates, serialized as its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightExpr(pub Expr);

impl Serialize for WeightExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.0.source())
    }
}

impl<'de> Deserialize<'de> for WeightExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Expr::parse_weight(&s, usize::MAX)
            .map(WeightExpr)
            .map_err(serde::de::Error::custom)
    }
}

fn wexprs(m: usize, srcs: &[&str]) -> Vec<WeightExpr> {
    srcs.iter()
        .map(|s| WeightExpr(Expr::parse_weight(s, m).expect("builtin oracle formula")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OraclePiece {
    #[serde(flatten)]
    pub region: WeightRegion,
    pub value: OracleSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleMap {
    /// Which scalarization the map describes.
    pub kind: ScalarizationKind,
    /// Weights matched by no piece are outside the domain.
    pub pieces: Vec<OraclePiece>,
    pub image_components_expected: usize,
    pub dom_closed_expected: bool,
    pub components_unbounded_expected: bool,
}

/// Discretized oracle value inside a window.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleValue {
    Empty,
    Set {
        points: Vec<Vec<f64>>,
        /// Connected-piece label of each point.
        clusters: Vec<usize>,
        value_unbounded: bool,
    },
}

impl OracleValue {
    pub fn points(&self) -> &[Vec<f64>] {
        match self {
            OracleValue::Empty => &[],
            OracleValue::Set { points, .. } => points,
        }
    }
}

/// Number of samples per axis used for bounded oracle sets.
pub const ORACLE_BOUNDED_SAMPLES: usize = 129;
/// Unbounded oracle pieces are sampled with step `window_radius / ORACLE_RAY_DIVISIONS`.
pub const ORACLE_RAY_DIVISIONS: f64 = 256.0;

#[derive(Debug, Clone, PartialEq)]
pub struct VectorProblem {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub objectives: Vec<Expr>,
    pub feasible: FeasibleSet,
    pub tags: Tags,
    pub oracle: Option<OracleMap>,
    /// Free-form description shown by the catalog listing.
    pub description: String,
}

impl VectorProblem {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        objectives: Vec<Expr>,
        feasible: FeasibleSet,
        tags: Tags,
    ) -> Result<Self> {
        let p = VectorProblem {
            name: name.into(),
            n,
            m: objectives.len(),
            objectives,
            feasible,
            tags,
            oracle: None,
            description: String::new(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_oracle(mut self, oracle: OracleMap) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn with_description(mut self, d: impl Into<String>) -> Self {
        self.description = d.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidProblem("n and m must be positive".into()));
        }
        if self.objectives.len() != self.m {
            return Err(Error::InvalidProblem("objective count differs from m".into()));
        }
        if let Some(f) = self.objectives.iter().find(|f| f.referenced_arity() > self.n) {
            return Err(Error::InvalidProblem(format!(
                "objective `{f}` references variables beyond x{}",
                self.n
            )));
        }
        self.feasible.validate(self.n)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        contains(&self.feasible, x, tol)
    }
}

/// Objective vector `(f_1(x), .., f_m(x))`.
pub fn evaluate(problem: &VectorProblem, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != problem.n {
        return Err(Error::Dimension {
            expected: problem.n,
            got: x.len(),
        });
    }
    problem
        .objectives
        .iter()
        .map(|f| f.eval(x).map_err(Error::from))
        .collect()
}

/// Value of the closed-form solution map at `w`, discretized inside
/// `[-window_radius, window_radius]^n`.
pub fn oracle_eval(problem: &VectorProblem, w: &Weight, window_radius: f64) -> Result<OracleValue> {
    let oracle = problem
        .oracle
        .as_ref()
        .ok_or_else(|| Error::NoOracle(problem.name.clone()))?;
    if w.coords.len() != problem.m {
        return Err(Error::Dimension {
            expected: problem.m,
            got: w.coords.len(),
        });
    }
    let Some(piece) = oracle.pieces.iter().find(|p| p.region.matches(w)) else {
        return Ok(OracleValue::Empty);
    };
    let at = |exprs: &[WeightExpr]| -> Result<Vec<f64>> {
        exprs
            .iter()
            .map(|e| e.0.eval(&w.coords).map_err(Error::from))
            .collect()
    };
    let inside = |p: &[f64]| p.iter().all(|c| c.abs() <= window_radius * (1.0 + 1e-12));
    match &piece.value {
        OracleSet::Empty => Ok(OracleValue::Empty),
        OracleSet::Points { points } => {
            let pts: Vec<Vec<f64>> = points
                .iter()
                .map(|p| at(p))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|p| inside(p))
                .collect();
            let clusters = (0..pts.len()).collect();
            Ok(OracleValue::Set {
                points: pts,
                clusters,
                value_unbounded: false,
            })
        }
        OracleSet::Ray { origin, direction } => {
            let origin = at(origin)?;
            let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
            let step = window_radius / ORACLE_RAY_DIVISIONS;
            let mut pts = Vec::new();
            for k in 0.. {
                let t = k as f64 * step;
                let p: Vec<f64> = origin
                    .iter()
                    .zip(direction)
                    .map(|(o, d)| o + t * d / norm)
                    .collect();
                if !inside(&p) {
                    break;
                }
                pts.push(p);
            }
            let clusters = vec![0; pts.len()];
            Ok(OracleValue::Set {
                points: pts,
                clusters,
                value_unbounded: true,
            })
        }
        OracleSet::Segment { from, to } => {
            let a = at(from)?;
            let b = at(to)?;
            let k = ORACLE_BOUNDED_SAMPLES - 1;
            let pts: Vec<Vec<f64>> = (0..=k)
                .map(|j| {
                    let t = j as f64 / k as f64;
                    a.iter().zip(&b).map(|(x, y)| x + t * (y - x)).collect()
                })
                .filter(|p: &Vec<f64>| inside(p))
                .collect();
            let clusters = vec![0; pts.len()];
            Ok(OracleValue::Set {
                points: pts,
                clusters,
                value_unbounded: false,
            })
        }
        OracleSet::Box { lower, upper } => {
            let mut unbounded = false;
            let axes: Vec<Vec<f64>> = lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| {
                    if !l.is_finite() || !u.is_finite() {
                        unbounded = true;
                    }
                    let lo = l.max(-window_radius);
                    let hi = u.min(window_radius);
                    lattice_axis(lo, hi, ORACLE_BOUNDED_SAMPLES)
                })
                .collect();
            let pts = cartesian(&axes);
            let clusters = vec![0; pts.len()];
            Ok(OracleValue::Set {
                points: pts,
                clusters,
                value_unbounded: unbounded,
            })
        }
    }
}

/// Exact Euclidean distance from `x` to the (untruncated) oracle set at `w`;
/// `None` outside the printed domain.
pub fn oracle_set_distance(problem: &VectorProblem, w: &Weight, x: &[f64]) -> Result<Option<f64>> {
    let oracle = problem
        .oracle
        .as_ref()
        .ok_or_else(|| Error::NoOracle(problem.name.clone()))?;
    let Some(piece) = oracle.pieces.iter().find(|p| p.region.matches(w)) else {
        return Ok(None);
    };
    let at = |exprs: &[WeightExpr]| -> Result<Vec<f64>> {
        exprs
            .iter()
            .map(|e| e.0.eval(&w.coords).map_err(Error::from))
            .collect()
    };
    let d = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt()
    };
    let along = |o: &[f64], dir: &[f64], t_max: f64| -> f64 {
        let dd: f64 = dir.iter().map(|v| v * v).sum();
        let t = if dd > 0.0 {
            (x.iter().zip(o).zip(dir).map(|((xi, oi), di)| (xi - oi) * di).sum::<f64>() / dd)
                .clamp(0.0, t_max)
        } else {
            0.0
        };
        let p: Vec<f64> = o.iter().zip(dir).map(|(oi, di)| oi + t * di).collect();
        d(x, &p)
    };
    Ok(match &piece.value {
        OracleSet::Empty => None,
        OracleSet::Points { points } => {
            let mut best = f64::INFINITY;
            for p in points {
                best = best.min(d(x, &at(p)?));
            }
            Some(best)
        }
        OracleSet::Ray { origin, direction } => Some(along(&at(origin)?, direction, f64::INFINITY)),
        OracleSet::Segment { from, to } => {
            let a = at(from)?;
            let b = at(to)?;
            let dir: Vec<f64> = b.iter().zip(&a).map(|(p, q)| p - q).collect();
            Some(along(&a, &dir, 1.0))
        }
        OracleSet::Box { lower, upper } => {
            let p: Vec<f64> = x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| v.clamp(*l, *u))
                .collect();
            Some(d(x, &p))
        }
    })
}

/// `count` evenly spaced values on `[lo, hi]`; a single value if the interval is degenerate.
pub(crate) fn lattice_axis(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let k = (count - 1) as f64;
    (0..count)
        .map(|j| {
            if j == count - 1 {
                hi
            } else {
                lo + (hi - lo) * (j as f64 / k)
            }
        })
        .collect()
}

pub(crate) fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(axes.len())];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &v in axis {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// On-disk problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub objectives: Vec<String>,
    pub feasible: FeasibleFile,
    #[serde(default)]
    pub tags: Tags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleMap>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum FeasibleFile {
    WholeSpace {
        #[serde(default)]
        witness: Option<Vec<f64>>,
    },
    Box {
        #[serde(with = "ext_real")]
        lower: Vec<f64>,
        #[serde(with = "ext_real")]
        upper: Vec<f64>,
        witness: Vec<f64>,
    },
    Sublevel {
        constraints: Vec<String>,
        witness: Vec<f64>,
    },
}

impl ProblemFile {
    pub fn into_problem(self) -> Result<VectorProblem> {
        let n = self.n;
        if self.objectives.len() != self.m {
            return Err(Error::InvalidProblem(format!(
                "declared m = {} but {} objectives given",
                self.m,
                self.objectives.len()
            )));
        }
        let objectives = self
            .objectives
            .iter()
            .map(|s| Expr::parse(s, n))
            .collect::<Result<Vec<_>>>()?;
        let feasible = match self.feasible {
            FeasibleFile::WholeSpace { witness } => FeasibleSet {
                kind: FeasibleKind::WholeSpace,
                witness: witness.unwrap_or_else(|| vec![0.0; n]),
            },
            FeasibleFile::Box {
                lower,
                upper,
                witness,
            } => FeasibleSet::boxed(lower, upper, witness),
            FeasibleFile::Sublevel {
                constraints,
                witness,
            } => FeasibleSet::sublevel(
                constraints
                    .iter()
                    .map(|s| Expr::parse(s, n))
                    .collect::<Result<Vec<_>>>()?,
                witness,
            ),
        };
        let mut p = VectorProblem::new(self.name, n, objectives, feasible, self.tags)?;
        if let Some(oracle) = self.oracle {
            for piece in &oracle.pieces {
                let exprs: Vec<&WeightExpr> = match &piece.value {
                    OracleSet::Points { points } => points.iter().flatten().collect(),
                    OracleSet::Ray { origin, .. } => origin.iter().collect(),
                    OracleSet::Segment { from, to } => from.iter().chain(to).collect(),
                    _ => Vec::new(),
                };
                if exprs.iter().any(|e| e.0.referenced_arity() > p.m) {
                    return Err(Error::InvalidProblem(
                        "oracle formula references weights beyond m".into(),
                    ));
                }
            }
            p.oracle = Some(oracle);
        }
        p.description = self.description;
        Ok(p)
    }

    pub fn from_problem(p: &VectorProblem) -> Self {
        let feasible = match &p.feasible.kind {
            FeasibleKind::WholeSpace => FeasibleFile::WholeSpace {
                witness: Some(p.feasible.witness.clone()),
            },
            FeasibleKind::Box { lower, upper } => FeasibleFile::Box {
                lower: lower.clone(),
                upper: upper.clone(),
                witness: p.feasible.witness.clone(),
            },
            FeasibleKind::Sublevel { constraints } => FeasibleFile::Sublevel {
                constraints: constraints.iter().map(|c| c.source().to_string()).collect(),
                witness: p.feasible.witness.clone(),
            },
        };
        ProblemFile {
            name: p.name.clone(),
            n: p.n,
            m: p.m,
            objectives: p.objectives.iter().map(|f| f.source().to_string()).collect(),
            feasible,
            tags: p.tags,
            oracle: p.oracle.clone(),
            description: p.description.clone(),
        }
    }
}

pub fn load_problem(path: &std::path::Path) -> Result<VectorProblem> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: ProblemFile = serde_json::from_str(&text)?;
    file.into_problem()
}

pub const BUILTIN_NAMES: [&str; 6] = [
    "nonconvex_quartic",
    "linear_fractional",
    "monotone_affine",
    "warburton_quasiconvex",
    "rectangle_identity",
    "convex_quadratic",
];

fn objectives(n: usize, srcs: &[&str]) -> Vec<Expr> {
    srcs.iter()
        .map(|s| Expr::parse(s, n).expect("builtin objective"))
        .collect()
}

fn points_piece(region: WeightRegion, points: &[&[&str]]) -> OraclePiece {
    OraclePiece {
        region,
        value: OracleSet::Points {
            points: points.iter().map(|p| wexprs(2, p)).collect(),
        },
    }
}

/// Builtin catalog problems.
pub fn builtin(name: &str) -> Result<VectorProblem> {
    let p = match name {
        "nonconvex_quartic" => VectorProblem::new(
            name,
            2,
            objectives(2, &["x1^4 - 2*x2", "-2*x1^2 + x2^2"]),
            FeasibleSet::whole_space(2),
            Tags::default(),
        )?
        .with_description(
            "nonconvex bicriteria quartic on R^2; weighted-sum map defined on the open interval \
             0 < xi1 < 1 with two minimizers on x1^2 x2 = 1",
        )
        .with_oracle(OracleMap {
            kind: ScalarizationKind::WeightedSum,
            pieces: vec![points_piece(
                WeightRegion::open(0, 0.0, 1.0),
                &[
                    &["((1 - xi1)/xi1)^0.5", "xi1/(1 - xi1)"],
                    &["-((1 - xi1)/xi1)^0.5", "xi1/(1 - xi1)"],
                ],
            )],
            image_components_expected: 2,
            dom_closed_expected: false,
            components_unbounded_expected: true,
        }),
        "linear_fractional" => VectorProblem::new(
            name,
            2,
            objectives(2, &["(x1 + 1)/(2*x1 + x2)", "(-x1 - 2)/(x1 + x2)"]),
            FeasibleSet::sublevel(objectives(2, &["-x1", "-x2", "1 - x1 - x2"]), vec![1.0, 0.0]),
            Tags::default(),
        )?
        .with_description(
            "linear fractional bicriteria problem on x >= 0, x1 + x2 >= 1; the attached oracle is \
             a closed-form piecewise map (two rays at xi1 = 1/2 and 2/3)",
        )
        .with_oracle(OracleMap {
            kind: ScalarizationKind::WeightedSum,
            pieces: vec![
                points_piece(WeightRegion::half_open(0, 0.0, 0.5, true), &[&["1", "0"]]),
                OraclePiece {
                    region: WeightRegion::point(0, 0.5),
                    value: OracleSet::Ray {
                        origin: wexprs(2, &["1", "0"]),
                        direction: vec![1.0, 0.0],
                    },
                },
                points_piece(
                    WeightRegion::open(0, 0.5, 2.0 / 3.0),
                    &[&["(2 - 3*xi1)/(2*xi1 - 1)", "2"]],
                ),
                OraclePiece {
                    region: WeightRegion::point(0, 2.0 / 3.0),
                    value: OracleSet::Ray {
                        origin: wexprs(2, &["0", "2"]),
                        direction: vec![0.0, 1.0],
                    },
                },
            ],
            image_components_expected: 2,
            dom_closed_expected: true,
            components_unbounded_expected: true,
        }),
        "monotone_affine" => VectorProblem::new(
            name,
            2,
            objectives(
                2,
                &[
                    "4/(x1 - x2)^2 + 4/(x1 - x2) + (x1 + x2)^2/4",
                    "4/(x1 - x2)^2 - 4/(x1 - x2) + (x1 + x2)^2/4",
                ],
            ),
            FeasibleSet {
                kind: FeasibleKind::WholeSpace,
                witness: vec![1.0, -1.0],
            },
            Tags::default(),
        )?
        .with_description(
            "monotone affine specimen on R^2; surrogate objectives whose weighted-sum map is \
             (1/(1-2 xi1), -1/(1-2 xi1)) off xi1 = 1/2",
        )
        .with_oracle(OracleMap {
            kind: ScalarizationKind::WeightedSum,
            pieces: vec![
                points_piece(
                    WeightRegion::half_open(0, 0.0, 0.5, true),
                    &[&["1/(1 - 2*xi1)", "-1/(1 - 2*xi1)"]],
                ),
                points_piece(
                    WeightRegion::half_open(0, 0.5, 1.0, false),
                    &[&["1/(1 - 2*xi1)", "-1/(1 - 2*xi1)"]],
                ),
            ],
            image_components_expected: 2,
            dom_closed_expected: false,
            components_unbounded_expected: true,
        }),
        "warburton_quasiconvex" => VectorProblem::new(
            name,
            2,
            objectives(2, &["x1/(x1 + x2 - 1)", "x1/(x1 - x2 + 3)"]),
            FeasibleSet::boxed(
                vec![2.0, 0.0],
                vec![f64::INFINITY, 4.0],
                vec![2.0, 0.0],
            ),
            Tags {
                convexity: ConvexityTag::Quasiconvex,
                lower_bound: LowerBoundTag::StrictlyBoundedBelowByZero,
            },
        )?
        .with_description(
            "quasiconvex linear-fractional pair on {x1 >= 2, 0 <= x2 <= 4}; the attached oracle is \
             a closed-form weighted-max map (two parallel rays)",
        )
        .with_oracle(OracleMap {
            kind: ScalarizationKind::WeightedMax,
            pieces: vec![
                points_piece(
                    WeightRegion::half_open(0, 1.0 / 6.0, 0.5, true),
                    &[&["(1 + 2*xi1)/(1 - 2*xi1)", "0"]],
                ),
                points_piece(
                    WeightRegion::half_open(0, 0.5, 5.0 / 6.0, false),
                    &[&["(3 - 2*xi1)/(2*xi1 - 1)", "4"]],
                ),
            ],
            image_components_expected: 2,
            dom_closed_expected: false,
            components_unbounded_expected: true,
        }),
        "rectangle_identity" => VectorProblem::new(
            name,
            2,
            objectives(2, &["x1", "x2"]),
            FeasibleSet::boxed(vec![-1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]),
            Tags {
                convexity: ConvexityTag::Convex,
                lower_bound: LowerBoundTag::Unknown,
            },
        )?
        .with_description(
            "identity objectives on [-1,0] x [0,1]; weighted-max map is [-1,0] x {0} for \
             xi2 > 0 and all of K at xi2 = 0",
        )
        .with_oracle(OracleMap {
            kind: ScalarizationKind::WeightedMax,
            pieces: vec![
                OraclePiece {
                    region: WeightRegion::half_open(1, 0.0, 1.0, false),
                    value: OracleSet::Segment {
                        from: wexprs(2, &["-1", "0"]),
                        to: wexprs(2, &["0", "0"]),
                    },
                },
                OraclePiece {
                    region: WeightRegion::point(1, 0.0),
                    value: OracleSet::Box {
                        lower: vec![-1.0, 0.0],
                        upper: vec![0.0, 1.0],
                    },
                },
            ],
            image_components_expected: 1,
            dom_closed_expected: true,
            components_unbounded_expected: false,
        }),
        "convex_quadratic" => VectorProblem::new(
            name,
            2,
            objectives(2, &["x1^2 - x2", "-x1 + x2^2"]),
            FeasibleSet::boxed(
                vec![0.0, 0.0],
                vec![f64::INFINITY, f64::INFINITY],
                vec![0.0, 0.0],
            ),
            Tags {
                convexity: ConvexityTag::ConvexPolynomial,
                lower_bound: LowerBoundTag::Unknown,
            },
        )?
        .with_description(
            "convex polynomial bicriteria problem on the nonnegative quadrant; unique weighted-sum \
             minimizer ((1-xi1)/(2 xi1), xi1/(2(1-xi1))) for 0 < xi1 < 1",
        )
        .with_oracle(OracleMap {
            kind: ScalarizationKind::WeightedSum,
            pieces: vec![points_piece(
                WeightRegion::open(0, 0.0, 1.0),
                &[&["(1 - xi1)/(2*xi1)", "xi1/(2*(1 - xi1))"]],
            )],
            image_components_expected: 1,
            dom_closed_expected: false,
            components_unbounded_expected: true,
        }),
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalarize::simplex_grid;

    fn w2(a: f64) -> Weight {
        Weight::new(vec![a, 1.0 - a]).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let q = builtin("nonconvex_quartic").unwrap();
        assert_eq!(evaluate(&q, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(evaluate(&q, &[1.0, 1.0]).unwrap(), vec![-1.0, -1.0]);
        let c = builtin("convex_quadratic").unwrap();
        assert_eq!(evaluate(&c, &[1.0, 1.0]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(
            evaluate(&q, &[1.0]),
            Err(Error::Dimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn evaluate_domain_error() {
        let lf = builtin("linear_fractional").unwrap();
        assert!(matches!(evaluate(&lf, &[0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn contains_examples() {
        let r = builtin("rectangle_identity").unwrap();
        assert!(r.contains(&[-0.5, 0.5], 0.0).unwrap());
        assert!(!r.contains(&[0.1, 0.5], 0.0).unwrap());
        assert!(r.contains(&[0.1, 0.5], 0.1).unwrap());
        let lf = builtin("linear_fractional").unwrap();
        assert!(lf.contains(&[1.0, 0.0], 0.0).unwrap());
        assert!(!lf.contains(&[0.4, 0.4], 0.0).unwrap());
        assert!(lf.contains(&[0.4, 0.4], 0.2).unwrap());
        assert!(FeasibleSet::whole_space(2).witness.len() == 2);
        assert!(contains(&FeasibleSet::whole_space(2), &[1.0], 0.0).is_err());
    }

    #[test]
    fn builtin_catalog_metadata() {
        let q = builtin("nonconvex_quartic").unwrap();
        assert_eq!((q.n, q.m), (2, 2));
        assert_eq!(q.feasible.kind, FeasibleKind::WholeSpace);
        let o = q.oracle.as_ref().unwrap();
        assert!(!o.dom_closed_expected);
        assert_eq!(o.image_components_expected, 2);
        assert!(o.components_unbounded_expected);

        let w = builtin("warburton_quasiconvex").unwrap();
        assert_eq!(w.tags.lower_bound, LowerBoundTag::StrictlyBoundedBelowByZero);
        assert!(w.contains(&[2.0, 4.0], 0.0).unwrap());
        assert!(!w.contains(&[1.9, 1.0], 0.0).unwrap());
        assert!(!w.contains(&[3.0, 4.1], 0.0).unwrap());
        let x = [3.0, 1.0];
        assert_eq!(evaluate(&w, &x).unwrap(), vec![1.0, 0.6]);

        assert!(matches!(builtin("nope"), Err(Error::UnknownBuiltin(_))));
        for name in BUILTIN_NAMES {
            let p = builtin(name).unwrap();
            assert!(p.contains(&p.feasible.witness, 0.0).unwrap(), "{name}");
            assert!(p.oracle.is_some(), "{name}");
        }
    }

    #[test]
    fn oracle_eval_examples() {
        let q = builtin("nonconvex_quartic").unwrap();
        let v = oracle_eval(&q, &w2(0.5), 256.0).unwrap();
        let mut pts = v.points().to_vec();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(pts, vec![vec![-1.0, 1.0], vec![1.0, 1.0]]);
        assert_eq!(oracle_eval(&q, &w2(0.0), 256.0).unwrap(), OracleValue::Empty);

        let lf = builtin("linear_fractional").unwrap();
        let v = oracle_eval(&lf, &w2(0.6), 256.0).unwrap();
        let p = &v.points()[0];
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1] == 2.0);

        let ma = builtin("monotone_affine").unwrap();
        assert_eq!(
            oracle_eval(&ma, &w2(0.0), 256.0).unwrap().points(),
            &[vec![1.0, -1.0]]
        );
        assert_eq!(oracle_eval(&ma, &w2(0.5), 256.0).unwrap(), OracleValue::Empty);

        let plain = VectorProblem::new(
            "plain",
            1,
            objectives(1, &["x1^2"]),
            FeasibleSet::whole_space(1),
            Tags::default(),
        )
        .unwrap();
        assert!(matches!(
            oracle_eval(&plain, &Weight::new(vec![1.0]).unwrap(), 4.0),
            Err(Error::NoOracle(_))
        ));
    }

    #[test]
    fn oracle_set_distances() {
        let lf = builtin("linear_fractional").unwrap();
        let d = oracle_set_distance(&lf, &w2(0.5), &[7.0, 0.5]).unwrap().unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        let d = oracle_set_distance(&lf, &w2(0.5), &[0.0, 0.0]).unwrap().unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert_eq!(oracle_set_distance(&lf, &w2(0.9), &[0.0, 0.0]).unwrap(), None);
        let r = builtin("rectangle_identity").unwrap();
        let d = oracle_set_distance(&r, &w2(0.5), &[-0.5, 0.25]).unwrap().unwrap();
        assert!((d - 0.25).abs() < 1e-12);
        let d = oracle_set_distance(&r, &w2(1.0), &[1.0, 0.5]).unwrap().unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        let q = builtin("nonconvex_quartic").unwrap();
        let d = oracle_set_distance(&q, &w2(0.5), &[1.0, 1.5]).unwrap().unwrap();
        assert!((d - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oracle_rays_are_truncated_and_flagged() {
        let lf = builtin("linear_fractional").unwrap();
        match oracle_eval(&lf, &w2(0.5), 16.0).unwrap() {
            OracleValue::Set {
                points,
                value_unbounded,
                ..
            } => {
                assert!(value_unbounded);
                assert_eq!(points[0], vec![1.0, 0.0]);
                assert_eq!(points[1], vec![1.0 + 16.0 / 256.0, 0.0]);
                assert!(points.iter().all(|p| p[0] <= 16.0));
            }
            OracleValue::Empty => panic!("ray expected"),
        }
    }

    #[test]
    fn rectangle_oracle_pieces() {
        let r = builtin("rectangle_identity").unwrap();
        let seg = oracle_eval(&r, &w2(0.25), 4.0).unwrap();
        assert!(seg.points().iter().all(|p| p[1] == 0.0));
        let full = oracle_eval(&r, &w2(1.0), 4.0).unwrap();
        assert_eq!(full.points().len(), ORACLE_BOUNDED_SAMPLES * ORACLE_BOUNDED_SAMPLES);
    }

    #[test]
    fn oracle_points_are_feasible_on_grids() {
        for name in BUILTIN_NAMES {
            let p = builtin(name).unwrap();
            for w in simplex_grid(p.m, 24) {
                let v = oracle_eval(&p, &w, 256.0).unwrap();
                for x in v.points() {
                    assert!(p.contains(x, 1e-9).unwrap(), "{name} {:?} {x:?}", w.coords);
                }
            }
        }
    }

    #[test]
    fn quartic_oracle_lies_on_the_printed_curve() {
        let q = builtin("nonconvex_quartic").unwrap();
        for w in simplex_grid(2, 64) {
            for x in oracle_eval(&q, &w, 256.0).unwrap().points() {
                assert!((x[0] * x[0] * x[1] - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn evaluate_is_bitwise_repeatable() {
        let w = builtin("warburton_quasiconvex").unwrap();
        let a = evaluate(&w, &[2.7531, 1.3917]).unwrap();
        let b = evaluate(&w, &[2.7531, 1.3917]).unwrap();
        assert_eq!(
            a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn problem_file_round_trip() {
        for name in BUILTIN_NAMES {
            let p = builtin(name).unwrap();
            let text = serde_json::to_string(&ProblemFile::from_problem(&p)).unwrap();
            let back: ProblemFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back.into_problem().unwrap(), p, "{name}");
        }
    }

    #[test]
    fn problem_file_validation() {
        let bad = r#"{"name":"b","n":1,"m":1,"objectives":["x2"],
                      "feasible":{"variant":"whole_space"}}"#;
        let f: ProblemFile = serde_json::from_str(bad).unwrap();
        assert!(f.into_problem().is_err());
        let bad_box = r#"{"name":"b","n":1,"m":1,"objectives":["x1"],
                      "feasible":{"variant":"box","lower":[1],"upper":[0],"witness":[0]}}"#;
        let f: ProblemFile = serde_json::from_str(bad_box).unwrap();
        assert!(f.into_problem().is_err());
        let ok = r#"{"name":"ok","n":1,"m":1,"objectives":["x1^2"],
                     "feasible":{"variant":"box","lower":["-inf"],"upper":[3],"witness":[0]}}"#;
        let f: ProblemFile = serde_json::from_str(ok).unwrap();
        let p = f.into_problem().unwrap();
        assert!(p.contains(&[-1e9], 0.0).unwrap());
    }
}
