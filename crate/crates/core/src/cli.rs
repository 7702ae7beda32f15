//! Command-line front end. Exit codes: 0 success, 1 oracle tolerance
//! violation, 2 bad input, 3 output failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::diagnose::{run_report, AnalysisReport, KindSelection, ReportOptions, DEFAULT_PROBE_TRIALS};
use crate::error::Error;
use crate::oracle::compare_with_oracle;
use crate::problem::{builtin, load_problem, Tags, VectorProblem, BUILTIN_NAMES};
use crate::scalarize::ScalarizationKind;
use crate::solver::{solve_simplex, SolverConfig};
use crate::svg::render_report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Worker-count variable; `0` or unset lets rayon decide.
pub const THREADS_ENV: &str = "PARETOSCOPE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "paretoscope", version, about = "Sample and diagnose weak Pareto solution mappings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scalarization {
    Auto,
    Sum,
    Max,
    Both,
}

impl From<Scalarization> for KindSelection {
    fn from(s: Scalarization) -> Self {
        match s {
            Scalarization::Auto => KindSelection::Auto,
            Scalarization::Sum => KindSelection::Sum,
            Scalarization::Max => KindSelection::Max,
            Scalarization::Both => KindSelection::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ListFormat {
    Text,
    Json,
}

#[derive(Debug, clap::Args)]
#[group(required = true, multiple = false)]
pub struct ProblemSource {
    /// Name of a builtin problem (see `list-problems`).
    #[arg(long)]
    pub builtin: Option<String>,
    /// Path to a problem JSON file.
    #[arg(long)]
    pub problem: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SolverArgs {
    /// Comma-separated increasing window radii.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long)]
    pub lattice: Option<usize>,
    #[arg(long)]
    pub refine_steps: Option<usize>,
    #[arg(long)]
    pub value_tol: Option<f64>,
    #[arg(long)]
    pub point_tol: Option<f64>,
    #[arg(long)]
    pub escape_decrease: Option<f64>,
    #[arg(long)]
    pub near_opt_band: Option<f64>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut c = SolverConfig::default();
        if let Some(r) = &self.radii {
            c.radii = r.clone();
        }
        if let Some(v) = self.lattice {
            c.lattice_per_axis = v;
        }
        if let Some(v) = self.refine_steps {
            c.refine_steps = v;
        }
        if let Some(v) = self.value_tol {
            c.value_tol = v;
        }
        if let Some(v) = self.point_tol {
            c.point_tol = v;
        }
        if let Some(v) = self.escape_decrease {
            c.escape_decrease_min = v;
        }
        if let Some(v) = self.near_opt_band {
            c.near_opt_band = v;
        }
        c
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full analysis and write a JSON report (and optionally an SVG figure).
    Analyze {
        #[command(flatten)]
        source: ProblemSource,
        #[arg(long, value_enum, default_value = "auto")]
        scalarization: Scalarization,
        /// Simplex grid resolution N (at least 2).
        #[arg(long, default_value_t = crate::diagnose::DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report path; printed to stdout when absent.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        eps_link: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_PROBE_TRIALS)]
        probe_trials: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Compare solver output with the attached closed-form map.
    OracleCheck {
        /// Builtin problem name.
        name: Option<String>,
        /// Problem JSON file with an oracle section, instead of a builtin.
        #[arg(long, conflicts_with = "name")]
        problem: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        resolution: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Print the builtin problem catalog.
    ListProblems {
        #[arg(long, value_enum, default_value = "text")]
        format: ListFormat,
    },
    /// Redraw the SVG figure of a stored report.
    Replot { report: PathBuf, svg: PathBuf },
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError {
            code: EXIT_BAD_INPUT,
            message: e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } => EXIT_IO,
            _ => EXIT_BAD_INPUT,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<i32, CliError>;

fn resolve_problem(source: &ProblemSource) -> std::result::Result<VectorProblem, CliError> {
    match (&source.builtin, &source.problem) {
        (Some(name), _) => Ok(builtin(name)?),
        // an unreadable problem file is bad input, not an output failure
        (None, Some(path)) => load_problem(path).map_err(CliError::input),
        (None, None) => Err(CliError::input("either --builtin or --problem is required")),
    }
}

fn write_output(path: &Path, bytes: &[u8]) -> std::result::Result<(), CliError> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, bytes).map_err(io)?;
    Ok(())
}

fn summary(report: &AnalysisReport) -> String {
    let mut s = format!("{} (N = {})\n", report.problem_name, report.config.resolution);
    for r in &report.results {
        let a = &r.analysis;
        s += &format!(
            "  {}: {}/{} domain weights, {} domain component(s), {} image component(s), {} unbounded, domain {}\n",
            r.kind.label(),
            a.dom_weights,
            a.grid_weights,
            a.domain_components,
            a.components.len(),
            a.unbounded_components(),
            if a.domain.is_closed() { "closed" } else { "non-closed" }
        );
        for c in &r.checks {
            s += &format!(
                "    {:?}: consistent={} mode={:?}\n",
                c.theorem_id, c.consistent, c.mode
            );
        }
    }
    s
}

fn analyze(cmd: Command) -> CliResult {
    let Command::Analyze {
        source,
        scalarization,
        resolution,
        seed,
        json,
        svg,
        eps_link,
        rho,
        probe_trials,
        solver,
    } = cmd
    else {
        unreachable!()
    };
    if resolution < 2 {
        return Err(CliError::input("--resolution must be at least 2"));
    }
    let problem = resolve_problem(&source)?;
    let cfg = solver.config();
    let opts = ReportOptions {
        resolution,
        seed,
        kinds: scalarization.into(),
        eps_link,
        rho,
        probe_trials,
    };
    let report = run_report(&problem, &cfg, &opts)?;
    let text = report.to_json()?;
    let figure = svg.as_ref().map(|_| render_report(&report));
    match &json {
        Some(p) => {
            write_output(p, text.as_bytes())?;
            print!("{}", summary(&report));
        }
        None => print!("{text}"),
    }
    if let (Some(p), Some(f)) = (&svg, figure) {
        write_output(p, f.as_bytes())?;
    }
    Ok(EXIT_OK)
}

fn oracle_check(
    name: Option<String>,
    problem: Option<PathBuf>,
    resolution: usize,
    solver: SolverArgs,
) -> CliResult {
    if resolution < 2 {
        return Err(CliError::input("--resolution must be at least 2"));
    }
    let p = resolve_problem(&ProblemSource {
        builtin: name,
        problem,
    })?;
    let oracle = p.oracle.as_ref().ok_or_else(|| Error::NoOracle(p.name.clone()))?;
    let cfg = solver.config();
    let g = solve_simplex(&p, oracle.kind, resolution, &cfg)?;
    let c = compare_with_oracle(&p, &g)?;
    let mut out = std::io::stdout().lock();
    for w in &c.weights {
        let _ = writeln!(
            out,
            "xi={:?} oracle_dom={} solver_dom={} hausdorff={} tol={} {}",
            w.weight,
            w.oracle_in_domain,
            w.solver_in_domain,
            w.hausdorff.map_or("-".into(), |h| format!("{h:.3e}")),
            w.tolerance.map_or("-".into(), |t| format!("{t:.3e}")),
            if w.ok { "ok" } else { "FAIL" }
        );
    }
    let _ = writeln!(
        out,
        "{} {}: max hausdorff {:.3e}, max ratio {:.3}, domain mismatches {}",
        p.name,
        oracle.kind.label(),
        c.max_hausdorff,
        c.max_ratio,
        c.domain_mismatches
    );
    if c.all_ok {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(out, "tolerance violated; worst weight {:?}", c.worst_weight);
        Ok(EXIT_TOLERANCE)
    }
}

#[derive(Serialize)]
struct CatalogEntry {
    name: String,
    n: usize,
    m: usize,
    tags: Tags,
    oracle: Option<ScalarizationKind>,
    description: String,
}

fn list_problems(format: ListFormat) -> CliResult {
    let entries = BUILTIN_NAMES
        .iter()
        .map(|name| {
            let p = builtin(name)?;
            Ok(CatalogEntry {
                name: p.name.clone(),
                n: p.n,
                m: p.m,
                tags: p.tags,
                oracle: p.oracle.as_ref().map(|o| o.kind),
                description: p.description.clone(),
            })
        })
        .collect::<crate::Result<Vec<_>>>()?;
    match format {
        ListFormat::Json => print!("{}", crate::json::to_string(&entries)?),
        ListFormat::Text => {
            for e in &entries {
                println!(
                    "{}  n={} m={} convexity={:?} lower_bound={:?}  {}",
                    e.name, e.n, e.m, e.tags.convexity, e.tags.lower_bound, e.description
                );
            }
        }
    }
    Ok(EXIT_OK)
}

fn replot(report: &Path, svg: &Path) -> CliResult {
    let text = std::fs::read_to_string(report).map_err(|e| CliError::input(format!("{}: {e}", report.display())))?;
    let r = AnalysisReport::from_json(&text).map_err(CliError::input)?;
    write_output(svg, render_report(&r).as_bytes())?;
    Ok(EXIT_OK)
}

/// Sets up the global worker pool from [`THREADS_ENV`].
fn init_threads() -> std::result::Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::input(format!("{THREADS_ENV} must be a non-negative integer, got `{raw}`")))?;
    if n > 0 {
        // a pool installed earlier in the process wins; nothing to do then
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn execute(cli: Cli) -> CliResult {
    init_threads()?;
    match cli.command {
        cmd @ Command::Analyze { .. } => analyze(cmd),
        Command::OracleCheck {
            name,
            problem,
            resolution,
            solver,
        } => oracle_check(name, problem, resolution, solver),
        Command::ListProblems { format } => list_problems(format),
        Command::Replot { report, svg } => replot(&report, &svg),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
