//! Convergence-experiment harness behind the `logspec` binary.

pub mod builtins;
pub mod legendre;
pub mod report;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{
    default_oversample, interpolate, project, projection_error_bound, reference_rule, singular_coeff,
    singular_tail_norm, weighted_error, WeightSpec,
};
use crate::error::{Error, Result};
use crate::logbasis::{gauss_glof, glof_eval_all, BasisParams, Expansion};
use crate::solvers::{max_diff_uniform, solve_bvp, solve_ivp, BvpProblem, IvpProblem, RhsMode, ScalarFn, SolverConfig};
use crate::spacetime::{l2_distance, l2_error, solve_diffusion, DiffusionProblem, SpaceTimeSolution};
use crate::special::gamma;

use builtins::{Builtin, Builtin2d};
use legendre::ShiftedLegendre;
pub use report::{ConvergenceReport, Format, ReportRow};

/// Exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

/// Number of uniform sample points for maximum errors.
const LINF_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Dump Gauss-GLOF nodes and weights.
    Nodes,
    /// Quadrature error of the Gauss-GLOF rule.
    Quad,
    /// Projection error.
    Project,
    /// Interpolation error.
    Interp,
    /// Closed-form projection error of t^r(-log t)^k against its bound.
    Bound,
    /// Caputo initial-value problem.
    Ivp,
    /// Riemann-Liouville boundary-value problem.
    Bvp,
    /// Time-fractional diffusion on (-1,1)^2.
    Diffusion,
    /// Values of S_n on the uniform sample grid.
    Values,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Reference {
    Exact,
    #[value(name = "self")]
    SelfRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Compare {
    Legendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rhs {
    Interpolate,
    Project,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    Nt,
    Nx,
}

/// Spectral approximation with log orthogonal functions: convergence experiments.
#[derive(Debug, Clone, Parser)]
#[command(name = "logspec", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Degree sweep `A..B..S`, `A..B` or a single `N`.
    #[arg(long, default_value = "4..40..4")]
    pub n: String,
    /// Spatial degree for `diffusion`.
    #[arg(long, default_value_t = 16)]
    pub nx: usize,
    /// Time degree for `diffusion --sweep nx`.
    #[arg(long, default_value_t = 40)]
    pub nt: usize,
    /// Inner quadrature index (default 2N+16).
    #[arg(long)]
    pub ni: Option<usize>,
    /// Swept resolution for `diffusion`.
    #[arg(long, value_enum, default_value_t = Sweep::Nt)]
    pub sweep: Sweep,
    /// Target function, or exact solution for the solver commands.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub u0: Option<f64>,
    #[arg(long = "T", default_value_t = 1.0)]
    pub t_final: f64,
    #[arg(long, value_enum)]
    pub reference: Option<Reference>,
    #[arg(long, value_enum)]
    pub compare: Option<Compare>,
    #[arg(long, value_enum, default_value_t = Rhs::Interpolate)]
    pub rhs: Rhs,
    /// Extra quadrature points for `project`.
    #[arg(long)]
    pub oversample: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Parses `A..B..S`, `A..B` or `A` into an increasing list of degrees.
pub fn parse_sweep(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("bad sweep '{s}', expected A..B..S"));
    let parts: Vec<&str> = s.split("..").collect();
    let nums = parts.iter().map(|p| p.trim().parse::<usize>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
    let (a, b, step) = match nums.as_slice() {
        [a] => (*a, *a, 1),
        [a, b] => (*a, *b, 1),
        [a, b, st] => (*a, *b, *st),
        _ => return Err(bad()),
    };
    if step == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).step_by(step).collect())
}

/// Error class to exit status.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// Output of one run: a convergence report, or a table of another shape.
pub enum Output {
    Report(ConvergenceReport),
    Nodes(Vec<NodeRow>),
    Pointwise(Vec<PointRow>),
    Values(Vec<ValueRow>),
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub j: usize,
    pub node: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: f64,
    pub glof_error: f64,
    pub legendre_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValueRow {
    pub n: usize,
    pub t: f64,
    pub value: f64,
}

impl Output {
    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match self {
            Self::Report(r) => r.write(format, out),
            Self::Nodes(rows) => report::write_rows(rows, format, out),
            Self::Pointwise(rows) => report::write_rows(rows, format, out),
            Self::Values(rows) => report::write_rows(rows, format, out),
        }
    }

    pub fn summary(&self) -> String {
        match self {
            Self::Report(r) => r.summary(),
            Self::Nodes(rows) => format!("{} nodes\n", rows.len()),
            Self::Values(rows) => {
                let (lo, hi) =
                    rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.value), b.max(r.value)));
                format!("{} values in [{lo:.3e}, {hi:.3e}]\n", rows.len())
            }
            Self::Pointwise(rows) => {
                let worst = |f: fn(&PointRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
                format!(
                    "{} points, max GLOF error {:.3e}, max Legendre error {:.3e}\n",
                    rows.len(),
                    worst(|r| r.glof_error),
                    worst(|r| r.legendre_error)
                )
            }
        }
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn sample_points() -> impl Iterator<Item = f64> {
    (1..=LINF_POINTS).map(|i| i as f64 / LINF_POINTS as f64)
}

fn linf_open<F: Fn(f64) -> Result<f64>>(f: F) -> Result<f64> {
    let mut worst = 0.0f64;
    for t in sample_points() {
        let d = f(t)?.abs();
        if !d.is_finite() {
            return Err(Error::NonFinite { value: d, at: t, context: "pointwise error".into() });
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Plain `L2(0, 1)` norm by the composite reference rule.
fn l2_uniform<F: Fn(f64) -> Result<f64>>(f: F) -> Result<f64> {
    let rule = reference_rule(WeightSpec::uniform())?;
    let mut s = 0.0;
    for (t, w) in rule.iter() {
        let v = f(t)?;
        s += w * v * v;
    }
    Ok(s.sqrt())
}

impl Cli {
    fn params(&self) -> Result<BasisParams> {
        BasisParams::new(self.alpha, self.beta, self.lambda)
    }

    fn func(&self, name: &Option<String>) -> Result<Option<Builtin>> {
        name.as_deref().map(Builtin::parse).transpose()
    }

    fn required(&self, name: &Option<String>, flag: &str) -> Result<Builtin> {
        self.func(name)?.ok_or_else(|| Error::Config(format!("{:?} needs --{flag}", self.command)))
    }

    fn solver_config(&self, params: BasisParams, n: usize) -> Result<SolverConfig> {
        let mut c = SolverConfig::new(params, n)?;
        if let Some(ni) = self.ni {
            c = c.with_inner(ni)?;
        }
        Ok(c.with_rhs_mode(match self.rhs {
            Rhs::Interpolate => RhsMode::Interpolate,
            Rhs::Project => RhsMode::Project,
        }))
    }

    /// Configuration for the self-reference: `N + 8` and a doubled inner rule.
    fn refined_config(&self, params: BasisParams, n: usize) -> Result<SolverConfig> {
        let base = self.solver_config(params, n + 8)?;
        let inner = (2 * base.inner_rule_size).min(crate::laguerre::MAX_RULE_INDEX);
        base.with_inner(inner)
    }
}

/// Runs `f` over the sweep on a pool of `jobs` threads, keeping sweep order.
fn sweep_rows<F>(ns: &[usize], jobs: usize, f: F) -> Result<ConvergenceReport>
where
    F: Fn(usize) -> Result<ReportRow> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| ns.par_iter().map(|&n| f(n)).collect::<Vec<_>>());
    Ok(ConvergenceReport { rows: rows.into_iter().collect::<Result<Vec<_>>>()? })
}

/// Executes the configured experiment.
pub fn run(cli: &Cli) -> Result<Output> {
    let ns = parse_sweep(&cli.n)?;
    if cli.jobs == 0 {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    match cli.command {
        Command::Nodes => run_nodes(cli, &ns),
        Command::Quad => run_quad(cli, &ns),
        Command::Project | Command::Interp => run_approx(cli, &ns),
        Command::Bound => run_bound(cli, &ns),
        Command::Ivp => run_ivp(cli, &ns),
        Command::Bvp => run_bvp(cli, &ns),
        Command::Diffusion => run_diffusion(cli, &ns),
        Command::Values => run_values(cli, &ns),
    }
}

fn run_values(cli: &Cli, ns: &[usize]) -> Result<Output> {
    let params = cli.params()?;
    let top = *ns.iter().max().unwrap();
    let mut rows = Vec::with_capacity(ns.len() * LINF_POINTS);
    for &n in ns {
        for t in sample_points() {
            rows.push(ValueRow { n, t, value: glof_eval_all(&params, top, t)?[n] });
        }
    }
    Ok(Output::Values(rows))
}

fn run_nodes(cli: &Cli, ns: &[usize]) -> Result<Output> {
    let params = cli.params()?;
    let mut rows = Vec::new();
    for &n in ns {
        let rule = gauss_glof(&params, n)?;
        rows.extend(rule.iter().enumerate().map(|(j, (node, weight))| NodeRow { n, j, node, weight }));
    }
    Ok(Output::Nodes(rows))
}

fn run_quad(cli: &Cli, ns: &[usize]) -> Result<Output> {
    let params = cli.params()?;
    let f = cli.required(&cli.f, "f")?;
    let exact = match (f.monomial(), cli.reference) {
        (Some(m), None | Some(Reference::Exact)) => {
            // ∫ t^{r+λ} (-log t)^{k+α} dt
            let e = cli.lambda + m.r + 1.0;
            if !(e > 0.0) {
                return Err(Error::Domain(format!("integral of t^{} diverges", m.r + cli.lambda)));
            }
            let a = m.k as f64 + cli.alpha;
            gamma(a + 1.0) / e.powf(a + 1.0)
        }
        (_, Some(Reference::SelfRef)) => gauss_glof(&params, ns.iter().max().unwrap() + 8)?.integrate(|t| f.eval(t)),
        (None, _) => reference_rule(WeightSpec::of(&params))?.integrate(|t| f.eval(t)),
    };
    let report = sweep_rows(ns, cli.jobs, |n| {
        let start = Instant::now();
        let approx = gauss_glof(&params, n)?.integrate(|t| f.eval(t));
        let err = (approx - exact).abs();
        if !err.is_finite() {
            return Err(Error::NonFinite { value: err, at: f64::NAN, context: "quadrature".into() });
        }
        Ok(ReportRow { n, error_l2: err, error_linf: err, bound: None, cond: None, runtime_ms: elapsed_ms(start) })
    })?;
    Ok(Output::Report(report))
}

fn approximant(cli: &Cli, params: &BasisParams, f: Builtin, n: usize) -> Result<Expansion> {
    match cli.command {
        Command::Interp => interpolate(params, n, |t| f.eval(t)),
        _ => project(params, n, |t| f.eval(t), cli.oversample.unwrap_or_else(|| default_oversample(n))),
    }
}

fn run_approx(cli: &Cli, ns: &[usize]) -> Result<Output> {
    let params = cli.params()?;
    let f = cli.required(&cli.f, "f")?;
    if cli.compare == Some(Compare::Legendre) {
        let mut rows = Vec::new();
        for &n in ns {
            let e = approximant(cli, &params, f, n)?;
            let leg = ShiftedLegendre::project(|t| f.eval(t), n)?;
            for t in sample_points() {
                let v = f.eval(t);
                rows.push(PointRow {
                    n,
                    t,
                    glof_error: (e.eval(t)? - v).abs(),
                    legendre_error: (leg.eval(t) - v).abs(),
                });
            }
        }
        return Ok(Output::Pointwise(rows));
    }
    let w = WeightSpec::of(&params);
    let rule = reference_rule(w)?;
    let report = sweep_rows(ns, cli.jobs, |n| {
        let start = Instant::now();
        let e = approximant(cli, &params, f, n)?;
        let error_l2 = weighted_error(|t| f.eval(t), &e, w, &rule)?;
        let error_linf = linf_open(|t| Ok(e.eval(t)? - f.eval(t)))?;
        let bound = match (cli.command, f.monomial()) {
            (Command::Project, Some(m)) => projection_error_bound(m, &params, n).ok().map(|b| b.bound),
            _ => None,
        };
        Ok(ReportRow { n, error_l2, error_linf, bound, cond: None, runtime_ms: elapsed_ms(start) })
    })?;
    Ok(Output::Report(report))
}

fn run_bound(cli: &Cli, ns: &[usize]) -> Result<Output> {
    let params = cli.params()?;
    let f = cli.required(&cli.f, "f")?;
    let m = f.monomial().ok_or_else(|| Error::Config("bound needs --f pow:R or powlog:R:K".into()))?;
    let report = sweep_rows(ns, cli.jobs, |n| {
        let start = Instant::now();
        let coeffs = (0..=n).map(|k| singular_coeff(m, &params, k)).collect::<Result<Vec<_>>>()?;
        let e = Expansion::plain(params, coeffs)?;
        let error_l2 = singular_tail_norm(m, &params, n)?;
        let error_linf = linf_open(|t| Ok(e.eval(t)? - m.eval(t)))?;
        let bound = projection_error_bound(m, &params, n).ok().map(|b| b.bound);
        Ok(ReportRow { n, error_l2, error_linf, bound, cond: None, runtime_ms: elapsed_ms(start) })
    })?;
    Ok(Output::Report(report))
}

fn run_ivp(cli: &Cli, ns: &[usize]) -> Result<Output> {
    let params = cli.params()?;
    let exact = cli.func(&cli.f)?;
    let (mut nu, mut q, mut g, mut u0) = (cli.nu, None, None, cli.u0);
    if let Some(Builtin::Mittag { nu: order, k }) = exact {
        nu = nu.or(Some(order));
        q = Some(Builtin::Const(k));
        g = Some(Builtin::Const(0.0));
        u0 = u0.or(Some(1.0));
    }
    let q = cli.func(&cli.q)?.or(q).unwrap_or(Builtin::Const(0.0));
    let g = cli.func(&cli.g)?.or(g).ok_or_else(|| Error::Config("ivp needs --g (or --f mittag:NU:K)".into()))?;
    let nu = nu.ok_or_else(|| Error::Config("ivp needs --nu".into()))?;
    let problem = IvpProblem::new(nu, q.to_fn(), g.to_fn(), u0.unwrap_or(0.0))?;
    let reference = resolve_reference(cli.reference, exact.is_some())?;
    let report = sweep_rows(ns, cli.jobs, |n| {
        let start = Instant::now();
        let sol = solve_ivp(&problem, &cli.solver_config(params, n)?)?;
        let runtime_ms = elapsed_ms(start);
        let (error_l2, error_linf) = match (reference, exact) {
            (Reference::Exact, Some(u)) => (
                l2_uniform(|t| Ok(sol.eval(t)? - u.eval(t)))?,
                max_diff_uniform(|t| sol.eval(t), |t| Ok(u.eval(t)), LINF_POINTS)?,
            ),
            _ => {
                let r = solve_ivp(&problem, &cli.refined_config(params, n)?)?;
                (
                    l2_uniform(|t| Ok(sol.eval(t)? - r.eval(t)?))?,
                    max_diff_uniform(|t| sol.eval(t), |t| r.eval(t), LINF_POINTS)?,
                )
            }
        };
        Ok(ReportRow { n, error_l2, error_linf, bound: None, cond: Some(sol.cond), runtime_ms })
    })?;
    Ok(Output::Report(report))
}

fn resolve_reference(choice: Option<Reference>, has_exact: bool) -> Result<Reference> {
    match (choice, has_exact) {
        (Some(Reference::Exact), false) => {
            Err(Error::Config("--reference exact needs an exact solution via --f".into()))
        }
        (Some(r), _) => Ok(r),
        (None, true) => Ok(Reference::Exact),
        (None, false) => Ok(Reference::SelfRef),
    }
}

fn run_bvp(cli: &Cli, ns: &[usize]) -> Result<Output> {
    let params = cli.params()?;
    let mu = cli.mu.ok_or_else(|| Error::Config("bvp needs --mu".into()))?;
    let exact = cli.func(&cli.f)?;
    let q: ScalarFn = cli.func(&cli.q)?.unwrap_or(Builtin::Const(0.0)).to_fn();
    let g: ScalarFn = match (cli.func(&cli.g)?, exact) {
        (Some(g), _) => g.to_fn(),
        (None, Some(u)) => u.rl_forcing(mu, q.clone())?,
        (None, None) => return Err(Error::Config("bvp needs --g or an exact solution --f bvpu".into())),
    };
    let problem = BvpProblem::new(mu, q, g)?;
    let reference = resolve_reference(cli.reference, exact.is_some())?;
    let report = sweep_rows(ns, cli.jobs, |n| {
        let start = Instant::now();
        let sol = solve_bvp(&problem, &cli.solver_config(params, n)?)?;
        let runtime_ms = elapsed_ms(start);
        let (error_l2, error_linf) = match (reference, exact) {
            (Reference::Exact, Some(u)) => (
                l2_uniform(|t| Ok(sol.eval(t)? - u.eval(t)))?,
                max_diff_uniform(|t| sol.eval(t), |t| Ok(u.eval(t)), LINF_POINTS)?,
            ),
            _ => {
                let r = solve_bvp(&problem, &cli.refined_config(params, n)?)?;
                (
                    l2_uniform(|t| Ok(sol.eval(t)? - r.eval(t)?))?,
                    max_diff_uniform(|t| sol.eval(t), |t| r.eval(t), LINF_POINTS)?,
                )
            }
        };
        Ok(ReportRow { n, error_l2, error_linf, bound: None, cond: Some(sol.cond), runtime_ms })
    })?;
    Ok(Output::Report(report))
}

/// Maximum difference on an 11 x 11 spatial grid at `t = T/4, T/2, T`.
fn diffusion_linf<F: Fn(f64, f64, f64) -> Result<f64>>(sol: &SpaceTimeSolution, other: F) -> Result<f64> {
    let mut worst = 0.0f64;
    let t_final = sol.t_final();
    for &frac in &[0.25, 0.5, 1.0] {
        let t = frac * t_final;
        for a in 0..=10 {
            for b in 0..=10 {
                let (x1, x2) = (-1.0 + 0.2 * a as f64, -1.0 + 0.2 * b as f64);
                worst = worst.max((sol.eval(x1, x2, t)? - other(x1, x2, t)?).abs());
            }
        }
    }
    Ok(worst)
}

fn run_diffusion(cli: &Cli, ns: &[usize]) -> Result<Output> {
    let params = cli.params()?;
    let nu = cli.nu.ok_or_else(|| Error::Config("diffusion needs --nu".into()))?;
    let name = cli.f.clone().unwrap_or_else(|| "expxyt".into());
    let kind = Builtin2d::parse(&name)?;
    let problem = DiffusionProblem::new(nu, kind.forcing(nu)?, cli.t_final)?;
    let reference = resolve_reference(cli.reference, kind.exact().is_some())?;
    let report = sweep_rows(ns, cli.jobs, |n| {
        let (nt, nx) = match cli.sweep {
            Sweep::Nt => (n, cli.nx),
            Sweep::Nx => (cli.nt, n),
        };
        let start = Instant::now();
        let sol = solve_diffusion(&problem, nx, &cli.solver_config(params, nt)?)?;
        let runtime_ms = elapsed_ms(start);
        let (error_l2, error_linf) = match (reference, kind.exact()) {
            (Reference::Exact, Some(u)) => (l2_error(&sol, u)?, diffusion_linf(&sol, |a, b, t| Ok(u(a, b, t)))?),
            _ => {
                // refine only the swept resolution
                let r = match cli.sweep {
                    Sweep::Nt => solve_diffusion(&problem, nx, &cli.solver_config(params, nt + 8)?)?,
                    Sweep::Nx => solve_diffusion(&problem, nx + 4, &cli.solver_config(params, nt)?)?,
                };
                (l2_distance(&sol, &r)?, diffusion_linf(&sol, |a, b, t| r.eval(a, b, t))?)
            }
        };
        Ok(ReportRow { n, error_l2, error_linf, bound: None, cond: Some(sol.cond()), runtime_ms })
    })?;
    Ok(Output::Report(report))
}

/// Parses `args`, runs, writes the output and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("logspec: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let output = run(cli)?;
    match &cli.out {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            output.write(cli.format, &mut w)?;
            w.flush().map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
            print!("{}", output.summary());
        }
        None => {
            let stdout = std::io::stdout();
            output.write(cli.format, stdout.lock())?;
        }
    }
    Ok(())
}
