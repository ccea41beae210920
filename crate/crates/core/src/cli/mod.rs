//! The `qcx` command line: every subcommand loads a problem (a JSON file or
//! a builtin), runs one analysis and prints a JSON report on stdout.
//!
//! Exit codes: 0 positive result, 1 negative result, 2 usage error,
//! 3 numeric failure or violated hypothesis.

pub mod problem_file;
pub mod registry;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::charac::{classify_dichotomy, enumerate_solution_set, membership};
use crate::config::{Config, ConfigOverrides};
use crate::convexity::{check_first_order_qcx, check_levelset_convex, check_pseudoconvex_at, check_quasiconvex};
use crate::error::{Error, Result};
use crate::kkt::{
    check_gmfcq, enumerate_constrained, lagrangian_constancy, member_x1, membership_constrained, solve_multipliers,
};
use crate::model::{CharacVariant, ConstrainedProblem, MultiplierVector, Program, Vector, Window};
use crate::oracle::{agreement, agreement_constrained, brute_force_solutions, require_solution};
use crate::subdiff::{
    default_gp_candidates, default_ml_candidates, gp_solution_check, ml_solution_check_1d, ml_solution_set_1d, MlForm,
};
pub use problem_file::{LoadedProblem, ProblemFile};
pub use registry::Builtin;

pub const CONFIG_ENV: &str = "QCX_CONFIG";
const DEFAULT_RESOLUTION: usize = 21;
const GP_ORTHANT_SAMPLES: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "qcx", version, about = "Solution-set characterizations for quasiconvex programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Tolerances {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eps_grad: Option<f64>,
    #[arg(long)]
    eps_dir: Option<f64>,
    #[arg(long)]
    eps_feas: Option<f64>,
    #[arg(long)]
    eps_act: Option<f64>,
    #[arg(long)]
    eps_lp: Option<f64>,
    #[arg(long)]
    eps_opt: Option<f64>,
}

impl Tolerances {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            eps_grad: self.eps_grad,
            eps_dir: self.eps_dir,
            eps_act: self.eps_act,
            eps_feas: self.eps_feas,
            eps_lp: self.eps_lp,
            eps_opt: self.eps_opt,
            seed: self.seed,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// Problem file (JSON).
    #[arg(long, conflicts_with = "example", required_unless_present = "example")]
    problem: Option<PathBuf>,
    /// Builtin problem name.
    #[arg(long)]
    example: Option<String>,
    /// Grid nodes per axis.
    #[arg(long)]
    resolution: Option<usize>,
    /// Replaces the domain window: lo1,hi1,lo2,hi2,...
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Known solution; defaults to the problem's known_solution.
    #[arg(long, allow_hyphen_values = true)]
    xbar: Option<String>,
    #[command(flatten)]
    tol: Tolerances,
}

#[derive(Args, Debug, Clone)]
struct VariantArgs {
    #[command(flatten)]
    src: Source,
    #[arg(long)]
    variant: CharacVariant,
    /// Multiplier for primed variants; solved for when omitted.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ConvexityTest {
    Quasiconvex,
    FirstOrder,
    LevelSet,
    Pseudoconvex,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Gp,
    Ml,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FormArg {
    M1,
    M2,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Check {
    All,
    Oracle,
    Dichotomy,
    Variants,
    Kkt,
    Subdiff,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dichotomy of the oracle solution set.
    Classify(Source),
    /// Grid points of one variant.
    Enumerate(VariantArgs),
    /// Residuals of one point for one variant.
    VerifyMembership {
        #[command(flatten)]
        args: VariantArgs,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Sampled convexity checks of the objective.
    CheckConvexity {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value = "quasiconvex")]
        test: ConvexityTest,
        /// Level for level-set.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        /// Base point for pseudoconvex.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 16)]
        t_steps: usize,
    },
    /// Lagrange multiplier at the known solution.
    KktSolve(Source),
    /// Grid points of a primed or double-primed variant.
    KktEnumerate(VariantArgs),
    /// Generalized Mangasarian-Fromovitz qualification at the known solution.
    CheckCq(Source),
    /// Subdifferential route: one point with --point, the whole grid otherwise.
    SubdiffCheck {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum)]
        route: Route,
        #[arg(long, value_enum, default_value = "m2")]
        form: FormArg,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Nodes of the ML infimum grid (default 2·resolution − 1 on the doubled window).
        #[arg(long)]
        inf_resolution: Option<usize>,
    },
    /// Brute-force minimizers on the grid.
    Oracle(Source),
    /// Full check of a builtin.
    RunExample {
        name: String,
        #[arg(long, value_enum, default_value = "all")]
        check: Check,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Compare one variant with the oracle.
    Agreement(VariantArgs),
}

/// Parses `args` (program name first), runs the command and writes its JSON
/// report to `out`. Usage messages go to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let env_config = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    match execute(cli.command, env_config) {
        Ok((value, code)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("report serializes"));
            code
        }
        Err(e) => {
            let code = exit_code(&e);
            let report = json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            code
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::DimensionMismatch { .. } | Error::InvalidInput(_) | Error::EmptyGrid => 2,
        Error::NoMultiplier { .. } => 1,
        _ => 3,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::Eval(_) => "eval",
        Error::Lp(_) => "lp",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::InvalidInput(_) => "invalid_input",
        Error::NonPolyhedral => "non_polyhedral",
        Error::NotInSet { .. } => "not_in_set",
        Error::Infeasible { .. } => "infeasible",
        Error::ZeroVector { .. } => "zero_vector",
        Error::InconsistentDichotomy(_) => "inconsistent_dichotomy",
        Error::HypothesisViolated(_) => "hypothesis_violated",
        Error::NoMultiplier { .. } => "no_multiplier",
        Error::NotOpenGroundSet => "not_open_ground_set",
        Error::EmptyGrid => "empty_grid",
        Error::NotASolution { .. } => "not_a_solution",
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn parse_point(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad number {s:?} in {text:?}: {e}"))))
        .collect()
}

fn read_overrides(path: &std::path::Path) -> Result<ConfigOverrides> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("config {}: {e}", path.display())))
}

/// Everything a subcommand needs, after defaults and overrides are applied.
struct Session {
    problem: LoadedProblem,
    builtin: Option<Builtin>,
    cfg: Config,
    resolution: usize,
    xbar: Option<Vec<f64>>,
}

impl Session {
    fn layered_config(env: Option<&PathBuf>, file: &ProblemFile, tol: &Tolerances) -> Result<Config> {
        let mut cfg = Config::default();
        if let Some(path) = env {
            cfg = cfg.with(&read_overrides(path)?);
        }
        if let Some(o) = &file.config {
            cfg = cfg.with(o);
        }
        cfg = cfg.with(&tol.overrides());
        cfg.validate().map_err(Error::InvalidInput)?;
        Ok(cfg)
    }

    fn from_builtin(b: Builtin, tol: &Tolerances, env: Option<&PathBuf>) -> Result<Self> {
        let cfg = Self::layered_config(env, &b.file, tol)?;
        Ok(Session {
            problem: b.file.load()?,
            xbar: b.file.known_solution.clone(),
            resolution: b.resolution,
            builtin: Some(b),
            cfg,
        })
    }

    fn open(src: &Source, env: Option<&PathBuf>) -> Result<Self> {
        let (mut file, builtin) = match (&src.problem, &src.example) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
                (ProblemFile::from_json(&text)?, None)
            }
            (None, Some(name)) => {
                let b = registry::builtin(name).ok_or_else(|| {
                    Error::InvalidInput(format!("unknown example {name:?}; known: {}", registry::NAMES.join(", ")))
                })?;
                (b.file.clone(), Some(b))
            }
            (None, None) => return Err(Error::InvalidInput("give --problem or --example".into())),
        };
        if let Some(w) = &src.window {
            file.domain_window = Window::parse_flat(w)?;
        }
        let cfg = Self::layered_config(env, &file, &src.tol)?;
        let xbar = match &src.xbar {
            Some(t) => Some(parse_point(t)?),
            None => file.known_solution.clone(),
        };
        let resolution = src.resolution.or(builtin.as_ref().map(|b| b.resolution)).unwrap_or(DEFAULT_RESOLUTION);
        Ok(Session { problem: file.load()?, builtin, cfg, resolution, xbar })
    }

    fn program(&self) -> &(dyn Program + Sync) {
        self.problem.program()
    }

    fn xbar(&self) -> Result<&[f64]> {
        self.xbar
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("no known solution: give --xbar or known_solution".into()))
    }

    fn constrained(&self, what: &str) -> Result<&ConstrainedProblem> {
        self.problem
            .constrained()
            .ok_or_else(|| Error::InvalidInput(format!("{what} needs a problem with constraints")))
    }

    fn lambda(&self, flag: Option<&str>) -> Result<MultiplierVector> {
        match flag {
            Some(t) => MultiplierVector::new(parse_point(t)?),
            None => Ok(solve_multipliers(self.constrained("a multiplier")?, self.xbar()?, &self.cfg)?.lambda),
        }
    }
}

fn execute(cmd: Command, env: Option<PathBuf>) -> Result<(Value, i32)> {
    let env = env.as_ref();
    match cmd {
        Command::Classify(src) => {
            let s = Session::open(&src, env)?;
            let oracle = brute_force_solutions(s.program(), s.resolution, s.cfg.eps_opt, &s.cfg)?;
            let report = classify_dichotomy(s.program(), &oracle.solution_points, &s.cfg)?;
            Ok((to_value(&report), 0))
        }
        Command::Enumerate(a) | Command::KktEnumerate(a) => enumerate(&a, env),
        Command::VerifyMembership { args, point } => {
            let s = Session::open(&args.src, env)?;
            let x = parse_point(&point)?;
            let verdict = if args.variant.needs_multipliers() {
                let lambda = s.lambda(args.lambda.as_deref())?;
                membership_constrained(
                    s.constrained("a primed variant")?,
                    s.xbar()?,
                    &lambda,
                    &x,
                    args.variant,
                    &s.cfg,
                )?
            } else {
                membership(s.program(), s.xbar()?, &x, args.variant, &s.cfg)?
            };
            let code = if verdict.member { 0 } else { 1 };
            Ok((to_value(&verdict), code))
        }
        Command::CheckConvexity { src, test, alpha, point, samples, t_steps } => {
            let s = Session::open(&src, env)?;
            let f = s.program().objective();
            let w = s.program().domain_window();
            let (holds, value) = match test {
                ConvexityTest::Quasiconvex => {
                    let r = check_quasiconvex(f, w, samples, t_steps, &s.cfg)?;
                    (r.holds, to_value(&r))
                }
                ConvexityTest::FirstOrder => {
                    let r = check_first_order_qcx(f, w, samples, &s.cfg)?;
                    (r.holds, to_value(&r))
                }
                ConvexityTest::LevelSet => {
                    let alpha = match alpha {
                        Some(a) => a,
                        None => f.eval(s.xbar()?, &s.cfg)?,
                    };
                    let r = check_levelset_convex(f, alpha, w, s.resolution, &s.cfg)?;
                    (r.holds, to_value(&r))
                }
                ConvexityTest::Pseudoconvex => {
                    let x = match &point {
                        Some(t) => parse_point(t)?,
                        None => s.xbar()?.to_vec(),
                    };
                    let r = check_pseudoconvex_at(f, &x, w, samples, &s.cfg)?;
                    (r.holds, to_value(&r))
                }
            };
            Ok((value, if holds { 0 } else { 1 }))
        }
        Command::KktSolve(src) => {
            let s = Session::open(&src, env)?;
            let r = solve_multipliers(s.constrained("kkt-solve")?, s.xbar()?, &s.cfg)?;
            Ok((to_value(&r), 0))
        }
        Command::CheckCq(src) => {
            let s = Session::open(&src, env)?;
            let r = check_gmfcq(s.constrained("check-cq")?, s.xbar()?, &s.cfg)?;
            let code = if r.holds { 0 } else { 1 };
            Ok((to_value(&r), code))
        }
        Command::SubdiffCheck { src, route, form, point, inf_resolution } => {
            let s = Session::open(&src, env)?;
            let point = point.as_deref().map(parse_point).transpose()?;
            let form = match form {
                FormArg::M1 => MlForm::M1,
                FormArg::M2 => MlForm::M2,
            };
            subdiff(&s, route, form, point, inf_resolution)
        }
        Command::Oracle(src) => {
            let s = Session::open(&src, env)?;
            let r = brute_force_solutions(s.program(), s.resolution, s.cfg.eps_opt, &s.cfg)?;
            Ok((to_value(&r), 0))
        }
        Command::RunExample { name, check, tol } => {
            let b = registry::builtin(&name).ok_or_else(|| {
                Error::InvalidInput(format!("unknown example {name:?}; known: {}", registry::NAMES.join(", ")))
            })?;
            let s = Session::from_builtin(b, &tol, env)?;
            run_example(&s, check)
        }
        Command::Agreement(a) => {
            let s = Session::open(&a.src, env)?;
            let xbar = s.xbar()?;
            let r = if a.variant.needs_multipliers() {
                let lambda = s.lambda(a.lambda.as_deref())?;
                let cp = s.constrained("a primed variant")?;
                agreement_constrained(cp, xbar, &lambda, a.variant, s.resolution, s.cfg.eps_opt, &s.cfg)?
            } else {
                agreement(s.program(), xbar, a.variant, s.resolution, s.cfg.eps_opt, &s.cfg)?
            };
            let code = if r.equal { 0 } else { 1 };
            Ok((to_value(&r), code))
        }
    }
}

fn enumerate(a: &VariantArgs, env: Option<&PathBuf>) -> Result<(Value, i32)> {
    let s = Session::open(&a.src, env)?;
    let xbar = s.xbar()?;
    let (points, lambda) = if a.variant.needs_multipliers() {
        let lambda = s.lambda(a.lambda.as_deref())?;
        let cp = s.constrained("a primed variant")?;
        (enumerate_constrained(cp, xbar, &lambda, a.variant, s.resolution, &s.cfg)?, Some(lambda))
    } else {
        (enumerate_solution_set(s.program(), xbar, a.variant, s.resolution, &s.cfg)?, None)
    };
    let mut v = json!({ "variant": a.variant, "resolution": s.resolution, "count": points.len(), "points": points });
    if let Some(l) = lambda {
        v["lambda"] = to_value(&l);
    }
    Ok((v, 0))
}

fn ml_inf_grid(s: &Session, inf_resolution: Option<usize>) -> (Window, usize) {
    let w = s.program().domain_window().padded(0.5);
    (w, inf_resolution.unwrap_or(2 * s.resolution - 1))
}

/// Grid points accepted by a subdifferential route.
fn subdiff_points(s: &Session, route: Route, form: MlForm, inf_resolution: Option<usize>) -> Result<Vec<Vector>> {
    let p = s.program();
    let xbar = s.xbar()?;
    let mut out = Vec::new();
    match route {
        Route::Gp => {
            let cands = default_gp_candidates(p, xbar, GP_ORTHANT_SAMPLES, &s.cfg)?;
            for x in p.feasible_grid(s.resolution, &s.cfg)? {
                if gp_solution_check(p, xbar, &x, &cands, p.domain_window(), s.resolution, &s.cfg)?.member {
                    out.push(x);
                }
            }
        }
        Route::Ml => {
            let cands = default_ml_candidates();
            let (w, r) = ml_inf_grid(s, inf_resolution);
            let xb = *xbar.first().ok_or_else(|| Error::dim("xbar", 1, 0))?;
            let grid = p.feasible_grid(s.resolution, &s.cfg)?;
            out = ml_solution_set_1d(p, xb, &grid, &cands, &w, r, form, &s.cfg)?;
        }
    }
    Ok(out)
}

fn subdiff(
    s: &Session,
    route: Route,
    form: MlForm,
    point: Option<Vec<f64>>,
    inf_resolution: Option<usize>,
) -> Result<(Value, i32)> {
    let p = s.program();
    let xbar = s.xbar()?;
    let name = match route {
        Route::Gp => "gp",
        Route::Ml => "ml",
    };
    let Some(x) = point else {
        let points = subdiff_points(s, route, form, inf_resolution)?;
        return Ok((json!({ "route": name, "resolution": s.resolution, "count": points.len(), "points": points }), 0));
    };
    let (member, value) = match route {
        Route::Gp => {
            let cands = default_gp_candidates(p, xbar, GP_ORTHANT_SAMPLES, &s.cfg)?;
            let r = gp_solution_check(p, xbar, &x, &cands, p.domain_window(), s.resolution, &s.cfg)?;
            (r.member, to_value(&r))
        }
        Route::Ml => {
            let (w, r) = ml_inf_grid(s, inf_resolution);
            if x.len() != 1 || xbar.len() != 1 {
                return Err(Error::dim("Martínez-Legaz route (1-D only)", 1, x.len().max(xbar.len())));
            }
            let r = ml_solution_check_1d(p, xbar[0], x[0], &default_ml_candidates(), &w, r, form, &s.cfg)?;
            (r.member, to_value(&r))
        }
    };
    let mut value = value;
    value["route"] = json!(name);
    Ok((value, if member { 0 } else { 1 }))
}

fn run_example(s: &Session, check: Check) -> Result<(Value, i32)> {
    let b = s.builtin.as_ref().expect("run-example always has a builtin");
    let p = s.program();
    let xbar = s.xbar()?;
    let want = |c: Check| check == Check::All || check == c;
    let mut ok = true;
    let mut report = json!({ "example": b.name, "summary": b.summary, "resolution": s.resolution });

    let oracle = brute_force_solutions(p, s.resolution, s.cfg.eps_opt, &s.cfg)?;
    require_solution(p, &oracle, xbar, s.cfg.eps_opt, &s.cfg)?;
    if want(Check::Oracle) {
        let closed_form: Vec<Vector> =
            p.feasible_grid(s.resolution, &s.cfg)?.into_iter().filter(|x| (b.solution)(x)).collect();
        let matches = closed_form == oracle.solution_points;
        ok &= matches;
        report["oracle"] = json!({
            "min_value": oracle.min_value,
            "grid_size": oracle.grid_size,
            "solutions": oracle.solution_points.len(),
            "matches_closed_form": matches,
        });
    }
    if want(Check::Dichotomy) {
        let d = classify_dichotomy(p, &oracle.solution_points, &s.cfg)?;
        let matches = d.alternative == b.alternative;
        ok &= matches;
        report["dichotomy"] = json!({
            "alternative": d.alternative,
            "expected": b.alternative,
            "common_unit_gradient": d.common_unit_gradient,
        });
    }
    if want(Check::Variants) {
        let mut rows = Vec::new();
        let lambda = b.lambda.clone().map(MultiplierVector::new).transpose()?;
        for &v in b.variants {
            let r = match (&lambda, s.problem.constrained()) {
                (Some(l), Some(cp)) if v.needs_multipliers() => {
                    agreement_constrained(cp, xbar, l, v, s.resolution, s.cfg.eps_opt, &s.cfg)?
                }
                _ => agreement(p, xbar, v, s.resolution, s.cfg.eps_opt, &s.cfg)?,
            };
            ok &= r.equal;
            rows.push(to_value(&r));
        }
        report["variants"] = Value::Array(rows);
    }
    if want(Check::Kkt) {
        if let (Some(cp), Some(l)) = (s.problem.constrained(), &b.lambda) {
            let cq = check_gmfcq(cp, xbar, &s.cfg)?;
            let m = solve_multipliers(cp, xbar, &s.cfg)?;
            let lambda = MultiplierVector::new(l.clone())?;
            let lambda_error = m.lambda.lambdas().iter().zip(l).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let mut ok_x1 = true;
            for x in &oracle.solution_points {
                ok_x1 &= member_x1(cp, xbar, &lambda, x, &s.cfg)?;
            }
            let lag = lagrangian_constancy(cp, xbar, &lambda, &oracle.solution_points, &s.cfg)?;
            ok &= cq.holds && lambda_error <= s.cfg.eps_lp && ok_x1 && lag.constant;
            report["kkt"] = json!({
                "gmfcq": cq.holds,
                "lambda": m.lambda,
                "expected_lambda": l,
                "stationarity_residual": m.stationarity_residual,
                "complementarity_residual": m.complementarity_residual,
                "solutions_in_x1": ok_x1,
                "lagrangian": lag,
            });
        }
    }
    if want(Check::Subdiff) {
        let route = match (b.name, p.dimension()) {
            ("ex2_4", _) => Some(Route::Gp),
            (_, 1) => Some(Route::Ml),
            _ => None,
        };
        if let Some(route) = route {
            let points = subdiff_points(s, route, MlForm::M2, None)?;
            let matches = points == oracle.solution_points;
            ok &= matches;
            report["subdiff"] = json!({
                "route": if route == Route::Gp { "gp" } else { "ml" },
                "count": points.len(),
                "matches_oracle": matches,
            });
        }
    }
    report["ok"] = json!(ok);
    Ok((report, if ok { 0 } else { 1 }))
}
