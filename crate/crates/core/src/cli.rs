//! The `conekit` command line.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::blowup::{bcb_check, AnchorPath};
use crate::error::{invalid, Error, Result};
use crate::field::{Field, FnField, GridFunction, Interp};
use crate::geometry::{DomainKind, DomainSpec};
use crate::kernels::{green_iterated, verify_hypotheses, GreenKernel, Hypothesis, Kernel, Normalization, VerifyConfig};
use crate::point::{dist, Point};
use crate::quadrature::quadrature_for;
use crate::scaling_spheres::{
    bootstrap, find_lambda0, kelvin_invariant_profile, log_radial_samples, BootstrapDirection, ExponentParams,
    SweepDirection,
};
use crate::solver::{lower_bound_rho, picard_solve, radial_nodes, NonLinearity, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "conekit", version, about = "Green kernels, scaling spheres and blow-up checks on cone-like domains")]
pub struct Cli {
    /// JSON file whose keys fill in options not given on the command line.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every sampled quantity.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving `<command>.json` and, where applicable, `<command>.csv`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// What goes to stdout.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a Green kernel at one pair of points.
    KernelEval(KernelEvalArgs),
    /// Sample a kernel hypothesis.
    KernelVerify(KernelVerifyArgs),
    /// Solve u = K(|x-P|^a u^p + t) by fixed-point iteration.
    Solve(SolveArgs),
    /// Sweep the Kelvin comparison over a λ grid.
    #[command(name = "mss-lambda0")]
    MssLambda0(Lambda0Args),
    /// Iterate the exponent recurrence.
    Bootstrap(BootstrapArgs),
    /// Distance of blown-up polygons to their limit cone.
    Blowup(BlowupArgs),
}

#[derive(Args, Debug, Default)]
pub struct KernelEvalArgs {
    /// Domain JSON file.
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Iterate the second-order kernel this many times (ball kernels of integer order).
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum)]
    pub normalization: Option<NormArg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Angular,
    PaperCycles,
}

#[derive(Args, Debug, Default)]
pub struct KernelVerifyArgs {
    #[arg(long)]
    pub which: Option<String>,
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct SolveArgs {
    #[arg(long)]
    pub domain: Option<PathBuf>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Number of radial intervals (balls) or interior nodes (intervals).
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub damping: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct Lambda0Args {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    /// gaussian, invariant or fundamental.
    #[arg(long)]
    pub profile: Option<String>,
    /// dilate or shrink.
    #[arg(long)]
    pub direction: Option<String>,
    #[arg(long)]
    pub lambda_min: Option<f64>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Sample radii range and count.
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct BootstrapArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Number of iterations.
    #[arg(long)]
    pub k: Option<usize>,
    /// Defaults to -(n-2s)/2.
    #[arg(long, allow_hyphen_values = true)]
    pub mu0: Option<f64>,
    /// outward, fundamental or shrink.
    #[arg(long)]
    pub direction: Option<String>,
}

#[derive(Args, Debug, Default)]
pub struct BlowupArgs {
    #[arg(long)]
    pub domain: Option<PathBuf>,
    /// Boundary point as `x,y`.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Comma-separated decreasing scales.
    #[arg(long)]
    pub rho: Option<String>,
    /// fixed or quadratic.
    #[arg(long)]
    pub path: Option<String>,
    #[arg(long)]
    pub grid: Option<usize>,
}

/// Values from `--config`, looked up by option name at the top level and under `params`.
struct ConfigFile {
    root: BTreeMap<String, Value>,
    base: PathBuf,
}

impl ConfigFile {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(ConfigFile { root: BTreeMap::new(), base: PathBuf::from(".") });
        };
        let text = std::fs::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)?;
        let Value::Object(map) = value else {
            return Err(invalid("config must be a JSON object"));
        };
        let mut root: BTreeMap<String, Value> = map.into_iter().collect();
        if let Some(Value::Object(params)) = root.remove("params") {
            for (k, v) in params {
                root.entry(k).or_insert(v);
            }
        }
        let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Ok(ConfigFile { root, base })
    }

    fn get<T: serde::de::DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        match self.root.get(key).or_else(|| self.root.get(&key.replace('_', "-"))) {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| invalid(format!("config key {key}: {e}"))),
        }
    }

    fn pick<T: serde::de::DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    fn need<T: serde::de::DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.pick(flag, key)?
            .ok_or_else(|| invalid(format!("missing --{}", key.replace('_', "-"))))
    }

    /// Domain from a flag path, or from the config as an inline object or a relative path.
    fn domain(&self, flag: Option<&Path>) -> Result<DomainSpec> {
        if let Some(p) = flag {
            return DomainSpec::from_json(&std::fs::read_to_string(p)?);
        }
        match self.root.get("domain") {
            Some(Value::String(p)) => DomainSpec::from_json(&std::fs::read_to_string(self.base.join(p))?),
            Some(v @ Value::Object(_)) => {
                let d: DomainSpec = serde_json::from_value(v.clone())?;
                d.validate()?;
                Ok(d)
            }
            _ => Err(invalid("missing --domain")),
        }
    }
}

fn parse_point(text: &str) -> Result<Point> {
    let coords: std::result::Result<Vec<f64>, _> = text.split(',').map(|c| c.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|e| invalid(format!("bad coordinate list {text:?}: {e}")))?;
    if coords.is_empty() {
        return Err(invalid("empty coordinate list"));
    }
    Ok(Point(coords.into()))
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    Ok(parse_point(text)?.0.to_vec())
}

/// Pretty JSON with sorted keys.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json's default map type is ordered by key
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)?)
}

fn csv_string(header: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|v| format!("{v:e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| invalid(e.to_string()))
}

/// Output of one subcommand.
struct Outcome {
    report: Value,
    csv: Option<String>,
    code: i32,
}

pub fn run_from_env() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    if let Some(n) = std::env::var("CONEKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // fails harmlessly when the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match execute(&cli) {
        Ok((name, out)) => match emit(&cli, name, &out, stdout) {
            Ok(()) => out.code,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                exit_code(&e)
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Divergence(_) | Error::NoBracket(_) => EXIT_DIVERGED,
        Error::Io(_) => 1,
        _ => EXIT_USAGE,
    }
}

fn emit(cli: &Cli, name: &str, out: &Outcome, stdout: &mut dyn Write) -> Result<()> {
    let cfg = ConfigFile::load(cli.config.as_deref())?;
    let json_text = to_sorted_json(&out.report)? + "\n";
    let format = match cli.format {
        Some(f) => f,
        None => match cfg.get::<String>("format")?.as_deref() {
            Some("csv") => Format::Csv,
            Some("json") | None => Format::Json,
            Some(other) => return Err(invalid(format!("unknown format {other}"))),
        },
    };
    match (format, &out.csv) {
        (Format::Csv, Some(c)) => stdout.write_all(c.as_bytes())?,
        _ => stdout.write_all(json_text.as_bytes())?,
    }
    let dir = match &cli.out {
        Some(d) => Some(d.clone()),
        None => cfg.get::<String>("out")?.or(cfg.get::<String>("output")?).map(PathBuf::from),
    };
    if let Some(dir) = dir {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join(format!("{name}.json")), &json_text)?;
        if let Some(c) = &out.csv {
            std::fs::write(dir.join(format!("{name}.csv")), c)?;
        }
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<(&'static str, Outcome)> {
    let cfg = ConfigFile::load(cli.config.as_deref())?;
    let seed = match cli.seed {
        Some(s) => s,
        None => cfg.get("seed")?.unwrap_or(0),
    };
    Ok(match &cli.command {
        Command::KernelEval(a) => ("kernel-eval", kernel_eval(a, &cfg)?),
        Command::KernelVerify(a) => ("kernel-verify", kernel_verify(a, &cfg, seed)?),
        Command::Solve(a) => ("solve", solve(a, &cfg)?),
        Command::MssLambda0(a) => ("mss-lambda0", lambda0(a, &cfg)?),
        Command::Bootstrap(a) => ("bootstrap", run_bootstrap(a, &cfg)?),
        Command::Blowup(a) => ("blowup", blowup(a, &cfg)?),
    })
}

fn default_order(d: &DomainSpec) -> f64 {
    match d.kind {
        DomainKind::Interval { .. } | DomainKind::HalfLine { .. } => 0.5,
        _ => 1.0,
    }
}

fn build_kernel(domain: DomainSpec, s: f64, steps: usize, norm: Normalization) -> Result<Box<dyn Kernel>> {
    let is_ball = matches!(domain.kind, DomainKind::Ball { .. } | DomainKind::BallK { .. });
    if is_ball && s >= 2.0 && s.fract() == 0.0 {
        let base = GreenKernel::new(1.0, domain.clone())?;
        let rule = quadrature_for(&domain, 12)?;
        return Ok(Box::new(green_iterated(base, s as usize, rule)?));
    }
    if steps > 1 {
        let base = GreenKernel::new(1.0, domain.clone())?;
        let rule = quadrature_for(&domain, 12)?;
        return Ok(Box::new(green_iterated(base, steps, rule)?));
    }
    Ok(Box::new(GreenKernel::new(s, domain)?.with_normalization(norm)))
}

fn kernel_eval(a: &KernelEvalArgs, cfg: &ConfigFile) -> Result<Outcome> {
    let domain = cfg.domain(a.domain.as_deref())?;
    let s = cfg.pick(a.s, "s")?.unwrap_or_else(|| default_order(&domain));
    let x = parse_point(&cfg.need(a.x.clone(), "x")?)?;
    let y = parse_point(&cfg.need(a.y.clone(), "y")?)?;
    let steps = cfg.pick(a.steps, "steps")?.unwrap_or(1);
    let norm = match a.normalization {
        Some(NormArg::PaperCycles) => Normalization::PaperCycles,
        Some(NormArg::Angular) => Normalization::Angular,
        None => match cfg.get::<String>("normalization")?.as_deref() {
            Some("paper-cycles") | Some("PaperCycles") => Normalization::PaperCycles,
            _ => Normalization::Angular,
        },
    };
    let k = build_kernel(domain, s, steps, norm)?;
    let value = k.eval(&x, &y)?;
    Ok(Outcome {
        report: json!({"s": k.order(), "x": x.0.to_vec(), "y": y.0.to_vec(), "value": value}),
        csv: None,
        code: EXIT_OK,
    })
}

fn kernel_verify(a: &KernelVerifyArgs, cfg: &ConfigFile, seed: u64) -> Result<Outcome> {
    let domain = cfg.domain(a.domain.as_deref())?;
    let s = cfg.pick(a.s, "s")?.unwrap_or_else(|| default_order(&domain));
    let which: Hypothesis = cfg.need(a.which.clone(), "which")?.parse()?;
    let samples = cfg.pick(a.samples, "samples")?.unwrap_or(1000);
    let k = build_kernel(domain, s, 1, Normalization::Angular)?;
    let vc = VerifyConfig { samples, seed, ..Default::default() };
    let r = verify_hypotheses(k.as_ref(), which, &vc)?;
    let code = if r.pass { EXIT_OK } else { EXIT_FAIL };
    Ok(Outcome { report: serde_json::to_value(&r)?, csv: None, code })
}

fn solve(a: &SolveArgs, cfg: &ConfigFile) -> Result<Outcome> {
    let domain = cfg.domain(a.domain.as_deref())?;
    let s = cfg.pick(a.s, "s")?.unwrap_or_else(|| default_order(&domain));
    let p: f64 = cfg.need(a.p, "p")?;
    let aa = cfg.pick(a.a, "a")?.unwrap_or(0.0);
    let t = cfg.pick(a.t, "t")?.unwrap_or(0.0);
    let mut sc = SolverConfig::default();
    if let Some(v) = cfg.pick(a.order, "order")? {
        sc.quadrature_order = v;
    }
    if let Some(v) = cfg.pick(a.max_iters, "max_iters")? {
        sc.max_iters = v;
    }
    if let Some(v) = cfg.pick(a.tol, "tol")? {
        sc.residual_tol = v;
    }
    if let Some(v) = cfg.pick(a.damping, "damping")? {
        sc.damping = v;
    }
    let (center, radius, initial, radial) = match &domain.kind {
        DomainKind::Ball { center, radius } => {
            let m = cfg.pick(a.nodes, "nodes")?.unwrap_or(48);
            let nodes = radial_nodes(center, *radius, m);
            let n = domain.dim as f64;
            let values = nodes
                .iter()
                .map(|x| 2.0 * ((radius * radius - dist(x, center).powi(2)) / (2.0 * n)).max(0.0))
                .collect();
            let g = GridFunction::new(nodes, values, Interp::RadialCubic { center: center.clone() })?;
            (center.clone(), *radius, g, true)
        }
        DomainKind::Interval { a: lo, b: hi } => {
            let m = cfg.pick(a.nodes, "nodes")?.unwrap_or(64);
            let nodes: Vec<Point> = (0..=m + 1)
                .map(|i| Point::new(&[lo + (hi - lo) * i as f64 / (m + 1) as f64]))
                .collect();
            let values = nodes.iter().map(|x| 2.0 * ((x[0] - lo) * (hi - x[0])).max(0.0).sqrt()).collect();
            let g = GridFunction::new(nodes, values, Interp::PiecewiseLinear1D)?;
            (Point::new(&[0.5 * (lo + hi)]), 0.5 * (hi - lo), g, false)
        }
        _ => return Err(Error::Unsupported("solve supports balls and intervals".into())),
    };
    let kernel = build_kernel(domain.clone(), s, 1, Normalization::Angular)?;
    let nl = NonLinearity::new(aa, p, t, center.clone())?;
    let out = picard_solve(kernel.as_ref(), &nl, &sc, &initial)?;
    let diam = 2.0 * radius;
    let rho_bound = if p > 1.0 && radial && s.fract() == 0.0 {
        // Navier barrier constant (2n)^{-s}
        let c = (2.0 * domain.dim as f64).powf(-s);
        lower_bound_rho(domain.dim, s, p, diam, c).ok()
    } else {
        None
    };
    let sup = out.sup_norm();
    let report = json!({
        "residual": out.residual(),
        "sup_norm": sup,
        "iters": out.iters,
        "rho_bound": rho_bound,
        "converged": out.converged,
        "diverged": out.diverged,
        "scheme": format!("{:?}", out.scheme),
    });
    let rows: Vec<Vec<f64>> = if radial {
        out.solution
            .nodes
            .iter()
            .zip(&out.solution.values)
            .map(|(x, v)| vec![dist(x, &center), *v])
            .collect()
    } else {
        out.solution.nodes.iter().zip(&out.solution.values).map(|(x, v)| vec![x[0], *v]).collect()
    };
    let csv = if radial { csv_string(&["r", "u(r)"], &rows)? } else { csv_string(&["x1", "u"], &rows)? };
    let code = if out.diverged {
        EXIT_DIVERGED
    } else if !out.converged || rho_bound.is_some_and(|b| sup > 0.0 && sup < b) {
        EXIT_FAIL
    } else {
        EXIT_OK
    };
    Ok(Outcome { report, csv: Some(csv), code })
}

fn lambda0(a: &Lambda0Args, cfg: &ConfigFile) -> Result<Outcome> {
    let n: usize = cfg.pick(a.n, "n")?.unwrap_or(3);
    let s: f64 = cfg.pick(a.s, "s")?.unwrap_or(1.0);
    let profile = cfg.pick(a.profile.clone(), "profile")?.unwrap_or_else(|| "gaussian".into());
    let dir = match cfg.pick(a.direction.clone(), "direction")?.as_deref() {
        None | Some("dilate") => SweepDirection::Dilate,
        Some("shrink") => SweepDirection::Shrink,
        Some(o) => return Err(invalid(format!("unknown direction {o}"))),
    };
    let lo = cfg.pick(a.lambda_min, "lambda_min")?.unwrap_or(0.1);
    let hi = cfg.pick(a.lambda_max, "lambda_max")?.unwrap_or(3.0);
    let steps = cfg.pick(a.steps, "steps")?.unwrap_or(30);
    let r0 = cfg.pick(a.r_min, "r_min")?.unwrap_or(0.05);
    let r1 = cfg.pick(a.r_max, "r_max")?.unwrap_or(5.0);
    let count = cfg.pick(a.samples, "samples")?.unwrap_or(400);
    if !(lo > 0.0 && hi > lo) || steps == 0 {
        return Err(invalid("need 0 < lambda_min < lambda_max and steps >= 1"));
    }
    let p = Point::zeros(n);
    let e = n as f64 - 2.0 * s;
    let f: Box<dyn Field> = match profile.as_str() {
        "gaussian" => Box::new(FnField::new(n, |x: &[f64]| (-crate::point::dot(x, x)).exp())),
        "invariant" => Box::new(FnField::new(n, move |x: &[f64]| kelvin_invariant_profile(n, s, &vec![0.0; n], x))),
        "fundamental" => Box::new(FnField::new(n, move |x: &[f64]| crate::point::norm(x).powf(-e))),
        o => return Err(invalid(format!("unknown profile {o}"))),
    };
    let grid: Vec<f64> = (0..steps)
        .map(|i| if steps == 1 { lo } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 })
        .collect();
    let samples = log_radial_samples(&p, r0, r1, count);
    let r = find_lambda0(f.as_ref(), &samples, &p, s, dir, &grid)?;
    Ok(Outcome { report: serde_json::to_value(&r)?, csv: None, code: EXIT_OK })
}

fn run_bootstrap(a: &BootstrapArgs, cfg: &ConfigFile) -> Result<Outcome> {
    let n: usize = cfg.need(a.n, "n")?;
    let s: f64 = cfg.need(a.s, "s")?;
    let aa: f64 = cfg.pick(a.a, "a")?.unwrap_or(0.0);
    let p: f64 = cfg.need(a.p, "p")?;
    let k: usize = cfg.pick(a.k, "k")?.unwrap_or(50);
    let params = ExponentParams::new(n, s, aa, p)?;
    let mu0 = cfg.pick(a.mu0, "mu0")?.unwrap_or(-(n as f64 - 2.0 * s) / 2.0);
    let direction = match cfg.pick(a.direction.clone(), "direction")?.as_deref() {
        None | Some("outward") => BootstrapDirection::DilateOutward,
        Some("fundamental") => BootstrapDirection::DilateFundamental,
        Some("shrink") => BootstrapDirection::ShrinkInward,
        Some(o) => return Err(invalid(format!("unknown direction {o}"))),
    };
    let run = bootstrap(&params, mu0, direction, k)?;
    let pc = params.p_critical()?;
    let mut report = serde_json::to_value(&run)?;
    report["p_critical"] = if pc.is_finite() { json!(pc) } else { json!("inf") };
    let rows: Vec<Vec<f64>> = run.sequence.iter().enumerate().map(|(i, m)| vec![i as f64, *m]).collect();
    Ok(Outcome { report, csv: Some(csv_string(&["k", "mu"], &rows)?), code: EXIT_OK })
}

fn blowup(a: &BlowupArgs, cfg: &ConfigFile) -> Result<Outcome> {
    let domain = cfg.domain(a.domain.as_deref())?;
    let x0 = parse_point(&cfg.need(a.x0.clone(), "x0")?)?;
    if x0.dim() != 2 {
        return Err(invalid("x0 must have two coordinates"));
    }
    let rhos = match cfg.pick(a.rho.clone(), "rho")? {
        Some(t) => parse_list(&t)?,
        None => vec![1e-1, 1e-2, 1e-3, 1e-4],
    };
    let path = match cfg.pick(a.path.clone(), "path")?.as_deref() {
        None | Some("fixed") => AnchorPath::Fixed,
        Some("quadratic") => AnchorPath::Quadratic,
        Some(o) => return Err(invalid(format!("unknown anchor path {o}"))),
    };
    let grid = cfg.pick(a.grid, "grid")?.unwrap_or(100);
    let r = bcb_check(&domain, [x0[0], x0[1]], &rhos, path, grid)?;
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| json!({"rho": row.rho, "hausdorff": row.hausdorff, "cone_angle": r.cone_angle}))
        .collect();
    let report = json!({
        "cone_angle": r.cone_angle,
        "grid_resolution": r.grid_resolution,
        "anchor_path": r.anchor_path,
        "slope": r.slope,
        "rows": rows,
    });
    let table: Vec<Vec<f64>> = r.rows.iter().map(|row| vec![row.rho, row.hausdorff, r.cone_angle]).collect();
    Ok(Outcome { report, csv: Some(csv_string(&["rho", "hausdorff", "cone_angle"], &table)?), code: EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["conekit"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn bootstrap_verdict() {
        let (code, text) = call(&["bootstrap", "--n", "3", "--s", "1", "--a", "0", "--p", "2", "--k", "50"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["verdict"], "DivergesPlus");
        assert_eq!(v["p_critical"], 5.0);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["bootstrap", "--n", "3"]).0, EXIT_USAGE);
        assert_eq!(call(&["no-such-command"]).0, EXIT_USAGE);
        assert_eq!(call(&["bootstrap", "--n", "3", "--s", "1", "--p", "0.5"]).0, EXIT_USAGE);
    }

    #[test]
    fn sorted_keys() {
        let text = to_sorted_json(&json!({"b": 1, "a": {"d": 2, "c": 3}})).unwrap();
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        assert!(text.find("\"c\"").unwrap() < text.find("\"d\"").unwrap());
    }

    #[test]
    fn csv_layout() {
        let c = csv_string(&["r", "u(r)"], &[vec![0.0, 1.5]]).unwrap();
        assert_eq!(c, "r,u(r)\n0e0,1.5e0\n");
    }
}
