//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use krein::kernels::{krein_form_with, r_v_coordinate_with, RadialTestFunction};
use krein::matrix_oracle::{build_grid, oracle_trace, TraceFunction};
use krein::nevanlinna::{gap, krein_denominator, Channel, ExtensionConfig, SpectralPoint};
use krein::positivity::{classify, x_boundary, x_boundary_bisection, Verdict};
use krein::quad::QuadConfig;
use krein::spectral_traces::{fit_log_log, fit_sqrt_over_log2, OmegaWeight, TraceSolver};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::FileConfig;
use crate::error::AppError;
use crate::figure::sigma_curves;
use crate::grid::GridSpec;
use crate::output::{Cell, Table};
use crate::verify::{run_suite, Suite};

pub const DEFAULT_TOL: f64 = 1e-11;
pub const TOL_RANGE: (f64, f64) = (1e-14, 1e-2);

#[derive(Debug, Parser)]
#[command(name = "krein", version, about = "Point-interaction extensions: spectra, traces and checks")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// single, scalar-minus, vector-v-minus, vector-u-minus, vector-v-plus, vector-u-plus
    #[arg(long, global = true)]
    channel: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    kappa_tilde: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    x: Option<f64>,
    /// Quadrature tolerance, absolute and relative.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// File of `key = value` defaults; options on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Geometric grid spacing.
    #[arg(long, global = true)]
    log: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// κ − σ(μ) on the negative half-axis.
    Sigma {
        #[arg(long, default_value = "-10:-0.01:200", allow_hyphen_values = true)]
        mu_grid: GridSpec,
    },
    /// Jump of σ across the positive half-axis.
    Gap {
        #[arg(long, default_value = "0.01:100:100")]
        lambda_grid: GridSpec,
    },
    /// Boundary separation x_b, closed form and bisection.
    Boundary,
    /// Positivity verdict per separation.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        x_grid: Option<GridSpec>,
    },
    /// Resolvent kernels.
    Kernel {
        #[command(subcommand)]
        which: KernelCmd,
    },
    /// Regularized traces.
    Trace {
        #[command(subcommand)]
        which: TraceCmd,
    },
    /// Finite-rank cross-checks.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
    /// Plot data.
    Figure {
        #[command(subcommand)]
        which: FigureCmd,
    },
    /// Acceptance checks with measured values.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
}

#[derive(Debug, Subcommand)]
enum KernelCmd {
    /// (R_μ v)(r) for one unit source.
    Rv {
        #[arg(long, default_value = "-1", allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value = "0.1:10:50")]
        r_grid: GridSpec,
    },
    /// Quadratic form of the extended resolvent on a Gaussian profile.
    Form {
        #[arg(long, default_value = "-10:-0.01:50", allow_hyphen_values = true)]
        mu_grid: GridSpec,
        #[arg(long, default_value = "1")]
        width: f64,
    },
}

#[derive(Debug, Subcommand)]
enum TraceCmd {
    /// Tr(ln L − ln L_κ) against the cutoff, or its x-derivative over an x grid.
    Ln {
        /// Cutoffs, always geometrically spaced.
        #[arg(long, default_value = "1e3:1e8:6")]
        cutoff_grid: GridSpec,
        #[arg(long)]
        x_grid: Option<GridSpec>,
    },
    /// Tr(√L_κ − √L) against the cutoff.
    Sqrt {
        /// Cutoffs, always geometrically spaced.
        #[arg(long, default_value = "1e3:1e7:5")]
        cutoff_grid: GridSpec,
        /// Smooth cutoff e^{−λ/Λ} instead of a sharp one.
        #[arg(long)]
        regulated: bool,
    },
    /// ω on R_ρ v.
    Omega {
        #[arg(long, default_value = "-1", allow_hyphen_values = true)]
        rho_grid: GridSpec,
        /// Use the single-source weight.
        #[arg(long)]
        single_source: bool,
    },
    /// Combined trace and the overlap lower bound.
    Overlap {
        #[arg(long)]
        x_grid: Option<GridSpec>,
    },
}

#[derive(Debug, Subcommand)]
enum OracleCmd {
    /// Finite model against continuum values.
    Compare {
        #[arg(long, default_value_t = 4000)]
        n: usize,
        #[arg(long, default_value_t = 1e5)]
        p_max: f64,
        /// Second separation for trace differences.
        #[arg(long, default_value_t = 1.2)]
        x2: f64,
        #[arg(long, default_value_t = 1e5)]
        cutoff: f64,
    },
}

#[derive(Debug, Subcommand)]
enum FigureCmd {
    /// σ − κ at x and at x_b with the single-source reference.
    SigmaCurves {
        /// μ values, always geometrically spaced.
        #[arg(long, default_value = "-10:-0.001:400", allow_hyphen_values = true)]
        mu_grid: GridSpec,
    },
}

/// Settings after merging command line, config file and defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub channel: Channel,
    pub kappa_tilde: f64,
    pub x: f64,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub log: bool,
}

impl Settings {
    fn resolve(g: &GlobalArgs) -> Result<Self, AppError> {
        let file = match &g.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let num = |key: &str| -> Result<Option<f64>, AppError> {
            file.get(key)
                .map(|v| v.parse::<f64>().map_err(|_| AppError::Usage(format!("config `{key}`: not a number: {v}"))))
                .transpose()
        };
        let channel_name = g.channel.clone().or_else(|| file.get("channel").map(str::to_string));
        let channel = match channel_name {
            Some(n) => Channel::from_name(&n).ok_or_else(|| AppError::Usage(format!("unknown channel `{n}`")))?,
            None => Channel::TwoSourceScalarMinus,
        };
        let format = match (g.format, file.get("format")) {
            (Some(f), _) => f,
            (None, Some(v)) => Format::from_str(v, true).map_err(|_| AppError::Usage(format!("config `format`: {v}")))?,
            (None, None) => Format::Csv,
        };
        let env_threads = std::env::var("THREADS").ok();
        let threads = match env_threads.as_deref().or(file.get("threads")) {
            Some(v) => Some(v.trim().parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| AppError::Usage(format!("threads: {v}")))?),
            None => None,
        };
        let s = Settings {
            channel,
            kappa_tilde: g.kappa_tilde.or(num("kappa-tilde")?).unwrap_or(1.0),
            x: g.x.or(num("x")?).unwrap_or(1.0),
            tol: g.tol.or(num("tol")?).unwrap_or(DEFAULT_TOL),
            format,
            out: g.out.clone().or_else(|| file.get("out").map(PathBuf::from)),
            threads,
            log: g.log,
        };
        if !(s.tol >= TOL_RANGE.0 && s.tol <= TOL_RANGE.1) {
            return Err(AppError::Usage(format!("--tol {} outside [{:e}, {:e}]", s.tol, TOL_RANGE.0, TOL_RANGE.1)));
        }
        Ok(s)
    }

    fn cfg(&self) -> Result<ExtensionConfig, AppError> {
        Ok(ExtensionConfig::new(self.kappa_tilde, self.x, self.channel)?)
    }

    fn cfg_at(&self, x: f64) -> Result<ExtensionConfig, AppError> {
        Ok(ExtensionConfig::new(self.kappa_tilde, x, self.channel)?)
    }

    fn solver(&self) -> TraceSolver {
        TraceSolver::with_tol(self.tol)
    }

    fn quad(&self) -> QuadConfig<f64> {
        QuadConfig::with_tol(self.tol)
    }

    fn grid(&self, g: &GridSpec) -> Result<Vec<f64>, AppError> {
        Ok(g.values(self.log)?)
    }

    fn metadata(&self, command: &str) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("command".into(), json!(command));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert(
            "config".into(),
            json!({
                "channel": self.channel.name(),
                "kappa_tilde": self.kappa_tilde,
                "x": self.x,
                "log_grid": self.log,
            }),
        );
        m.insert("tolerances".into(), json!({ "abs_tol": self.tol, "rel_tol": self.tol }));
        m
    }
}

fn negative(mu: f64) -> Result<SpectralPoint, AppError> {
    SpectralPoint::negative(mu).map_err(|e| AppError::Domain(e.to_string()))
}

/// Ordered parallel map over grid points; the first error in input order wins.
fn sweep<T, F>(xs: &[f64], f: F) -> Result<Vec<T>, AppError>
where
    T: Send,
    F: Fn(f64) -> Result<T, AppError> + Sync,
{
    let results: Vec<Result<T, AppError>> = xs.par_iter().map(|&v| f(v)).collect();
    results.into_iter().collect()
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("krein: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<i32, AppError> {
    let s = Settings::resolve(&cli.global)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = s.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| AppError::Usage(e.to_string()))?;
    let (name, table, code) = pool.install(|| dispatch(&cli.command, &s))?;
    emit(&s, name, &table)?;
    if code != 0 {
        let failed: Vec<String> = table
            .rows
            .iter()
            .filter(|r| matches!(&r[2], Cell::Text(t) if t == "fail"))
            .map(|r| match &r[0] {
                Cell::Text(t) => t.clone(),
                Cell::Num(v) => v.to_string(),
            })
            .collect();
        eprintln!("krein: failing criteria: {}", failed.join(", "));
    }
    Ok(code)
}

fn emit(s: &Settings, name: &str, table: &Table) -> Result<(), AppError> {
    let text = match s.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(s.metadata(name)),
    };
    match &s.out {
        Some(p) => std::fs::write(p, text).map_err(|e| AppError::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| AppError::Io(e.to_string()))
        }
    }
}

fn dispatch(cmd: &Command, s: &Settings) -> Result<(&'static str, Table, i32), AppError> {
    let ok = |name, t| Ok((name, t, 0));
    match cmd {
        Command::Sigma { mu_grid } => ok("sigma", sigma_table(s, mu_grid)?),
        Command::Gap { lambda_grid } => ok("gap", gap_table(s, lambda_grid)?),
        Command::Boundary => ok("boundary", boundary_table(s)?),
        Command::Classify { x_grid } => ok("classify", classify_table(s, x_grid.as_ref())?),
        Command::Kernel { which } => {
            let name = match which {
                KernelCmd::Rv { .. } => "kernel rv",
                KernelCmd::Form { .. } => "kernel form",
            };
            ok(name, kernel_table(s, which)?)
        }
        Command::Trace { which } => {
            let name = match which {
                TraceCmd::Ln { .. } => "trace ln",
                TraceCmd::Sqrt { .. } => "trace sqrt",
                TraceCmd::Omega { .. } => "trace omega",
                TraceCmd::Overlap { .. } => "trace overlap",
            };
            ok(name, trace_table(s, which)?)
        }
        Command::Oracle { which: OracleCmd::Compare { n, p_max, x2, cutoff } } => {
            ok("oracle compare", oracle_table(s, *n, *p_max, *x2, *cutoff)?)
        }
        Command::Figure { which: FigureCmd::SigmaCurves { mu_grid } } => {
            let mus = mu_grid.values(true)?;
            ok("figure sigma-curves", sigma_curves(s.kappa_tilde, s.x, &mus)?)
        }
        Command::Verify { suite } => {
            let checks = run_suite(*suite);
            let mut t = Table::new(&["criterion", "name", "passed", "measured"]);
            for c in &checks {
                t.push(vec![c.id.into(), c.name.into(), c.passed.into(), c.measured.as_str().into()]);
            }
            let code = if checks.iter().all(|c| c.passed) { 0 } else { 3 };
            Ok(("verify", t, code))
        }
    }
}

fn sigma_table(s: &Settings, g: &GridSpec) -> Result<Table, AppError> {
    let cfg = s.cfg()?;
    let mus = s.grid(g)?;
    let dens = sweep(&mus, |mu| Ok(krein_denominator(negative(mu)?, &cfg)?))?;
    let mut t = Table::new(&["mu", "re_den", "im_den"]);
    for (mu, d) in mus.iter().zip(dens) {
        t.push(vec![(*mu).into(), d.re.into(), d.im.into()]);
    }
    Ok(t)
}

fn gap_table(s: &Settings, g: &GridSpec) -> Result<Table, AppError> {
    let cfg = s.cfg()?;
    let ls = s.grid(g)?;
    let gaps = sweep(&ls, |l| Ok(gap(l, &cfg)?))?;
    let mut t = Table::new(&["lambda", "im_gap"]);
    for (l, v) in ls.iter().zip(gaps) {
        t.push(vec![(*l).into(), v.im.into()]);
    }
    Ok(t)
}

fn boundary_table(s: &Settings) -> Result<Table, AppError> {
    let xb = x_boundary(s.kappa_tilde, s.channel)?;
    let root = x_boundary_bisection(s.kappa_tilde, s.channel)?;
    let mut t = Table::new(&["kappa_tilde", "x_b", "x_b_bisection", "difference", "residual"]);
    t.push(vec![s.kappa_tilde.into(), xb.into(), root.x_b.into(), (root.x_b - xb).abs().into(), root.residual.into()]);
    Ok(t)
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Positive => "positive",
        Verdict::NegativeEigenvalue => "negative-eigenvalue",
        Verdict::Boundary => "boundary",
    }
}

fn classify_table(s: &Settings, g: Option<&GridSpec>) -> Result<Table, AppError> {
    let xs = match g {
        Some(g) => s.grid(g)?,
        None => vec![s.x],
    };
    let reports = sweep(&xs, |x| Ok(classify(&s.cfg_at(x)?)))?;
    let mut t = Table::new(&["x", "verdict", "pole_mu", "x_b"]);
    for (x, r) in xs.iter().zip(reports) {
        t.push(vec![
            (*x).into(),
            verdict_name(r.verdict).into(),
            r.pole_mu.unwrap_or(f64::NAN).into(),
            r.x_b.unwrap_or(f64::NAN).into(),
        ]);
    }
    Ok(t)
}

fn kernel_table(s: &Settings, which: &KernelCmd) -> Result<Table, AppError> {
    let quad = s.quad();
    match which {
        KernelCmd::Rv { mu, r_grid } => {
            let rs = s.grid(r_grid)?;
            let vals = sweep(&rs, |r| Ok(r_v_coordinate_with(*mu, r, &quad)?))?;
            let mut t = Table::new(&["r", "r_v"]);
            for (r, v) in rs.iter().zip(vals) {
                t.push(vec![(*r).into(), v.into()]);
            }
            t.note("mu", json!(mu));
            Ok(t)
        }
        KernelCmd::Form { mu_grid, width } => {
            let cfg = s.cfg()?;
            let f = RadialTestFunction::gaussian(*width)?;
            let mus = s.grid(mu_grid)?;
            let vals = sweep(&mus, |mu| Ok(krein_form_with(negative(mu)?, &f, &cfg, &quad)?))?;
            let mut t = Table::new(&["mu", "re_form", "im_form"]);
            for (mu, v) in mus.iter().zip(vals) {
                t.push(vec![(*mu).into(), v.re.into(), v.im.into()]);
            }
            t.note("gaussian_width", json!(width));
            Ok(t)
        }
    }
}

fn trace_table(s: &Settings, which: &TraceCmd) -> Result<Table, AppError> {
    let solver = s.solver();
    match which {
        TraceCmd::Ln { x_grid: Some(g), .. } => {
            let xs = s.grid(g)?;
            let vals = sweep(&xs, |x| Ok(solver.dx_tr_ln(&s.cfg_at(x)?)?))?;
            let mut t = Table::new(&["x", "dx_tr_ln"]);
            for (x, v) in xs.iter().zip(vals) {
                t.push(vec![(*x).into(), v.into()]);
            }
            Ok(t)
        }
        TraceCmd::Ln { cutoff_grid, x_grid: None } => {
            let cfg = s.cfg()?;
            let cuts = cutoff_grid.values(true)?;
            let vals = solver.tr_ln_values(&cuts, &cfg)?;
            let mut t = Table::new(&["cutoff", "tr_ln"]);
            for (c, v) in cuts.iter().zip(&vals) {
                t.push(vec![(*c).into(), (*v).into()]);
            }
            if cuts.len() >= 3 {
                let samples: Vec<(f64, f64)> = cuts.iter().copied().zip(vals).collect();
                let (a, b, r) = fit_log_log(&samples)?;
                t.note("model", json!({ "form": "a ln ln L + b", "a": a, "b": b, "relative_residual": r }));
            }
            Ok(t)
        }
        TraceCmd::Sqrt { cutoff_grid, regulated: true } => {
            let cfg = s.cfg()?;
            let cuts = cutoff_grid.values(true)?;
            let vals = sweep(&cuts, |c| Ok(solver.tr_sqrt_regulated(c, &cfg)?))?;
            let mut t = Table::new(&["cutoff", "tr_sqrt_regulated"]);
            for (c, v) in cuts.iter().zip(vals) {
                t.push(vec![(*c).into(), v.into()]);
            }
            Ok(t)
        }
        TraceCmd::Sqrt { cutoff_grid, regulated: false } => {
            let cfg = s.cfg()?;
            let cuts = cutoff_grid.values(true)?;
            let vals = solver.tr_sqrt_values(&cuts, &cfg)?;
            let mut t = Table::new(&["cutoff", "tr_sqrt"]);
            for (c, v) in cuts.iter().zip(&vals) {
                t.push(vec![(*c).into(), (*v).into()]);
            }
            if cuts.len() >= 3 {
                let samples: Vec<(f64, f64)> = cuts.iter().copied().zip(vals).collect();
                let (a, b, r) = fit_sqrt_over_log2(&samples)?;
                t.note("model", json!({ "form": "-a int_b^L dl/(sqrt(l) ln^2 l)", "a": a, "b": b, "relative_residual": r }));
            }
            Ok(t)
        }
        TraceCmd::Omega { rho_grid, single_source } => {
            let cfg = s.cfg()?;
            let weight = if *single_source { OmegaWeight::SingleSource } else { OmegaWeight::VMinus };
            let rhos = s.grid(rho_grid)?;
            let terms = sweep(&rhos, |rho| Ok(solver.omega_terms(rho, &cfg, weight)?))?;
            let mut t = Table::new(&["rho", "omega", "free", "gap_term", "denominator_term"]);
            for (rho, w) in rhos.iter().zip(terms) {
                t.push(vec![(*rho).into(), w.total().into(), w.free.into(), w.gap_term.into(), w.denominator_term.into()]);
            }
            Ok(t)
        }
        TraceCmd::Overlap { x_grid } => {
            let xs = match x_grid {
                Some(g) => s.grid(g)?,
                None => vec![s.x],
            };
            let vals = sweep(&xs, |x| {
                let cfg = s.cfg_at(x)?;
                let e = solver.tr_e_combined(&cfg)?;
                Ok((e, (-e).exp()))
            })?;
            let mut t = Table::new(&["x", "tr_e", "overlap_bound"]);
            for (x, (e, b)) in xs.iter().zip(vals) {
                t.push(vec![(*x).into(), e.into(), b.into()]);
            }
            Ok(t)
        }
    }
}

fn oracle_table(s: &Settings, n: usize, p_max: f64, x2: f64, cutoff: f64) -> Result<Table, AppError> {
    let solver = s.solver();
    let c1 = s.cfg()?;
    let c2 = s.cfg_at(x2)?;
    let (m1, m2) = rayon::join(|| build_grid(&c1, n, p_max), || build_grid(&c2, n, p_max));
    let (m1, m2) = (m1?, m2?);
    let mut t = Table::new(&["quantity", "oracle", "continuum", "difference"]);
    let mut row = |name: &str, o: f64, c: f64| t.push(vec![name.into(), o.into(), c.into(), (o - c).into()]);

    for (mu, nu) in [(-2.0, -1.0), (-10.0, -0.1)] {
        let cont = krein_denominator(negative(nu)?, &c1)?.re - krein_denominator(negative(mu)?, &c1)?.re;
        row(&format!("sigma({mu})-sigma({nu})"), m1.sigma_difference(mu, nu), cont);
    }
    let ln = oracle_trace(&m1, TraceFunction::Ln)? - oracle_trace(&m2, TraceFunction::Ln)?;
    row("tr_ln_diff", ln, solver.tr_ln_diff(&c1, &c2)?);
    let w = oracle_trace(&m1, TraceFunction::OmegaOnRv { rho: -1.0 })?;
    row("omega(-1)", w, solver.omega_terms(-1.0, &c1, OmegaWeight::VMinus)?.total());
    let reg = oracle_trace(&m1, TraceFunction::RegulatedSqrt { cutoff })? - oracle_trace(&m2, TraceFunction::RegulatedSqrt { cutoff })?;
    row("tr_sqrt_regulated_diff", reg, solver.tr_sqrt_regulated(cutoff, &c1)? - solver.tr_sqrt_regulated(cutoff, &c2)?);
    t.note("n", json!(n));
    t.note("p_max", json!(p_max));
    t.note("x2", json!(x2));
    t.note("cutoff", json!(cutoff));
    Ok(t)
}
