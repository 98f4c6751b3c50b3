//! Command-line front end: `verify` and `report <task>`.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::bloch::{gradient_report, require_holomorphic};
use crate::error::{Error, Result};
use crate::geometry::HPoint;
use crate::hankel::{truncated_hankel_norm, HankelEstimate};
use crate::integrate::{QuadratureSpec, Scheme};
use crate::oscillation::{
    berezin, build_grid, mean_oscillation, mean_oscillation_r, mo_value_error, seminorm_scan, GridPoint,
    GridPreset, Seminorm, DEFAULT_RADIUS,
};
use crate::report::{fmt_real, Format, Report, Row, RunConfig};
use crate::symbols::{make_symbol, Params, Symbol};
use crate::verify::{ratio_row, run_verify};

const GRID_HELP: &str = "Grid preset: `ray-ladder` (delta_t(i) for t = 2^-8..2^8 and the horizontal ray \
(0', x + i), x = 0, 2^0..2^12), `interior-qmc` (200 Halton points of the ball through the Cayley map), \
or `full` (both)";

#[derive(Debug, Parser)]
#[command(name = "siegel", version, about = "Bergman-space diagnostics on the Siegel upper half-space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every check suite; exit 0 iff all gating checks pass.
    Verify,
    /// Evaluate one transform over a grid for one symbol.
    Report {
        #[arg(value_enum)]
        task: Task,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Berezin,
    Mo,
    BmoScan,
    Hankel,
    Bloch,
    Decay,
}

#[derive(Debug, Args)]
pub struct Opts {
    /// Complex dimension.
    #[arg(long = "n", global = true, default_value_t = 1)]
    pub n: usize,
    #[arg(long, global = true, default_value_t = RunConfig::DEFAULT_SEED)]
    pub seed: u64,
    /// Quadrature node count (at least 100).
    #[arg(long, global = true, default_value_t = RunConfig::DEFAULT_NODES)]
    pub nodes: usize,
    /// Largest basis degree for Hankel truncations (default 10 for n = 1, else 6).
    #[arg(long, global = true)]
    pub degree_cap: Option<usize>,
    #[arg(long, global = true, default_value = "ray-ladder", help = GRID_HELP)]
    pub grid: String,
    /// `jsonl` or `csv`.
    #[arg(long, global = true, default_value = "jsonl")]
    pub format: String,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Corpus symbol id, optionally prefixed with `conj:`.
    #[arg(long, global = true)]
    pub symbol: Option<String>,
    /// Symbol parameter, repeatable.
    #[arg(long = "param", global = true, value_name = "K=V", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Metric-ball radius r for MO_r, BO and BA_r.
    #[arg(long, global = true, default_value_t = DEFAULT_RADIUS)]
    pub radius: f64,
    /// `quasi-random`, `stratified` or `polar-product`.
    #[arg(long, global = true, default_value = "quasi-random")]
    pub scheme: String,
    /// Replace the multiplier j by |j| in the Hankel basis (verify only).
    #[arg(long, global = true)]
    pub fault_injection: bool,
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected K=V, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("parameter `{k}` is not a number: `{v}`"))?;
    Ok((k.trim().to_string(), v))
}

impl Opts {
    pub fn config(&self) -> Result<RunConfig> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("dimension n must be at least 1".into()));
        }
        let mut cfg = RunConfig::new(self.n);
        cfg.seed = self.seed;
        cfg.node_count = self.nodes;
        if let Some(c) = self.degree_cap {
            cfg.degree_cap = c;
        }
        cfg.grid = GridPreset::parse(&self.grid)?;
        cfg.format = Format::parse(&self.format)?;
        cfg.out = self.out.clone();
        cfg.scheme = Scheme::parse(&self.scheme)?;
        cfg.radius = self.radius;
        cfg.symbol = self.symbol.clone();
        let mut params = Params::new();
        for (k, v) in &self.params {
            if params.insert(k.clone(), *v).is_some() {
                return Err(Error::InvalidParameter(format!("parameter `{k}` given twice")));
            }
        }
        cfg.params = params;
        cfg.fault_injection = self.fault_injection;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Exit status for a library error: 2 for configuration problems, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidSpec(_)
        | Error::UnknownSymbol(_)
        | Error::InvalidParameter(_)
        | Error::NotHolomorphic(_)
        | Error::ParameterDomain(_)
        | Error::DimensionMismatch { .. } => 2,
        _ => 1,
    }
}

/// Outcome of one invocation: the report (if produced), and the exit status.
pub struct Outcome {
    pub report: Option<Report>,
    pub code: i32,
    pub message: Option<String>,
}

/// Runs a parsed command without touching the filesystem or streams.
pub fn execute(cli: &Cli) -> Outcome {
    let failed = |e: Error| Outcome { report: None, code: exit_code(&e), message: Some(e.to_string()) };
    let cfg = match cli.opts.config() {
        Ok(c) => c,
        Err(e) => return failed(e),
    };
    match &cli.command {
        Command::Verify => match run_verify(&cfg) {
            Ok((rep, ok)) => Outcome {
                report: Some(rep),
                code: if ok { 0 } else { 1 },
                message: (!ok).then(|| "one or more gating checks failed".to_string()),
            },
            Err(e) => failed(e),
        },
        Command::Report { task } => match run_report(&cfg, *task) {
            Ok(rep) => Outcome { report: Some(rep), code: 0, message: None },
            Err(e) => failed(e),
        },
    }
}

/// Full entry point: parses `args`, writes the report, returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let out = execute(&cli);
    if let Some(rep) = &out.report {
        let text = rep.render();
        let written = match &rep.config.out {
            Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write `{path}`: {e}")),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
        };
        if let Err(msg) = written {
            eprintln!("error: {msg}");
            return 2;
        }
    }
    if let Some(msg) = &out.message {
        eprintln!("error: {msg}");
    }
    out.code
}

fn point_text(z: &HPoint) -> String {
    z.coords()
        .iter()
        .map(|c| format!("{}{:+.16e}i", fmt_real(c.re), c.im))
        .collect::<Vec<_>>()
        .join(";")
}

fn point_row(k: usize, g: &GridPoint, spec: &QuadratureSpec, citation: &str) -> Row {
    Row::new()
        .int("index", k as i64)
        .text("ray", g.ray)
        .real("param", g.param)
        .text("z", point_text(&g.point))
        .int("point_seed", spec.seed)
        .text("citation", citation)
}

fn symbol_for(cfg: &RunConfig) -> Result<Symbol> {
    let id = cfg.symbol.as_deref().ok_or_else(|| Error::InvalidSpec("report tasks need --symbol".into()))?;
    let f = make_symbol(id, &cfg.params)?;
    if f.min_dim() > cfg.n {
        return Err(Error::InvalidParameter(format!("symbol `{id}` needs n >= {}, got n = {}", f.min_dim(), cfg.n)));
    }
    Ok(f)
}

/// Rows for `task` over the configured grid; row order follows the grid index.
pub fn run_report(cfg: &RunConfig, task: Task) -> Result<Report> {
    let spec = cfg.spec()?;
    let f = symbol_for(cfg)?;
    let grid = build_grid(cfg.grid, cfg.n);
    let mut rep = Report::new(format!("report {}", task_name(task)), cfg);
    let rows = match task {
        Task::Berezin => berezin_rows(&f, &grid, &spec)?,
        Task::Mo => mo_rows(&f, cfg.radius, &grid, &spec)?,
        Task::BmoScan => bmo_scan_rows(&f, cfg.radius, &grid, &spec)?,
        Task::Hankel => hankel_rows(&f, cfg, &grid, &spec)?,
        Task::Bloch => bloch_rows(&f, &grid)?,
        Task::Decay => decay_rows(&f, &grid, &spec)?,
    };
    for r in rows {
        rep.push(r.text("symbol", f.id()));
    }
    Ok(rep)
}

pub fn task_name(task: Task) -> &'static str {
    match task {
        Task::Berezin => "berezin",
        Task::Mo => "mo",
        Task::BmoScan => "bmo-scan",
        Task::Hankel => "hankel",
        Task::Bloch => "bloch",
        Task::Decay => "decay",
    }
}

fn berezin_rows(f: &Symbol, grid: &[GridPoint], spec: &QuadratureSpec) -> Result<Vec<Row>> {
    grid.par_iter()
        .enumerate()
        .map(|(k, g)| {
            let s = spec.for_point(k);
            let b = berezin(f, &g.point, &s)?;
            Ok(point_row(k, g, &s, "Berezin transform: average of f against |k_z|^2")
                .real("value_re", b.value.re)
                .real("value_im", b.value.im)
                .real("std_error", b.std_error))
        })
        .collect()
}

fn mo_rows(f: &Symbol, radius: f64, grid: &[GridPoint], spec: &QuadratureSpec) -> Result<Vec<Row>> {
    grid.par_iter()
        .enumerate()
        .map(|(k, g)| {
            let s = spec.for_point(k);
            let m = mean_oscillation(f, &g.point, &s)?;
            let mr = mean_oscillation_r(f, &g.point, radius, &s)?;
            Ok(point_row(k, g, &s, "mean oscillation against the Berezin weight and over D(z,r)")
                .real("mo", m.value)
                .real("mo_std_error", mo_value_error(&m))
                .real("radius", radius)
                .real("mo_r", mr.value)
                .real("mo_r_std_error", mo_value_error(&mr)))
        })
        .collect()
}

fn scan_seminorms(r: f64) -> [Seminorm; 5] {
    [Seminorm::Bmo, Seminorm::BmoR(r), Seminorm::Bo(r), Seminorm::Ba, Seminorm::BaR(r)]
}

fn seminorm_citation(which: Seminorm) -> &'static str {
    match which {
        Seminorm::Bmo => "BMO seminorm: sup of MO(f)",
        Seminorm::BmoR(_) => "BMO_r seminorm: sup of MO_r(f)",
        Seminorm::Bo(_) => "BO: bounded oscillation w_r(f) over metric balls",
        Seminorm::Ba => "BA: bounded Berezin transform of |f|^2",
        Seminorm::BaR(_) => "BA_r: bounded ball averages of |f|^2",
        Seminorm::Bloch => "Bloch seminorm: sup of the invariant gradient",
    }
}

fn scan_rows(f: &Symbol, which: Seminorm, grid: &[GridPoint], spec: &QuadratureSpec) -> Result<Vec<Row>> {
    let scan = seminorm_scan(f, which, grid, spec)?;
    let cite = seminorm_citation(which);
    let mut rows: Vec<Row> = grid
        .iter()
        .enumerate()
        .map(|(k, g)| {
            point_row(k, g, &spec.for_point(k), cite)
                .text("kind", "point")
                .text("seminorm", scan.which.clone())
                .real("value", scan.values[k])
                .real("std_error", scan.std_errors[k])
        })
        .collect();
    rows.push(
        Row::new()
            .text("kind", "sup")
            .text("seminorm", scan.which.clone())
            .real("value", scan.sup_estimate)
            .int("grid_points", grid.len() as i64)
            .text("citation", cite),
    );
    Ok(rows)
}

fn bmo_scan_rows(f: &Symbol, radius: f64, grid: &[GridPoint], spec: &QuadratureSpec) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for which in scan_seminorms(radius) {
        rows.extend(scan_rows(f, which, grid, spec)?);
    }
    Ok(rows)
}

fn hankel_row(label: &str, e: &HankelEstimate) -> Row {
    Row::new()
        .text("kind", "hankel")
        .text("operator", label)
        .real("norm_estimate", e.norm_estimate)
        .int("basis_degree_cap", e.basis_degree_cap as i64)
        .int("output_dim", e.output_dim as i64)
        .real("eigen_residual", e.eigen_residual)
        .int("iterations", e.iterations as i64)
        .real("gram_deviation", e.gram_deviation)
        .int("node_count", e.spec.node_count as i64)
        .text("citation", "truncated Hankel operator norm ||(I - P)(f g)||")
}

fn hankel_rows(f: &Symbol, cfg: &RunConfig, grid: &[GridPoint], spec: &QuadratureSpec) -> Result<Vec<Row>> {
    let h = truncated_hankel_norm(f, cfg.n, cfg.degree_cap, spec)?;
    let hb = truncated_hankel_norm(&f.conj(), cfg.n, cfg.degree_cap, spec)?;
    let ratio = ratio_row(f, h.norm_estimate, hb.norm_estimate, cfg.degree_cap, spec, grid)?;
    Ok(vec![
        hankel_row("H_f", &h),
        hankel_row("H_conj(f)", &hb),
        Row::new()
            .text("kind", "bmo-scan")
            .real("bmo_sup", ratio.bmo_sup)
            .real("hankel_sum", ratio.hankel + ratio.hankel_conj)
            .real("ratio", ratio.global())
            .real("pointwise_ratio", ratio.pointwise)
            .int("grid_points", grid.len() as i64)
            .text("citation", "Hankel pair norm against the BMO seminorm"),
    ])
}

fn bloch_rows(f: &Symbol, grid: &[GridPoint]) -> Result<Vec<Row>> {
    require_holomorphic(f)?;
    let reports = grid.par_iter().map(|g| gradient_report(f, &g.point)).collect::<Result<Vec<_>>>()?;
    let cite = "invariant gradient of a holomorphic symbol";
    let mut sup: f64 = 0.0;
    let mut rows = Vec::new();
    for (k, (g, r)) in grid.iter().zip(&reports).enumerate() {
        sup = sup.max(r.invariant_gradient);
        rows.push(
            Row::new()
                .int("index", k as i64)
                .text("ray", g.ray)
                .real("param", g.param)
                .text("z", point_text(&g.point))
                .text("citation", cite)
                .text("kind", "point")
                .real("invariant_gradient", r.invariant_gradient)
                .real("ball_transfer", r.ball_transfer_value)
                .real("fd_gradient", r.fd_gradient)
                .real("residual_transfer", r.residuals[0])
                .real("residual_fd", r.residuals[1]),
        );
    }
    rows.push(Row::new().text("kind", "sup").real("invariant_gradient", sup).text("citation", "Bloch seminorm: sup of the invariant gradient"));
    Ok(rows)
}

fn decay_rows(f: &Symbol, grid: &[GridPoint], spec: &QuadratureSpec) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for which in [Seminorm::Bmo, Seminorm::Ba] {
        let scan = seminorm_scan(f, which, grid, spec)?;
        let cite = match which {
            Seminorm::Bmo => "vanishing mean oscillation: MO(f) along boundary rays",
            _ => "vanishing Berezin transform of |f|^2 along boundary rays",
        };
        for (k, g) in grid.iter().enumerate() {
            rows.push(
                point_row(k, g, &spec.for_point(k), cite)
                    .text("seminorm", scan.which.clone())
                    .real("value", scan.values[k])
                    .real("std_error", scan.std_errors[k]),
            );
        }
    }
    Ok(rows)
}
