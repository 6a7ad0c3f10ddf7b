//! The `dpgs` command line front end.
//!
//! Parameters, solver overrides and output options are global flags, so they
//! may sit on either side of the subcommand:
//!
//! ```text
//! dpgs --n 3 --p 2 --q 3 --omega 0.1875 critical-points
//! dpgs --n 3 shoot --trajectory t.csv
//! dpgs verify --omega 0.22
//! dpgs --sweep omega:0.01:0.22:20 sweep
//! ```
//!
//! Exit codes: 0 success, 1 internal (I/O) error, 2 domain or existence
//! error, 3 solver failure, 64 usage.

use std::ffi::OsString;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::nonlinearity::{sigma_threshold, Dimension, DoublePowerParams, PohozaevCoeffs, RadialProblem};
use crate::pohozaev::eval_p;
use crate::roots::{critical_points_auto, CriticalPoints, CriticalPointsMethod, RootControls};
use crate::shooting::{find_ground_state, GroundState, SolverControls, Trajectory};
use crate::util::{fmt_human, fmt_machine};
use crate::verify::{
    alpha_bound_checks, dimension_split_check, random_samples, verify, Check, ParamsEcho,
    VerificationReport, DEFAULT_SEED,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Header of the sweep table.
pub const SWEEP_COLUMNS: [&str; 14] = [
    "n", "p", "q", "omega", "b", "c", "beta", "theta", "B", "C", "alpha", "alpha_minus_B",
    "c_minus_alpha", "overall",
];

/// Marker written in every result column of a grid point without a ground state.
pub const SKIPPED: &str = "skipped";

#[derive(Debug, Clone, Parser)]
#[command(
    name = "dpgs",
    version,
    about = "Radial ground states for f(u) = -omega*u + u^p - u^q"
)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Space dimension.
    #[arg(long, global = true, default_value_t = 3)]
    pub n: u32,
    #[arg(long, global = true, default_value_t = 2.0, allow_negative_numbers = true)]
    pub p: f64,
    #[arg(long, global = true, default_value_t = 3.0, allow_negative_numbers = true)]
    pub q: f64,
    #[arg(long, global = true, default_value_t = 0.1875, allow_negative_numbers = true)]
    pub omega: f64,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rtol: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub atol: Option<f64>,
    #[arg(long = "r-max", global = true, allow_negative_numbers = true)]
    pub r_max: Option<f64>,
    #[arg(long = "alpha-tol", global = true, allow_negative_numbers = true)]
    pub alpha_tol: Option<f64>,

    /// Machine-readable output; without it critical-points and shoot print a summary.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// CSV file for the shot trajectory (columns r,u,du,P,Sigma_u).
    #[arg(long, global = true)]
    pub trajectory: Option<PathBuf>,
    /// Grid for `sweep`, as VAR:START:STOP:COUNT with VAR one of omega, p, q, n.
    #[arg(long, global = true)]
    pub sweep: Option<SweepSpec>,
    /// Seed for `sample-verify`.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Critical points b, c, beta, theta, B, C and both thresholds.
    CriticalPoints,
    /// Solve for the ground state and check the bounds on its maximum.
    Shoot,
    /// Full verification report as JSON.
    Verify,
    /// Verification over the grid given by --sweep.
    Sweep,
    /// Full verification on randomly drawn valid parameter sets.
    SampleVerify {
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    Omega,
    P,
    Q,
    N,
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVar::Omega => "omega",
            SweepVar::P => "p",
            SweepVar::Q => "q",
            SweepVar::N => "n",
        })
    }
}

/// `VAR:START:STOP:COUNT`, an inclusive uniform grid of `COUNT >= 2` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn grid(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.stop
                } else {
                    self.start + k as f64 * step
                }
            })
            .collect()
    }
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [var, start, stop, count] = parts[..] else {
            return Err(format!("expected VAR:START:STOP:COUNT, got '{s}'"));
        };
        let var = match var {
            "omega" => SweepVar::Omega,
            "p" => SweepVar::P,
            "q" => SweepVar::Q,
            "n" => SweepVar::N,
            other => return Err(format!("unknown sweep variable '{other}' (omega, p, q or n)")),
        };
        let num = |t: &str| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("'{t}' is not a finite number"))
        };
        let (start, stop) = (num(start)?, num(stop)?);
        let count: usize = count
            .parse()
            .map_err(|_| format!("'{count}' is not a point count"))?;
        if count < 2 {
            return Err(format!("a sweep needs at least 2 points, got {count}"));
        }
        let spec = SweepSpec {
            var,
            start,
            stop,
            count,
        };
        if var == SweepVar::N && spec.grid().iter().any(|x| x.fract() != 0.0 || *x < 1.0) {
            return Err(format!("an n sweep must land on positive integers, got '{s}'"));
        }
        Ok(spec)
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Solver(Error),
    Io(io::Error),
    EmptyGrid,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_INTERNAL,
            CliError::EmptyGrid => EXIT_DOMAIN,
            CliError::Solver(e) => match e {
                Error::InvalidParameter(_) => EXIT_USAGE,
                Error::Domain { .. }
                | Error::Unsupported(_)
                | Error::NoPositivePart { .. }
                | Error::ExistenceViolated { .. } => EXIT_DOMAIN,
                _ => EXIT_SOLVER,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Solver(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
            CliError::EmptyGrid => f.write_str("every sweep point lacks a ground state"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Solver(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

impl CliConfig {
    pub fn controls(&self) -> CliResult<SolverControls> {
        let d = SolverControls::default();
        let controls = SolverControls {
            rtol: self.rtol.unwrap_or(d.rtol),
            atol: self.atol.unwrap_or(d.atol),
            r_max: self.r_max.unwrap_or(d.r_max),
            alpha_tol: self.alpha_tol.unwrap_or(d.alpha_tol),
            ..d
        };
        controls.validate()?;
        Ok(controls)
    }

    pub fn params(&self) -> CliResult<(DoublePowerParams, Dimension)> {
        Ok((
            DoublePowerParams::new(self.omega, self.p, self.q)?,
            Dimension::new(self.n)?,
        ))
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&config) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("dpgs: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(config: &CliConfig) -> CliResult<()> {
    let controls = config.controls()?;
    match &config.command {
        Command::CriticalPoints => cmd_critical_points(config),
        Command::Shoot => cmd_shoot(config, &controls),
        Command::Verify => cmd_verify(config, &controls),
        Command::Sweep => cmd_sweep(config, &controls),
        Command::SampleVerify { count } => cmd_sample_verify(config, &controls, *count),
    }
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

fn csv_line<S: AsRef<str>>(fields: &[S]) -> String {
    let mut line = fields.iter().map(|f| f.as_ref()).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalPointsDoc {
    pub params: ParamsEcho,
    pub method: CriticalPointsMethod,
    pub critical_points: CriticalPoints,
    pub omega_pq: f64,
    /// `None` when the threshold is infinite (`τ <= 0`).
    pub omega_sigma_tau: Option<f64>,
    pub sigma: f64,
    pub tau: f64,
    pub root_controls: RootControls,
}

pub fn critical_points_doc(params: &DoublePowerParams, n: Dimension) -> crate::Result<CriticalPointsDoc> {
    let root_controls = RootControls::default();
    let (cp, method) = critical_points_auto(params, n, root_controls)?;
    let coeffs = RadialProblem::new(*params, n).coeffs();
    let PohozaevCoeffs { sigma, tau } = coeffs;
    let omega_sigma_tau = match sigma_threshold(coeffs, params.p(), params.q()) {
        Ok(w) => Some(w),
        Err(Error::Unsupported(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(CriticalPointsDoc {
        params: ParamsEcho::new(params, n),
        method,
        critical_points: cp,
        omega_pq: params.existence_threshold(),
        omega_sigma_tau,
        sigma,
        tau,
        root_controls,
    })
}

fn cmd_critical_points(config: &CliConfig) -> CliResult<()> {
    let (params, n) = config.params()?;
    let doc = critical_points_doc(&params, n)?;
    let cp = doc.critical_points;
    let threshold = doc.omega_sigma_tau.unwrap_or(f64::INFINITY);
    let text = match config.format {
        Some(Format::Json) => to_json(&doc),
        Some(Format::Csv) => {
            let header = [
                "n", "p", "q", "omega", "method", "b", "c", "beta", "theta", "B", "C", "omega_pq",
                "omega_sigma_tau", "sigma", "tau",
            ];
            let mut row = vec![n.get().to_string()];
            row.extend([params.p(), params.q(), params.omega()].map(fmt_machine));
            row.push(method_tag(doc.method).into());
            row.extend(
                [
                    cp.b, cp.c, cp.beta, cp.theta, cp.big_b, cp.big_c, doc.omega_pq, threshold,
                    doc.sigma, doc.tau,
                ]
                .map(fmt_machine),
            );
            csv_line(&header) + &csv_line(&row)
        }
        None => {
            let mut s = params_line(&params, n);
            s += &format!("method: {}\n", doc.method);
            for (k, v) in [
                ("b", cp.b),
                ("c", cp.c),
                ("beta", cp.beta),
                ("theta", cp.theta),
                ("B", cp.big_b),
                ("C", cp.big_c),
                ("omega_pq", doc.omega_pq),
                ("omega_sigma_tau", threshold),
                ("sigma", doc.sigma),
                ("tau", doc.tau),
            ] {
                s += &format!("{k} = {}\n", fmt_human(v));
            }
            s
        }
    };
    emit(config.output.as_deref(), &text)
}

fn method_tag(m: CriticalPointsMethod) -> &'static str {
    match m {
        CriticalPointsMethod::ClosedForm => "closed_form",
        CriticalPointsMethod::RootFinding => "root_finding",
    }
}

fn params_line(params: &DoublePowerParams, n: Dimension) -> String {
    format!(
        "n = {}, p = {}, q = {}, omega = {}\n",
        n.get(),
        fmt_human(params.p()),
        fmt_human(params.q()),
        fmt_human(params.omega())
    )
}

/// Writes `r,u,du,P,Sigma_u` for every sample of `traj`.
pub fn write_trajectory_csv<W: Write>(
    traj: &Trajectory,
    params: &DoublePowerParams,
    n: Dimension,
    mut out: W,
) -> io::Result<()> {
    let prob = RadialProblem::new(*params, n);
    out.write_all(csv_line(&["r", "u", "du", "P", "Sigma_u"]).as_bytes())?;
    for s in traj.samples() {
        let row = [s.r, s.u, s.du, eval_p(s, n, params), prob.sigma(s.u.max(0.0))].map(fmt_machine);
        out.write_all(csv_line(&row).as_bytes())?;
    }
    out.flush()
}

fn cmd_shoot(config: &CliConfig, controls: &SolverControls) -> CliResult<()> {
    let (params, n) = config.params()?;
    params.require_existence()?;
    let (cp, _) = critical_points_auto(&params, n, RootControls::default())?;
    let gs = find_ground_state(&params, n, controls)?;
    let mut checks = vec![dimension_split_check(n, &cp)];
    checks.extend(alpha_bound_checks(n, &cp, &gs));

    if let Some(path) = &config.trajectory {
        write_trajectory_csv(&gs.trajectory, &params, n, BufWriter::new(File::create(path)?))?;
    }

    let text = match config.format {
        Some(Format::Json) => to_json(&shoot_json(&params, n, controls, &cp, &gs, &checks)),
        Some(Format::Csv) => {
            let mut header: Vec<String> = ["n", "p", "q", "omega", "alpha", "bracket_width", "iterations", "decay_rate"]
                .map(String::from)
                .to_vec();
            header.extend(checks.iter().map(|c| c.name.clone()));
            let mut row = vec![n.get().to_string()];
            row.extend([params.p(), params.q(), params.omega(), gs.alpha, gs.bracket_width].map(fmt_machine));
            row.push(gs.iterations.to_string());
            row.push(fmt_machine(gs.decay_rate));
            row.extend(checks.iter().map(|c| c.passed.to_string()));
            csv_line(&header) + &csv_line(&row)
        }
        None => {
            let mut s = params_line(&params, n);
            s += &format!("alpha = {}\n", fmt_human(gs.alpha));
            s += &format!("c - alpha = {}\n", fmt_human(gs.c_minus_alpha));
            s += &format!("bracket_width = {}\n", fmt_human(gs.bracket_width));
            s += &format!("iterations = {}\n", gs.iterations);
            s += &format!("decay_rate = {}\n", fmt_human(gs.decay_rate));
            s += &format!(
                "tail = {} at r = {} after {} restarts\n",
                gs.outcome.label(),
                fmt_human(gs.outcome.radius()),
                gs.restarts
            );
            s += &check_lines(&checks);
            s += &format!(
                "controls: rtol = {}, atol = {}, r_max = {}, alpha_tol = {}, u_floor = {}\n",
                fmt_human(controls.rtol),
                fmt_human(controls.atol),
                fmt_human(controls.r_max),
                fmt_human(controls.alpha_tol),
                fmt_human(controls.u_floor)
            );
            s
        }
    };
    emit(config.output.as_deref(), &text)
}

fn shoot_json(
    params: &DoublePowerParams,
    n: Dimension,
    controls: &SolverControls,
    cp: &CriticalPoints,
    gs: &GroundState,
    checks: &[Check],
) -> Value {
    json!({
        "params": ParamsEcho::new(params, n),
        "critical_points": cp,
        "alpha": gs.alpha,
        "c_minus_alpha": gs.c_minus_alpha,
        "bracket_width": gs.bracket_width,
        "iterations": gs.iterations,
        "decay_rate": gs.decay_rate,
        "restarts": gs.restarts,
        "outcome": gs.outcome,
        "checks": checks,
        "overall": checks.iter().all(|c| c.passed),
        "controls": controls,
    })
}

fn check_lines(checks: &[Check]) -> String {
    checks
        .iter()
        .map(|c| {
            format!(
                "{:<4} {:<20} lhs = {}, rhs = {}, margin = {}\n",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                fmt_human(c.lhs),
                fmt_human(c.rhs),
                fmt_human(c.margin)
            )
        })
        .collect()
}

fn cmd_verify(config: &CliConfig, controls: &SolverControls) -> CliResult<()> {
    let (params, n) = config.params()?;
    let report = verify(&params, n, controls)?;
    let text = match config.format {
        Some(Format::Csv) => {
            let mut s = csv_line(&["name", "passed", "lhs", "rhs", "margin"]);
            for c in &report.checks {
                s += &csv_line(&[
                    c.name.clone(),
                    c.passed.to_string(),
                    fmt_machine(c.lhs),
                    fmt_machine(c.rhs),
                    fmt_machine(c.margin),
                ]);
            }
            s
        }
        _ => report.to_json() + "\n",
    };
    emit(config.output.as_deref(), &text)
}

/// One evaluated grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub p: f64,
    pub q: f64,
    pub omega: f64,
    /// `None` for points without a ground state (or with invalid parameters).
    pub result: Option<SweepResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub critical_points: Option<CriticalPoints>,
    pub alpha: Option<f64>,
    pub c_minus_alpha: Option<f64>,
    pub overall: bool,
}

impl SweepRow {
    pub fn csv_fields(&self) -> Vec<String> {
        let mut f = vec![self.n.to_string()];
        f.extend([self.p, self.q, self.omega].map(fmt_machine));
        match &self.result {
            None => f.extend(std::iter::repeat_n(SKIPPED.to_string(), SWEEP_COLUMNS.len() - 4)),
            Some(r) => {
                let nan = f64::NAN;
                let cp = r.critical_points;
                let pick = |g: fn(&CriticalPoints) -> f64| cp.as_ref().map_or(nan, g);
                let alpha = r.alpha.unwrap_or(nan);
                let big_b = pick(|c| c.big_b);
                let c = pick(|c| c.c);
                f.extend(
                    [
                        pick(|c| c.b),
                        c,
                        pick(|c| c.beta),
                        pick(|c| c.theta),
                        big_b,
                        pick(|c| c.big_c),
                        alpha,
                        alpha - big_b,
                        r.c_minus_alpha.unwrap_or(c - alpha),
                    ]
                    .map(fmt_machine),
                );
                f.push(r.overall.to_string());
            }
        }
        f
    }
}

/// Evaluates one grid point with [`verify`](crate::verify::verify).
pub fn sweep_point(n: u32, p: f64, q: f64, omega: f64, controls: &SolverControls) -> SweepRow {
    let mut row = SweepRow {
        n,
        p,
        q,
        omega,
        result: None,
    };
    let (Ok(params), Ok(dim)) = (DoublePowerParams::new(omega, p, q), Dimension::new(n)) else {
        return row;
    };
    if !params.exists_ground_state() {
        return row;
    }
    row.result = Some(match verify(&params, dim, controls) {
        Ok(report) => SweepResult {
            critical_points: report.critical_points,
            alpha: report.alpha,
            c_minus_alpha: report.c_minus_alpha,
            overall: report.overall,
        },
        Err(_) => SweepResult {
            critical_points: None,
            alpha: None,
            c_minus_alpha: None,
            overall: false,
        },
    });
    row
}

pub fn run_sweep(config: &CliConfig, spec: &SweepSpec, controls: &SolverControls) -> Vec<SweepRow> {
    spec.grid()
        .par_iter()
        .map(|&x| {
            let (mut n, mut p, mut q, mut omega) = (config.n, config.p, config.q, config.omega);
            match spec.var {
                SweepVar::Omega => omega = x,
                SweepVar::P => p = x,
                SweepVar::Q => q = x,
                SweepVar::N => n = x as u32,
            }
            sweep_point(n, p, q, omega, controls)
        })
        .collect()
}

fn cmd_sweep(config: &CliConfig, controls: &SolverControls) -> CliResult<()> {
    let spec = config
        .sweep
        .ok_or_else(|| CliError::Usage("sweep needs --sweep VAR:START:STOP:COUNT".into()))?;
    let rows = run_sweep(config, &spec, controls);
    if rows.iter().all(|r| r.result.is_none()) {
        return Err(CliError::EmptyGrid);
    }
    let text = match config.format {
        Some(Format::Json) => to_json(&json!({
            "sweep": spec,
            "controls": controls,
            "rows": rows,
        })),
        _ => {
            let mut s = csv_line(&SWEEP_COLUMNS);
            for row in &rows {
                s += &csv_line(&row.csv_fields());
            }
            s
        }
    };
    emit(config.output.as_deref(), &text)
}

fn cmd_sample_verify(config: &CliConfig, controls: &SolverControls, count: usize) -> CliResult<()> {
    let samples = random_samples(config.seed, count);
    let reports = samples
        .par_iter()
        .map(|(params, n)| verify(params, *n, controls))
        .collect::<crate::Result<Vec<VerificationReport>>>()?;
    let passed = reports.iter().filter(|r| r.overall).count();
    let text = match config.format {
        Some(Format::Csv) => {
            let mut s = csv_line(&["index", "n", "p", "q", "omega", "alpha", "overall", "failures"]);
            for (i, r) in reports.iter().enumerate() {
                let failures: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
                let mut row = vec![i.to_string(), r.params.n.to_string()];
                row.extend(
                    [r.params.p, r.params.q, r.params.omega, r.alpha.unwrap_or(f64::NAN)]
                        .map(fmt_machine),
                );
                row.push(r.overall.to_string());
                row.push(failures.join(";"));
                s += &csv_line(&row);
            }
            s
        }
        _ => to_json(&json!({
            "seed": config.seed,
            "count": count,
            "passed": passed,
            "controls": controls,
            "reports": reports,
        })),
    };
    emit(config.output.as_deref(), &text)
}
