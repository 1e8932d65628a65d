//! Command-line front end: evaluate states, run evolution sweeps, emit
//! density/current/moment/contour data and verification reports.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 invalid arguments,
//! 3 resource limit.

mod output;

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

use coherent2d::contour::{marching_squares, ScalarLattice};
use coherent2d::dynamics::{evolve_params, gaussian_center, gaussian_dispersions, gaussian_moments, rs_determinant};
use coherent2d::grid::{cartesian_moments, PolarGrid, WaveField};
use coherent2d::state::{amplitude, Chirality, CoherentParams, PolarPoint};
use coherent2d::verify::run_checks;
use coherent2d::Error as CoreError;

use output::{fmt_f, CsvTable, JsonWriter};

#[derive(Parser)]
#[command(name = "coherent2d", version, about = "Elliptically polarized coherent states of the 2D oscillator: evaluate, evolve, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export |Psi|^2 on a cartesian lattice with threshold contours and the
    /// classical ellipse, one frame per time step.
    Density(DensityArgs),
    /// Emit per-time-step packet moments, dispersions, and
    /// Robertson-Schrodinger determinants, closed form next to quadrature.
    Evolve(EvolveArgs),
    /// Run the full invariant suite and emit a pass/fail report.
    Check(CheckArgs),
}

#[derive(Args, Clone)]
struct StateArgs {
    /// Real part of alpha (|alpha| < 1).
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    alpha_re: f64,
    /// Imaginary part of alpha.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    alpha_im: f64,
    /// Real part of beta.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    beta_re: f64,
    /// Imaginary part of beta.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta_im: f64,
    /// Sense of rotation (right carries e^{+i l phi}).
    #[arg(long, value_enum, default_value_t = ChiralityArg::Right)]
    chirality: ChiralityArg,
    /// Grid accuracy target for quadrature legs.
    #[arg(long, default_value_t = 1e-8)]
    accuracy: f64,
}

#[derive(Args, Clone)]
struct TimeArgs {
    /// Start time (units of 1/omega).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    /// End time.
    #[arg(long, default_value_t = TAU, allow_negative_numbers = true)]
    t1: f64,
    /// Number of steps; t0 and t1 are both sampled (steps + 1 records).
    #[arg(long, default_value_t = 32)]
    steps: usize,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    time: TimeArgs,
    /// Density level of the exported contour.
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
    /// Points per lattice axis.
    #[arg(long, default_value_t = 201)]
    lattice: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output base path: CSV writes <out>.density.csv, <out>.contours.csv,
    /// <out>.ellipse.csv; JSON writes a single document at <out>.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    time: TimeArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scale sampled amplitudes by (1 + c); negative control for the
    /// verification pipeline.
    #[arg(long, hide = true, allow_negative_numbers = true)]
    corrupt_amplitude: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChiralityArg {
    Right,
    Left,
}

impl From<ChiralityArg> for Chirality {
    fn from(c: ChiralityArg) -> Chirality {
        match c {
            ChiralityArg::Right => Chirality::Right,
            ChiralityArg::Left => Chirality::Left,
        }
    }
}

enum RunError {
    InvalidArgs(String),
    ResourceLimit(String),
    Failure(String),
    /// Ran to completion but an invariant check failed.
    ChecksFailed,
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::ResourceLimit(_) | CoreError::TruncationInsufficient { .. } => {
                RunError::ResourceLimit(e.to_string())
            }
            CoreError::InvalidParameter(_)
            | CoreError::ChiralityMismatch(_)
            | CoreError::Domain(_)
            | CoreError::NonRealGauge => RunError::InvalidArgs(e.to_string()),
            other => RunError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Failure(format!("i/o error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Density(args) => cmd_density(args),
        Command::Evolve(args) => cmd_evolve(args),
        Command::Check(args) => cmd_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::ChecksFailed) => ExitCode::from(1),
        Err(RunError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(RunError::InvalidArgs(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::ResourceLimit(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn parse_state(args: &StateArgs) -> Result<CoherentParams, RunError> {
    if args.accuracy <= 0.0 {
        return Err(RunError::InvalidArgs("accuracy must be positive".into()));
    }
    CoherentParams::new(
        C64::new(args.alpha_re, args.alpha_im),
        C64::new(args.beta_re, args.beta_im),
        args.chirality.into(),
    )
    .map_err(RunError::from)
}

fn validate_time(time: &TimeArgs) -> Result<(), RunError> {
    if time.steps == 0 {
        return Err(RunError::InvalidArgs("steps must be >= 1".into()));
    }
    if time.t1 < time.t0 {
        return Err(RunError::InvalidArgs("t1 must be >= t0".into()));
    }
    Ok(())
}

fn time_samples(time: &TimeArgs) -> Vec<f64> {
    (0..=time.steps)
        .map(|k| time.t0 + (time.t1 - time.t0) * k as f64 / time.steps as f64)
        .collect()
}

fn write_out(path: &Path, contents: &str) -> Result<(), RunError> {
    std::fs::write(path, contents)?;
    Ok(())
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

fn cmd_density(args: DensityArgs) -> Result<(), RunError> {
    let params = parse_state(&args.state)?;
    validate_time(&args.time)?;
    if args.threshold <= 0.0 {
        return Err(RunError::InvalidArgs("threshold must be positive".into()));
    }
    if args.lattice < 2 {
        return Err(RunError::InvalidArgs("lattice must have at least 2 points".into()));
    }

    // export window: classical reach padded by four packet widths
    let a_mag = params.alpha().norm();
    let reach = params.beta().norm() / (1.0 - a_mag);
    let width = (0.5 * (1.0 + a_mag) / (1.0 - a_mag)).sqrt();
    let half = reach + 4.0 * width;
    let n = args.lattice;
    let axis: Vec<f64> = (0..n)
        .map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64)
        .collect();

    let times = time_samples(&args.time);
    let mut frames = Vec::new();
    for &t in &times {
        let evolved = evolve_params(&params, t);
        let lattice = ScalarLattice::from_fn(axis.clone(), axis.clone(), |x, y| {
            let r = (x * x + y * y).sqrt();
            let phi = y.atan2(x);
            amplitude(&evolved, PolarPoint::new(r, phi)).norm_sqr()
        });
        let contours = marching_squares(&lattice, args.threshold);
        if contours.is_empty() && args.threshold > lattice.max_value() {
            eprintln!(
                "warning: threshold {} exceeds the density maximum {:.6e} at t = {t:.6}; contour is empty",
                args.threshold,
                lattice.max_value()
            );
        }
        frames.push((t, lattice, contours));
    }

    // classical center trajectory (valid for complex parameters through the
    // exact Gaussian algebra)
    let ellipse: Vec<[f64; 2]> = (0..=128)
        .map(|k| {
            let t = TAU * k as f64 / 128.0;
            gaussian_center(&evolve_params(&params, t)).0
        })
        .collect();

    match args.format {
        Format::Csv => {
            let mut density = CsvTable::new(&["x", "y", "t", "density"]);
            for (t, lattice, _) in &frames {
                for (i, &x) in lattice.xs.iter().enumerate() {
                    for (j, &y) in lattice.ys.iter().enumerate() {
                        density.row(&[fmt_f(x), fmt_f(y), fmt_f(*t), fmt_f(lattice.value(i, j))]);
                    }
                }
            }
            write_out(&with_suffix(&args.out, ".density.csv"), &density.finish())?;

            let mut contours = CsvTable::new(&["t", "polyline", "vertex", "x", "y"]);
            for (t, _, polys) in &frames {
                for (pid, poly) in polys.iter().enumerate() {
                    for (vid, p) in poly.points.iter().enumerate() {
                        contours.row(&[
                            fmt_f(*t),
                            pid.to_string(),
                            vid.to_string(),
                            fmt_f(p[0]),
                            fmt_f(p[1]),
                        ]);
                    }
                }
            }
            write_out(&with_suffix(&args.out, ".contours.csv"), &contours.finish())?;

            let mut ell = CsvTable::new(&["polyline", "vertex", "x", "y"]);
            for (vid, p) in ellipse.iter().enumerate() {
                ell.row(&["0".to_string(), vid.to_string(), fmt_f(p[0]), fmt_f(p[1])]);
            }
            write_out(&with_suffix(&args.out, ".ellipse.csv"), &ell.finish())?;
        }
        Format::Json => {
            let mut w = JsonWriter::new();
            w.raw("{\"density\":[");
            let mut first = true;
            for (t, lattice, _) in &frames {
                for (i, &x) in lattice.xs.iter().enumerate() {
                    for (j, &y) in lattice.ys.iter().enumerate() {
                        if !first {
                            w.raw(",");
                        }
                        first = false;
                        w.raw("{\"x\":").number(x).raw(",\"y\":").number(y);
                        w.raw(",\"t\":").number(*t);
                        w.raw(",\"density\":").number(lattice.value(i, j)).raw("}");
                    }
                }
            }
            w.raw("],\"contours\":[");
            let mut first = true;
            for (t, _, polys) in &frames {
                for (pid, poly) in polys.iter().enumerate() {
                    for (vid, p) in poly.points.iter().enumerate() {
                        if !first {
                            w.raw(",");
                        }
                        first = false;
                        w.raw("{\"t\":").number(*t);
                        w.raw(",\"polyline\":").integer(pid);
                        w.raw(",\"vertex\":").integer(vid);
                        w.raw(",\"x\":").number(p[0]).raw(",\"y\":").number(p[1]).raw("}");
                    }
                }
            }
            w.raw("],\"ellipse\":[");
            for (vid, p) in ellipse.iter().enumerate() {
                if vid > 0 {
                    w.raw(",");
                }
                w.raw("{\"polyline\":0,\"vertex\":").integer(vid);
                w.raw(",\"x\":").number(p[0]).raw(",\"y\":").number(p[1]).raw("}");
            }
            w.raw("]}\n");
            write_out(&args.out, &w.finish())?;
        }
    }
    Ok(())
}

const EVOLVE_QUANTITIES: [&str; 12] = [
    "qx", "qy", "px", "py", "dx2", "dy2", "dpx2", "dpy2", "dxpx", "dypy", "rs_x", "rs_y",
];

fn cmd_evolve(args: EvolveArgs) -> Result<(), RunError> {
    let params = parse_state(&args.state)?;
    validate_time(&args.time)?;
    let grid = PolarGrid::build(&params, args.state.accuracy)?;

    struct Record {
        t: f64,
        closed: [f64; 12],
        quad: [f64; 12],
        norm: f64,
    }

    let mut records = Vec::new();
    for t in time_samples(&args.time) {
        let evolved = evolve_params(&params, t);
        // closed path: exact complex-parameter Gaussian algebra (equals the
        // textbook real-gauge formulas when alpha, beta are real)
        let m = gaussian_moments(&params, t);
        let d = gaussian_dispersions(&evolved, t);
        let (rs_x, rs_y) = rs_determinant(&d);
        let closed = [
            m.q[0], m.q[1], m.p[0], m.p[1], d.dx2, d.dy2, d.dpx2, d.dpy2, d.dxpx, d.dypy,
            rs_x, rs_y,
        ];
        let f = WaveField::sample(&evolved, &grid);
        let mo = cartesian_moments(&f);
        let quad = [
            mo.x,
            mo.y,
            mo.px,
            mo.py,
            mo.dx2(),
            mo.dy2(),
            mo.dpx2(),
            mo.dpy2(),
            mo.dxpx(),
            mo.dypy(),
            mo.dx2() * mo.dpx2() - mo.dxpx() * mo.dxpx(),
            mo.dy2() * mo.dpy2() - mo.dypy() * mo.dypy(),
        ];
        records.push(Record { t, closed, quad, norm: mo.norm });
    }

    let body = match args.format {
        Format::Csv => {
            let mut header = vec!["t".to_string()];
            for q in EVOLVE_QUANTITIES {
                header.push(format!("{q}_closed"));
                header.push(format!("{q}_quad"));
                header.push(format!("{q}_absdiff"));
            }
            header.push("norm_quad".to_string());
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut table = CsvTable::new(&header_refs);
            for r in &records {
                let mut row = vec![fmt_f(r.t)];
                for k in 0..12 {
                    row.push(fmt_f(r.closed[k]));
                    row.push(fmt_f(r.quad[k]));
                    row.push(fmt_f((r.closed[k] - r.quad[k]).abs()));
                }
                row.push(fmt_f(r.norm));
                table.row(&row);
            }
            table.finish()
        }
        Format::Json => {
            let mut w = JsonWriter::new();
            w.raw("[");
            for (i, r) in records.iter().enumerate() {
                if i > 0 {
                    w.raw(",");
                }
                w.raw("{\"t\":").number(r.t);
                for (k, q) in EVOLVE_QUANTITIES.iter().enumerate() {
                    w.raw(&format!(",\"{q}_closed\":")).number(r.closed[k]);
                    w.raw(&format!(",\"{q}_quad\":")).number(r.quad[k]);
                    w.raw(&format!(",\"{q}_absdiff\":"))
                        .number((r.closed[k] - r.quad[k]).abs());
                }
                w.raw(",\"norm_quad\":").number(r.norm).raw("}");
            }
            w.raw("]\n");
            w.finish()
        }
    };

    match &args.out {
        Some(path) => write_out(path, &body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<(), RunError> {
    let params = parse_state(&args.state)?;
    let report = run_checks(&params, args.state.accuracy, args.corrupt_amplitude)?;

    let body = match args.format {
        Format::Json => {
            let mut w = JsonWriter::new();
            w.raw("{\"alpha_re\":").number(report.alpha.re);
            w.raw(",\"alpha_im\":").number(report.alpha.im);
            w.raw(",\"beta_re\":").number(report.beta.re);
            w.raw(",\"beta_im\":").number(report.beta.im);
            w.raw(",\"chirality\":").string(&report.chirality.to_string());
            w.raw(",\"passed\":").boolean(report.passed());
            w.raw(",\"checks\":[");
            for (i, c) in report.checks.iter().enumerate() {
                if i > 0 {
                    w.raw(",");
                }
                w.raw("{\"name\":").string(&c.name);
                w.raw(",\"residual\":").number(c.residual);
                w.raw(",\"tolerance\":").number(c.tolerance);
                w.raw(",\"passed\":").boolean(c.passed).raw("}");
            }
            w.raw("]}\n");
            w.finish()
        }
        Format::Csv => {
            let mut table = CsvTable::new(&["name", "residual", "tolerance", "passed"]);
            for c in &report.checks {
                table.row(&[
                    c.name.clone(),
                    fmt_f(c.residual),
                    fmt_f(c.tolerance),
                    c.passed.to_string(),
                ]);
            }
            table.finish()
        }
    };

    match &args.out {
        Some(path) => write_out(path, &body)?,
        None => print!("{body}"),
    }

    if report.passed() {
        Ok(())
    } else {
        Err(RunError::ChecksFailed)
    }
}
