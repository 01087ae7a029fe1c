//! Command-line harness for indexlab: kernels, forward and inverse
//! transforms, round trips, identity suites and the function catalog, with
//! CSV or JSON output.

pub mod config;
pub mod output;
pub mod parse;
pub mod suites;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use indexlab::kernels::{forward_kernel, forward_kernel_closed, inverse_kernel, inverse_kernel_series, TransformFamily};
use indexlab::mellin::{catalog, catalog_entry, MellinImage};
use indexlab::transforms::{
    forward_barnes, forward_direct, forward_line, round_trip, try_invert, Contour, ForwardPath, RoundTripReport,
};

pub use config::{CommonArgs, Format, RunConfig};
pub use output::{write_output, Cell, Table};
pub use suites::Suite;

/// Failure of a run, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A name, literal or path could not be resolved (exit 2).
    #[error("{0}")]
    Resolution(String),
    /// The numerical engine failed (exit 3).
    #[error(transparent)]
    Numerical(#[from] indexlab::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Resolution(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) | CliError::Output(_) => 1,
        }
    }
}

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "INDEXLAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "indexlab", version, about = "Index transforms generated by Mellin and Laplace operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Forward or inverse kernel on the grid.
    Kernel(KernelArgs),
    /// (Ff)(z) by direct and Mellin–Barnes paths, on Re z = gamma at Im z = grid or at --z.
    Forward(ForwardArgs),
    /// Inversion of the Mellin–Barnes image at each grid point.
    Inverse(CommonArgs),
    /// f -> Ff -> f on the grid; exit 0 iff the error is below --threshold.
    Roundtrip(RoundtripArgs),
    /// Identity suite.
    Identity(IdentityArgs),
    /// Catalog functions with their self-verification error.
    Catalog(CommonArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Representation {
    Integral,
    Closed,
    Inverse,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Kernel index z, e.g. 0.5, -0.5+2i, (1,-1).
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, value_enum, default_value = "closed")]
    pub representation: Representation,
}

#[derive(Args, Debug)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Single evaluation point instead of the line.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
}

#[derive(Args, Debug)]
pub struct RoundtripArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Largest accepted relative reconstruction error.
    #[arg(long)]
    pub threshold: Option<String>,
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub suite: Suite,
}

/// Encoded output of a run and whether it met its own acceptance test.
#[derive(Debug)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub success: bool,
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    if b.norm() > 0.0 {
        (a - b).norm() / b.norm()
    } else {
        a.norm()
    }
}

fn resolve_function(cfg: &RunConfig) -> Result<MellinImage, CliError> {
    let name = cfg.require_function()?;
    catalog_entry(name, cfg.c0)
        .map(|e| e.image)
        .map_err(|e| CliError::Resolution(e.to_string()))
}

fn nan() -> Complex64 {
    Complex64::new(f64::NAN, f64::NAN)
}

/// Runs a parsed command and encodes its output.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Kernel(a) => {
            let cfg = RunConfig::resolve(&a.common, None)?;
            let z = parse::parse_complex(&a.z)?;
            finish_table(cmd_kernel(&cfg, z, a.representation)?, &cfg)
        }
        Command::Forward(a) => {
            let cfg = RunConfig::resolve(&a.common, None)?;
            let z = a.z.as_deref().map(parse::parse_complex).transpose()?;
            finish_table(cmd_forward(&cfg, z)?, &cfg)
        }
        Command::Inverse(common) => {
            let cfg = RunConfig::resolve(common, None)?;
            finish_table(cmd_inverse(&cfg)?, &cfg)
        }
        Command::Roundtrip(a) => {
            let cfg = RunConfig::resolve(&a.common, a.threshold.as_deref())?;
            let report = cmd_roundtrip(&cfg)?;
            let success = report.max_rel_error <= cfg.threshold;
            let bytes = match cfg.format {
                Format::Json => output::to_json(&ReportJson::from(&report))?,
                Format::Csv => roundtrip_table(&report).to_csv()?,
            };
            Ok(Outcome { bytes, success })
        }
        Command::Identity(a) => {
            let cfg = RunConfig::resolve(&a.common, None)?;
            let cases = suites::run_suite(a.suite, &cfg.control)?;
            let success = cases.iter().all(|c| c.pass);
            let bytes = suites::identity_table(&cases).encode(cfg.format)?;
            Ok(Outcome { bytes, success })
        }
        Command::Catalog(common) => {
            let cfg = RunConfig::resolve(common, None)?;
            finish_table(cmd_catalog(&cfg)?, &cfg)
        }
    }
}

fn finish_table(table: Table, cfg: &RunConfig) -> Result<Outcome, CliError> {
    Ok(Outcome {
        bytes: table.encode(cfg.format)?,
        success: true,
    })
}

/// Output path of a resolved command, for the binary.
pub fn output_path(cli: &Cli) -> Result<Option<std::path::PathBuf>, CliError> {
    let (common, threshold) = match &cli.command {
        Command::Kernel(a) => (&a.common, None),
        Command::Forward(a) => (&a.common, None),
        Command::Inverse(c) | Command::Catalog(c) => (c, None),
        Command::Roundtrip(a) => (&a.common, a.threshold.as_deref()),
        Command::Identity(a) => (&a.common, None),
    };
    Ok(RunConfig::resolve(common, threshold)?.out)
}

/// Rows (x, re, im, error): the requested representation and its
/// discrepancy from the other one where both exist.
pub fn cmd_kernel(cfg: &RunConfig, z: Complex64, rep: Representation) -> Result<Table, CliError> {
    let family = cfg.require_family()?;
    let control = cfg.control;
    let rows: Vec<Result<(Complex64, f64), CliError>> = cfg
        .grid
        .par_iter()
        .map(|&x| {
            Ok(match rep {
                Representation::Integral => {
                    let v = forward_kernel(family, z, x, &control)?;
                    let k = forward_kernel_closed(family, z, x, &control)?;
                    (v, if k.closed_form { relative(v, k.value) } else { f64::NAN })
                }
                Representation::Closed => {
                    let k = forward_kernel_closed(family, z, x, &control)?;
                    let error = if k.closed_form {
                        relative(k.value, forward_kernel(family, z, x, &control)?)
                    } else {
                        f64::NAN
                    };
                    (k.value, error)
                }
                Representation::Inverse => {
                    let k = inverse_kernel(family, z, x)?;
                    let error = if k.closed_form {
                        inverse_kernel_series(family, z, x)
                            .map(|s| relative(k.value, s))
                            .unwrap_or(f64::NAN)
                    } else {
                        f64::NAN
                    };
                    (k.value, error)
                }
            })
        })
        .collect();
    let mut t = Table::new(&["x", "re", "im", "error"]);
    for (&x, r) in cfg.grid.iter().zip(rows) {
        let (v, e) = r?;
        t.push(vec![x.into(), v.re.into(), v.im.into(), e.into()]);
    }
    Ok(t)
}

/// Rows (x = Im z, re, im, error, re_direct, im_direct): the Barnes value and
/// its relative discrepancy from the direct integral.
pub fn cmd_forward(cfg: &RunConfig, z: Option<Complex64>) -> Result<Table, CliError> {
    let family = cfg.require_family()?;
    let f = resolve_function(cfg)?;
    let points: Vec<Complex64> = match z {
        Some(z) => vec![z],
        None => {
            let gamma = cfg.gamma_for(family)?;
            cfg.grid.iter().map(|&t| Complex64::new(gamma, t)).collect()
        }
    };
    let control = cfg.control;
    let rows: Vec<Result<(Complex64, Complex64), CliError>> = points
        .par_iter()
        .map(|&z| {
            let b = forward_barnes(family, &f, z, &control)?;
            let d = forward_direct(family, &f, z, &control)?;
            Ok((b, d))
        })
        .collect();
    let mut t = Table::new(&["x", "re", "im", "error", "re_direct", "im_direct"]);
    for (z, r) in points.iter().zip(rows) {
        let (b, d) = r?;
        t.push(vec![
            z.im.into(),
            b.re.into(),
            b.im.into(),
            relative(d, b).into(),
            d.re.into(),
            d.im.into(),
        ]);
    }
    Ok(t)
}

fn contour_name(c: Contour) -> String {
    match c {
        Contour::Vertical => "vertical".into(),
        Contour::Bent { bend_height, angle } => format!("bent:{bend_height}:{angle:.6}"),
    }
}

/// Rows (x, re, im, error, contour): inversion of the Barnes image, error
/// relative to the function's closed form.
pub fn cmd_inverse(cfg: &RunConfig) -> Result<Table, CliError> {
    let family = cfg.require_family()?;
    let f = resolve_function(cfg)?;
    let gamma = cfg.gamma_for(family)?;
    let control = cfg.control;
    let ff = forward_line(family, &f, gamma, ForwardPath::Barnes, &control)?;
    let rows: Vec<Result<(Complex64, Complex64, Contour), CliError>> = cfg
        .grid
        .par_iter()
        .map(|&x| {
            let inv = try_invert(family, &ff, x, &control)?;
            let reference = f.value_at(x, &control).unwrap_or_else(|_| nan());
            Ok((inv.value, reference, inv.contour))
        })
        .collect();
    let mut t = Table::new(&["x", "re", "im", "error", "contour"]);
    for (&x, r) in cfg.grid.iter().zip(rows) {
        let (v, reference, contour) = r?;
        t.push(vec![
            x.into(),
            v.re.into(),
            v.im.into(),
            relative(v, reference).into(),
            contour_name(contour).into(),
        ]);
    }
    Ok(t)
}

pub fn cmd_roundtrip(cfg: &RunConfig) -> Result<RoundTripReport, CliError> {
    let family = cfg.require_family()?;
    let f = resolve_function(cfg)?;
    let gamma = cfg.gamma_for(family)?;
    Ok(round_trip(family, &f, gamma, &cfg.grid, &cfg.control)?)
}

/// Field-for-field JSON form of a [`RoundTripReport`]; complex numbers as [re, im].
#[derive(Serialize)]
pub struct ReportJson {
    pub grid: Vec<f64>,
    pub reconstructed: Vec<[f64; 2]>,
    pub reference: Vec<[f64; 2]>,
    pub max_rel_error: f64,
    pub per_point: Vec<(f64, f64)>,
    pub tail_diagnostics: String,
}

impl From<&RoundTripReport> for ReportJson {
    fn from(r: &RoundTripReport) -> Self {
        let pairs = |v: &[Complex64]| v.iter().map(|c| [c.re, c.im]).collect();
        ReportJson {
            grid: r.grid.clone(),
            reconstructed: pairs(&r.reconstructed),
            reference: pairs(&r.reference),
            max_rel_error: r.max_rel_error,
            per_point: r.per_point.clone(),
            tail_diagnostics: r.tail_diagnostics.clone(),
        }
    }
}

pub fn roundtrip_table(r: &RoundTripReport) -> Table {
    let mut t = Table::new(&["x", "re", "im", "error", "ref_re", "ref_im"]);
    for k in 0..r.grid.len() {
        t.push(vec![
            r.grid[k].into(),
            r.reconstructed[k].re.into(),
            r.reconstructed[k].im.into(),
            r.per_point[k].1.into(),
            r.reference[k].re.into(),
            r.reference[k].im.into(),
        ]);
    }
    t
}

/// Rows (name, label, strip_lo, strip_hi, c1, c2, verify_error) for c0.
pub fn cmd_catalog(cfg: &RunConfig) -> Result<Table, CliError> {
    let entries = catalog(cfg.c0)?;
    let errors: Vec<Result<f64, CliError>> = entries
        .par_iter()
        .map(|e| Ok(e.verify(&cfg.control)?))
        .collect();
    let mut t = Table::new(&["name", "label", "strip_lo", "strip_hi", "c1", "c2", "verify_error"]);
    for (e, err) in entries.iter().zip(errors) {
        let (lo, hi) = e.image.strip();
        let (c1, c2) = e.image.decay_class();
        t.push(vec![
            e.name.clone().into(),
            e.image.label().into(),
            lo.into(),
            hi.into(),
            c1.into(),
            c2.into(),
            err?.into(),
        ]);
    }
    Ok(t)
}

/// Resolves a family name; failures are resolution errors (exit 2).
pub fn parse_family(text: &str) -> Result<TransformFamily, CliError> {
    text.parse::<TransformFamily>()
        .map_err(|e| CliError::Resolution(e.to_string()))
}
