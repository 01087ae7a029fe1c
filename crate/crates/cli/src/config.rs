//! Run configuration: command-line flags merged over an optional
//! `key = value` config file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use indexlab::kernels::TransformFamily;
use indexlab::quad::QuadratureControl;

use crate::parse::{parse_grid, parse_real};
use crate::CliError;

/// Keys accepted in config files.
pub const CONFIG_KEYS: [&str; 10] = [
    "family", "function", "c0", "gamma", "grid", "abs-tol", "rel-tol", "format", "out", "threshold",
];

const DEFAULT_GRID: [f64; 5] = [0.2, 0.5, 1.0, 2.0, 5.0];
const DEFAULT_C0: f64 = 0.5;
const DEFAULT_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by all subcommands. Each overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Transform family, e.g. exp-kl, power-exp:2, one-plus-t:3, truncated-mellin:a=1.
    #[arg(long)]
    pub family: Option<String>,
    /// Catalog function: exp, exp:a=<rate>, k0, rational, gauss, zero.
    #[arg(long)]
    pub function: Option<String>,
    /// Abscissa c0 of the Mellin image.
    #[arg(long, allow_hyphen_values = true)]
    pub c0: Option<String>,
    /// Abscissa gamma of the transform line.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Evaluation grid: x1,x2,..., lo:hi:n or log:lo:hi:n.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub abs_tol: Option<String>,
    #[arg(long)]
    pub rel_tol: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Config file of key = value lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Resolved configuration of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub family: Option<TransformFamily>,
    pub function: Option<String>,
    pub c0: f64,
    pub gamma: Option<f64>,
    pub grid: Vec<f64>,
    pub control: QuadratureControl,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threshold: f64,
}

/// Parses `key = value` lines; `#` starts a comment. Unknown and repeated keys are errors.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (number, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |why: &str| CliError::Resolution(format!("config line {}: {why}", number + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| at("expected key = value"))?;
        let (key, value) = (key.trim(), value.trim());
        if !CONFIG_KEYS.contains(&key) {
            return Err(at(&format!("unknown key '{key}'")));
        }
        if value.is_empty() {
            return Err(at(&format!("empty value for '{key}'")));
        }
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(at(&format!("repeated key '{key}'")));
        }
    }
    Ok(map)
}

impl RunConfig {
    /// Merges flags over the config file (if any) over defaults.
    pub fn resolve(args: &CommonArgs, threshold: Option<&str>) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Resolution(format!("cannot read config {}: {e}", path.display())))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        Self::from_sources(args, threshold, &file)
    }

    pub fn from_sources(
        args: &CommonArgs,
        threshold: Option<&str>,
        file: &BTreeMap<String, String>,
    ) -> Result<Self, CliError> {
        let pick = |flag: Option<&str>, key: &str| flag.map(str::to_string).or_else(|| file.get(key).cloned());
        let family = pick(args.family.as_deref(), "family")
            .map(|s| s.parse::<TransformFamily>().map_err(|e| CliError::Resolution(e.to_string())))
            .transpose()?;
        let function = pick(args.function.as_deref(), "function");
        let c0 = pick(args.c0.as_deref(), "c0")
            .map(|s| parse_real(&s))
            .transpose()?
            .unwrap_or(DEFAULT_C0);
        let gamma = pick(args.gamma.as_deref(), "gamma").map(|s| parse_real(&s)).transpose()?;
        let grid = match pick(args.grid.as_deref(), "grid") {
            Some(s) => parse_grid(&s)?,
            None => DEFAULT_GRID.to_vec(),
        };
        let defaults = QuadratureControl::default();
        let abs_tol = pick(args.abs_tol.as_deref(), "abs-tol")
            .map(|s| parse_real(&s))
            .transpose()?
            .unwrap_or(defaults.abs_tol);
        let rel_tol = pick(args.rel_tol.as_deref(), "rel-tol")
            .map(|s| parse_real(&s))
            .transpose()?
            .unwrap_or(defaults.rel_tol);
        let control =
            QuadratureControl::new(abs_tol, rel_tol).map_err(|e| CliError::Resolution(e.to_string()))?;
        let format = match (args.format, file.get("format")) {
            (Some(f), _) => f,
            (None, Some(s)) => Format::from_str(s, true)
                .map_err(|_| CliError::Resolution(format!("unknown format '{s}'")))?,
            (None, None) => Format::Csv,
        };
        let out = args.out.clone().or_else(|| file.get("out").map(PathBuf::from));
        let threshold = pick(threshold, "threshold")
            .map(|s| parse_real(&s))
            .transpose()?
            .unwrap_or(DEFAULT_THRESHOLD);
        if !(threshold > 0.0) {
            return Err(CliError::Resolution(format!("threshold {threshold} must be positive")));
        }
        Ok(RunConfig {
            family,
            function,
            c0,
            gamma,
            grid,
            control,
            format,
            out,
            threshold,
        })
    }

    pub fn require_family(&self) -> Result<&TransformFamily, CliError> {
        self.family
            .as_ref()
            .ok_or_else(|| CliError::Resolution("--family is required".into()))
    }

    pub fn require_function(&self) -> Result<&str, CliError> {
        self.function
            .as_deref()
            .ok_or_else(|| CliError::Resolution("--function is required".into()))
    }

    /// The configured gamma, or the family's default for c0.
    pub fn gamma_for(&self, family: &TransformFamily) -> Result<f64, CliError> {
        match self.gamma {
            Some(g) => Ok(g),
            None => family.default_gamma(self.c0).map_err(|e| CliError::Resolution(e.to_string())),
        }
    }
}
