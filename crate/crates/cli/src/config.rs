use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::CliError;

pub const OUT_DIR_ENV: &str = "OVERHANG_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Exact,
    Linear,
    Lemmas,
    All,
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// config file, then to the built-in default.
#[derive(Args, Clone, Debug, Default)]
pub struct RunArgs {
    /// Amplitude; `verify` accepts a comma-separated list
    #[arg(long = "A", value_delimiter = ',', allow_negative_numbers = true)]
    pub a: Vec<f64>,
    /// Gravity (target gravity for `continue`)
    #[arg(long = "G", allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Truncation order of the series [default: 128]
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Grid points [default: 512]
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// Continuation steps [default: 10]
    #[arg(long)]
    pub steps: Option<usize>,
    /// Newton residual tolerance [default: 1e-11]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory [default: $OVERHANG_OUT_DIR or .]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write only this kind of output
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat TOML file with defaults for the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Lower end of the amplitude bracket [default: 0.45]
    #[arg(long)]
    pub lo: Option<f64>,
    /// Upper end of the amplitude bracket [default: 0.46]
    #[arg(long)]
    pub hi: Option<f64>,
    /// Bracket width at which bisection may stop [default: 1e-6]
    #[arg(long = "bracket-tol")]
    pub bracket_tol: Option<f64>,
    /// Verification suite [default: all]
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "A")]
    a: Option<OneOrMany>,
    #[serde(rename = "G")]
    g: Option<f64>,
    #[serde(rename = "N")]
    n: Option<usize>,
    #[serde(rename = "M")]
    m: Option<usize>,
    steps: Option<usize>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    lo: Option<f64>,
    hi: Option<f64>,
    bracket_tol: Option<f64>,
    suite: Option<Suite>,
}

fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

/// Fully resolved settings of one invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub amplitudes: Vec<f64>,
    pub gravity: f64,
    pub modes: usize,
    pub points: usize,
    pub steps: usize,
    pub tol: f64,
    pub out: PathBuf,
    pub out_given: bool,
    pub format: Option<Format>,
    pub bracket: (f64, f64),
    pub bracket_tol: f64,
    pub suite: Suite,
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => load(p)?,
            None => FileConfig::default(),
        };
        let amplitudes = if !args.a.is_empty() {
            args.a.clone()
        } else {
            match file.a {
                Some(OneOrMany::One(a)) => vec![a],
                Some(OneOrMany::Many(v)) => v,
                None => Vec::new(),
            }
        };
        let explicit_out = args.out.clone().or(file.out);
        let out_given = explicit_out.is_some();
        let out = explicit_out
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Self {
            amplitudes,
            gravity: args.g.or(file.g).unwrap_or(0.0),
            modes: args.n.or(file.n).unwrap_or(128),
            points: args.m.or(file.m).unwrap_or(512),
            steps: args.steps.or(file.steps).unwrap_or(10),
            tol: args.tol.or(file.tol).unwrap_or(1e-11),
            out,
            out_given,
            format: args.format.or(file.format),
            bracket: (
                args.lo.or(file.lo).unwrap_or(0.45),
                args.hi.or(file.hi).unwrap_or(0.46),
            ),
            bracket_tol: args.bracket_tol.or(file.bracket_tol).unwrap_or(1e-6),
            suite: args.suite.or(file.suite).unwrap_or(Suite::All),
        })
    }

    pub fn wants(&self, f: Format) -> bool {
        self.format.is_none_or(|x| x == f)
    }

    /// The single amplitude of a non-verify command, checked against `range`.
    pub fn amplitude(&self, open_at_zero: bool) -> Result<f64, CliError> {
        let a = match self.amplitudes.as_slice() {
            [a] => *a,
            [] => return Err(CliError::Usage("--A is required".into())),
            _ => return Err(CliError::Usage("expected a single value for --A".into())),
        };
        let lower_ok = if open_at_zero { a > 0.0 } else { a >= 0.0 };
        if !(lower_ok && a < 0.5) {
            let range = if open_at_zero { "(0, 1/2)" } else { "[0, 1/2)" };
            return Err(CliError::Usage(format!("--A {a} is outside {range}")));
        }
        Ok(a)
    }

    pub fn check_gravity(&self) -> Result<(), CliError> {
        if !self.gravity.is_finite() {
            return Err(CliError::Usage(format!(
                "--G {} is not finite",
                self.gravity
            )));
        }
        Ok(())
    }

    pub fn check_grid(&self) -> Result<(), CliError> {
        if self.modes == 0 {
            return Err(CliError::Usage("--N must be at least 1".into()));
        }
        if self.points < 4 || !self.points.is_multiple_of(2) {
            return Err(CliError::Usage(format!(
                "--M {} must be even and at least 4",
                self.points
            )));
        }
        if self.points < 2 * self.modes + 2 {
            return Err(CliError::Usage(format!(
                "--M {} cannot resolve --N {} (need M >= 2N + 2)",
                self.points, self.modes
            )));
        }
        Ok(())
    }

    pub fn check_tolerance(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage(format!(
                "--tol {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }

    pub fn check_steps(&self) -> Result<(), CliError> {
        if self.steps == 0 {
            return Err(CliError::Usage("--steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn check_bracket(&self) -> Result<(), CliError> {
        let (lo, hi) = self.bracket;
        if !(lo < hi) {
            return Err(CliError::Usage(format!(
                "bracket ({lo}, {hi}) is empty or inverted"
            )));
        }
        if !(lo > 0.0 && hi < 0.5) {
            return Err(CliError::Usage(format!(
                "bracket ({lo}, {hi}) leaves (0, 1/2)"
            )));
        }
        if !(self.bracket_tol > 0.0) {
            return Err(CliError::Usage("--bracket-tol must be positive".into()));
        }
        Ok(())
    }
}
