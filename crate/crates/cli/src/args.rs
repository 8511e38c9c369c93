use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "helfrich", version, about = "Helfrich minimisers for surfaces of revolution")]
pub struct Cli {
    /// write results, and a manifest, into this directory instead of stdout
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// worker threads for `sweep`
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// JSON file whose keys mirror the long flags; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// c0, alpha0, cm, alpham, ac and alphacrit with their defining residuals
    Constants,
    /// minimise the Helfrich energy at one (alpha, epsilon)
    Solve(SolveArgs),
    /// solve over an (alpha, epsilon) grid and record regime flags
    Sweep(SweepArgs),
    /// closed-form rate of change at the Helfrich cylinder
    Rc(RcArgs),
    /// extrema of A cosh(ax) cos(ax) - B sinh(ax) sin(ax)
    Oscillation(OscillationArgs),
    /// re-evaluate a stored profile or solution
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long)]
    pub elements: Option<usize>,
    #[arg(long)]
    pub quadrature_order: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// cylinder, catenary or comparison
    #[arg(long)]
    pub seed_profile: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub multistart: Option<usize>,
    #[arg(long)]
    pub no_gluing: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub alpha_steps: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon_max: Option<f64>,
    #[arg(long)]
    pub epsilon_steps: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct RcArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OscillationArgs {
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a_coef: Option<f64>,
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b_coef: Option<f64>,
    #[arg(long = "a", allow_hyphen_values = true)]
    pub rate: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// a profile, or a solution written by `solve`
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// defaults to the weight stored in a solution file
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
}

/// Values of a JSON config file, looked up by flag name with `-` or `_`.
#[derive(Debug, Default)]
pub struct ConfigFile(Map<String, Value>);

impl ConfigFile {
    pub fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(map)) => Ok(Self(map)),
            Ok(_) => Err(CliError::Usage("config file must hold a JSON object".into())),
            Err(e) => Err(CliError::Usage(format!("config file: {e}"))),
        }
    }

    fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        let value = self.0.get(key).or_else(|| self.0.get(&key.replace('_', "-")));
        value
            .map(|v| {
                serde_json::from_value(v.clone())
                    .map_err(|e| CliError::Usage(format!("config key {key}: {e}")))
            })
            .transpose()
    }

    /// Flag value if given, otherwise the config entry.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    pub fn require<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T, CliError> {
        self.pick(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing --{}", key.replace('_', "-"))))
    }

    pub fn flag(&self, set: bool, key: &str) -> Result<bool, CliError> {
        Ok(set || self.get::<bool>(key)?.unwrap_or(false))
    }
}
