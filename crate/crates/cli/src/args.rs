use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{usage, CliError};

/// Largest jet order accepted on the command line.
pub const MAX_K: usize = 8;

#[derive(Debug, Parser)]
#[command(
    name = "jetsphere",
    version,
    about = "Jet space sphere embeddings: checks and experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Group axioms, dilations and norm homogeneity on random points.
    GroupCheck(GroupCheck),
    /// Jet evaluation against finite differences, plus flatness of the body.
    JetCheck(JetCheck),
    /// Sampled biLipschitz distortion of an embedding.
    Distortion(Distortion),
    /// The obstruction integral with its error bar.
    Obstruction(Obstruction),
    /// Obstruction scaling under h = (Mλ, M^{k+1} f̄).
    Scaling(Scaling),
    /// Interior vs boundary integrals of random exact forms.
    Stokes(Stokes),
    /// Comass of the pulled-back volume form.
    Comass(Comass),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GroupCheck {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct JetCheck {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    Circle,
    Sphere,
    Lambda,
    PolarLift,
    Identity,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Distortion {
    #[arg(long, value_enum)]
    pub map: MapKind,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 100_000)]
    pub pairs: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Obstruction {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Gauss points per axis per cell.
    #[arg(long, default_value_t = 32)]
    pub res: usize,
    /// Include the correction bump even when it is not needed.
    #[arg(long)]
    pub force_beta: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Scaling {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 32)]
    pub res: usize,
    #[arg(long = "M", value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0, 8.0])]
    #[serde(rename = "M")]
    pub m: Vec<f64>,
    /// Lipschitz constants for which the crossover scale is reported.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0, 100.0])]
    pub lambda_hat: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Smooth,
    Obstruction,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Stokes {
    /// Cubes of dimension 2..=n+1 for the smooth suite; sphere dimension
    /// for the obstruction suite.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Suite::Smooth)]
    pub suite: Suite,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 32)]
    pub res: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Comass {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

fn check_nk(n: usize, k: usize, min_n: usize) -> Result<(), CliError> {
    if n < min_n {
        return Err(usage(format!("--n must be at least {min_n}")));
    }
    if !(1..=MAX_K).contains(&k) {
        return Err(usage(format!("--k must be in 1..={MAX_K}")));
    }
    Ok(())
}

fn check_count(name: &str, v: usize) -> Result<(), CliError> {
    if v == 0 {
        return Err(usage(format!("--{name} must be at least 1")));
    }
    Ok(())
}

fn check_res(res: usize) -> Result<(), CliError> {
    if res < 2 {
        return Err(usage("--res must be at least 2"));
    }
    Ok(())
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GroupCheck(_) => "group-check",
            Command::JetCheck(_) => "jet-check",
            Command::Distortion(_) => "distortion",
            Command::Obstruction(_) => "obstruction",
            Command::Scaling(_) => "scaling",
            Command::Stokes(_) => "stokes",
            Command::Comass(_) => "comass",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::GroupCheck(a) => &a.common,
            Command::JetCheck(a) => &a.common,
            Command::Distortion(a) => &a.common,
            Command::Obstruction(a) => &a.common,
            Command::Scaling(a) => &a.common,
            Command::Stokes(a) => &a.common,
            Command::Comass(a) => &a.common,
        }
    }

    pub fn config(&self) -> serde_json::Result<serde_json::Value> {
        match self {
            Command::GroupCheck(a) => serde_json::to_value(a),
            Command::JetCheck(a) => serde_json::to_value(a),
            Command::Distortion(a) => serde_json::to_value(a),
            Command::Obstruction(a) => serde_json::to_value(a),
            Command::Scaling(a) => serde_json::to_value(a),
            Command::Stokes(a) => serde_json::to_value(a),
            Command::Comass(a) => serde_json::to_value(a),
        }
    }

    /// Range checks that clap cannot express.
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            Command::GroupCheck(a) => {
                check_nk(a.n, a.k, 1)?;
                check_count("trials", a.trials)
            }
            Command::JetCheck(a) => {
                check_nk(a.n, a.k, 1)?;
                check_count("trials", a.trials)
            }
            Command::Distortion(a) => {
                let min_n = if a.map == MapKind::Sphere { 2 } else { 1 };
                check_nk(a.n, a.k, min_n)?;
                check_count("pairs", a.pairs)
            }
            Command::Obstruction(a) => {
                check_nk(a.n, a.k, 2)?;
                check_res(a.res)
            }
            Command::Scaling(a) => {
                check_nk(a.n, a.k, 2)?;
                check_res(a.res)?;
                if a.m.len() < 2 || a.m.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
                    return Err(usage("--M needs at least two positive values"));
                }
                if a.lambda_hat.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                    return Err(usage("--lambda-hat values must be positive"));
                }
                Ok(())
            }
            Command::Stokes(a) => {
                check_nk(a.n, a.k, if a.suite == Suite::Obstruction { 2 } else { 1 })?;
                check_count("trials", a.trials)?;
                check_res(a.res)
            }
            Command::Comass(a) => {
                check_nk(a.n, a.k, 1)?;
                check_count("trials", a.trials)
            }
        }
    }
}
