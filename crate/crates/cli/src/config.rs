//! Run configuration: command-line flags, optionally overridden by a TOML file.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hwconn_landau::Poly2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid value for {key}: {detail}")]
    Invalid { key: &'static str, detail: String },
}

#[derive(Debug, Parser)]
#[command(name = "hwconn", version, about = "Verification suites for the formal Hitchin-Witten connection")]
pub struct Cli {
    /// TOML file whose keys override the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for report.json, table.csv and series.csv.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Seed for every randomized input.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a coefficient table as CSV.
    Coeffs(CoeffsArgs),
    /// Delta-power commutators, adiff and rewriting confluence.
    VerifyAlgebra(AlgebraArgs),
    /// The covariant-constancy recursion on zero and random diagonals.
    VerifyRecursion(RecursionArgs),
    /// Gauge trivialisation, symbolically or on the numerical model.
    VerifyTrivialisation(TrivialisationArgs),
    /// Operator-valued form identities and formal flatness.
    VerifyForms(FormsArgs),
    /// Experiments on the truncated plane model.
    Landau(LandauArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Diagonal {
    Zero,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Commutation,
    Dtdelta,
    FirstStep,
    Decay,
    Flatness,
    Trivialisation,
    Obstruction,
    Symbols,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoeffsArgs {
    #[arg(long, default_value_t = 1)]
    pub k: i64,
    #[arg(long, default_value_t = 6)]
    pub max_order: usize,
    #[arg(long, value_enum, default_value_t = Diagonal::Zero)]
    pub diagonal: Diagonal,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AlgebraArgs {
    #[arg(long, default_value_t = 1)]
    pub k: i64,
    /// Largest power in the delta-power commutator check.
    #[arg(long, default_value_t = 12)]
    pub max_power: u32,
    /// Largest order in the adiff check.
    #[arg(long, default_value_t = 8)]
    pub max_adiff: u32,
    /// Random words for the confluence check.
    #[arg(long, default_value_t = 10_000)]
    pub words: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RecursionArgs {
    #[arg(long, default_value_t = 1)]
    pub k: i64,
    #[arg(long, default_value_t = 6)]
    pub max_order: usize,
    /// Random diagonals checked besides the zero one.
    #[arg(long, default_value_t = 3)]
    pub random_diagonals: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrivialisationArgs {
    #[arg(long, default_value_t = 1)]
    pub k: i64,
    /// Series order of the symbolic check.
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    /// Run the path-transport comparison on the numerical model instead.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long = "N", default_value_t = 60)]
    #[serde(rename = "N")]
    pub n: u32,
    #[arg(long, default_value = "0+1i")]
    pub sigma: String,
    #[arg(long, default_value = "1+1i")]
    pub sigma1: String,
    #[arg(long, default_value_t = 4.0)]
    pub s: f64,
    /// Integrator step in the path parameter.
    #[arg(long, default_value_t = 1e-2)]
    pub step: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FormsArgs {
    #[arg(long, default_value_t = 1)]
    pub k: i64,
    /// Random forms per degree profile.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Largest degree of the formal curvature check.
    #[arg(long, default_value_t = 6)]
    pub max_degree: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LandauArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    #[arg(long, default_value_t = 1)]
    pub k: i64,
    #[arg(long = "N", default_value_t = 40)]
    #[serde(rename = "N")]
    pub n: u32,
    #[arg(long, default_value = "0+1i")]
    pub sigma: String,
    /// Tangent direction `V`.
    #[arg(long, default_value = "1+0i")]
    pub direction: String,
    /// Second direction `W` for two-form quantities.
    #[arg(long, default_value = "0+1i")]
    pub direction2: String,
    /// Imaginary part of the complex level `t = k + is`.
    #[arg(long, default_value_t = 5.0)]
    pub s: f64,
    /// Comma-separated grid of `s` values for the decay experiment.
    #[arg(long, value_delimiter = ',', default_values_t = [16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0])]
    pub s_grid: Vec<f64>,
    /// Finite-difference step; 1e-4 for `dtdelta`, 1e-3 otherwise.
    #[arg(long)]
    pub h: Option<f64>,
    /// Curve-operator polynomial, e.g. `x^2+y^2`.
    #[arg(long, default_value = "x")]
    pub f: String,
    /// Truncation order of the decay experiment.
    #[arg(long = "L", default_value_t = 1)]
    #[serde(rename = "L")]
    pub l: usize,
    /// Random operators for the symbol round trip.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

/// Polynomial given either as an expression or as `[i, j, re, im]` rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Expr(String),
    Coeffs(Vec<[f64; 4]>),
}

impl PolySpec {
    pub fn to_poly(&self) -> Result<Poly2<C64>, ConfigError> {
        match self {
            PolySpec::Expr(s) => Poly2::parse(s).map_err(|e| ConfigError::Invalid {
                key: "f",
                detail: e.to_string(),
            }),
            PolySpec::Coeffs(rows) => {
                let mut terms = Vec::with_capacity(rows.len());
                for &[i, j, re, im] in rows {
                    if i < 0.0 || j < 0.0 || i.fract() != 0.0 || j.fract() != 0.0 {
                        return Err(ConfigError::Invalid {
                            key: "f",
                            detail: format!("exponents must be nonnegative integers, got ({i}, {j})"),
                        });
                    }
                    terms.push(((i as u32, j as u32), C64::new(re, im)));
                }
                Ok(Poly2::from_terms(terms))
            }
        }
    }
}

/// The keys a config file may set; every one overrides the matching flag.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub k: Option<i64>,
    pub l: Option<usize>,
    #[serde(rename = "L")]
    pub big_l: Option<usize>,
    #[serde(rename = "N")]
    pub n: Option<u32>,
    pub sigma: Option<String>,
    pub sigma1: Option<String>,
    pub direction: Option<String>,
    pub direction2: Option<String>,
    pub s: Option<f64>,
    pub s_grid: Option<Vec<f64>>,
    pub h: Option<f64>,
    pub step: Option<f64>,
    pub f: Option<PolySpec>,
    pub diagonal: Option<Diagonal>,
    pub random_diagonals: Option<usize>,
    pub samples: Option<usize>,
    pub words: Option<usize>,
    pub max_power: Option<u32>,
    pub max_adiff: Option<u32>,
    pub max_degree: Option<u32>,
    pub numeric: Option<bool>,
    pub experiment: Option<Experiment>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }
}

fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
    if let Some(v) = v {
        *slot = v.clone();
    }
}

impl Cli {
    /// Applies the config file, if any, over the parsed flags.
    pub fn merged(mut self) -> Result<(Self, Option<PolySpec>), ConfigError> {
        let Some(path) = self.config.clone() else {
            return Ok((self, None));
        };
        let c = RunConfig::load(&path)?;
        set(&mut self.seed, &c.seed);
        set(&mut self.out, &c.out);
        match &mut self.command {
            Command::Coeffs(a) => {
                set(&mut a.k, &c.k);
                set(&mut a.max_order, &c.l);
                set(&mut a.diagonal, &c.diagonal);
            }
            Command::VerifyAlgebra(a) => {
                set(&mut a.k, &c.k);
                set(&mut a.max_power, &c.max_power);
                set(&mut a.max_adiff, &c.max_adiff);
                set(&mut a.words, &c.words);
            }
            Command::VerifyRecursion(a) => {
                set(&mut a.k, &c.k);
                set(&mut a.max_order, &c.l);
                set(&mut a.random_diagonals, &c.random_diagonals);
            }
            Command::VerifyTrivialisation(a) => {
                set(&mut a.k, &c.k);
                set(&mut a.order, &c.big_l);
                set(&mut a.numeric, &c.numeric);
                set(&mut a.n, &c.n);
                set(&mut a.sigma, &c.sigma);
                set(&mut a.sigma1, &c.sigma1);
                set(&mut a.s, &c.s);
                set(&mut a.step, &c.step);
            }
            Command::VerifyForms(a) => {
                set(&mut a.k, &c.k);
                set(&mut a.samples, &c.samples);
                set(&mut a.max_degree, &c.max_degree);
            }
            Command::Landau(a) => {
                set(&mut a.experiment, &c.experiment);
                set(&mut a.k, &c.k);
                set(&mut a.n, &c.n);
                set(&mut a.sigma, &c.sigma);
                set(&mut a.direction, &c.direction);
                set(&mut a.direction2, &c.direction2);
                set(&mut a.s, &c.s);
                set(&mut a.s_grid, &c.s_grid);
                if c.h.is_some() {
                    a.h = c.h;
                }
                set(&mut a.l, &c.big_l);
                set(&mut a.samples, &c.samples);
            }
        }
        Ok((self, c.f))
    }
}

pub fn parse_complex(key: &'static str, s: &str) -> Result<C64, ConfigError> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    cleaned
        .parse::<C64>()
        .map_err(|e| ConfigError::Invalid {
            key,
            detail: format!("{s:?}: {e}"),
        })
}
