use crate::error::CliError;
use num_complex::Complex64;
use qwalk_core::initial::{DEFAULT_GRID_SIZE, DEFAULT_TAIL_TOL};
use qwalk_core::{CoinAngle, InitCoin, Tabulated, WeightKind, WeightSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::path::{Path, PathBuf};

/// Tolerance on `|α|² + |β|² = 1` for user-supplied coins.
pub const COIN_TOL: f64 = 1e-9;

/// Gaussian seed width as a fraction of `|cos θ|` when none is given.
pub const DEFAULT_SIGMA_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WeightSelector {
    Unit,
    Semicircle,
    Arcsine,
    Gaussian,
    Uniform,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub theta: f64,
    /// `(re, im)`
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub weight: WeightSelector,
    pub sigma: Option<f64>,
    /// Two-column `(k, w)` CSV for the tabulated weight.
    pub tabulated_csv: Option<PathBuf>,
    pub t_list: Vec<u64>,
    pub r_list: Vec<u32>,
    pub grid_size: usize,
    pub tail_tol: f64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            theta: FRAC_PI_4,
            alpha: [FRAC_1_SQRT_2, 0.0],
            beta: [0.0, FRAC_1_SQRT_2],
            weight: WeightSelector::Unit,
            sigma: None,
            tabulated_csv: None,
            t_list: vec![1000],
            r_list: (0..=8).collect(),
            grid_size: DEFAULT_GRID_SIZE,
            tail_tol: DEFAULT_TAIL_TOL,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// A validated configuration with the core types built.
#[derive(Debug, Clone)]
pub struct Resolved {
    /// Echo of the input with every default filled in.
    pub config: ExperimentConfig,
    pub theta: CoinAngle,
    pub coin: InitCoin,
    pub weight: WeightSpec,
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let mut config = self.clone();
        if config.t_list.is_empty() {
            return Err(CliError::Config("t_list must not be empty".into()));
        }
        if config.t_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(format!(
                "t_list must be strictly ascending, got {:?}",
                config.t_list
            )));
        }
        if !config.theta.is_finite() {
            return Err(CliError::Config(format!("theta must be finite, got {}", config.theta)));
        }
        let theta = CoinAngle(config.theta);
        let coin = InitCoin::with_tolerance(
            Complex64::new(config.alpha[0], config.alpha[1]),
            Complex64::new(config.beta[0], config.beta[1]),
            COIN_TOL,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;

        let kind = match config.weight {
            WeightSelector::Unit => WeightKind::Unit,
            WeightSelector::Semicircle => WeightKind::Semicircle,
            WeightSelector::Arcsine => WeightKind::Arcsine,
            WeightSelector::Uniform => WeightKind::Uniform,
            WeightSelector::Gaussian => {
                let sigma = *config
                    .sigma
                    .get_or_insert(DEFAULT_SIGMA_FRACTION * theta.c().abs());
                WeightKind::Gaussian { sigma }
            }
            WeightSelector::Tabulated => {
                let path = config.tabulated_csv.as_ref().ok_or_else(|| {
                    CliError::Config("tabulated weight needs tabulated_csv / --tabulated".into())
                })?;
                WeightKind::Tabulated(load_tabulated(path)?)
            }
        };
        let weight = WeightSpec::new(kind, theta)?;
        Ok(Resolved {
            config,
            theta,
            coin,
            weight,
        })
    }
}

/// Reads a two-column `(k, w(k))` CSV on the uniform grid over `[−π, π)`.
/// A non-numeric first row is treated as a header.
pub fn load_tabulated(path: &Path) -> Result<Tabulated, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut pairs = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != 2 {
            return Err(CliError::Config(format!(
                "{} row {}: expected 2 columns, found {}",
                path.display(),
                i + 1,
                record.len()
            )));
        }
        let parsed = (record[0].parse::<f64>(), record[1].parse::<f64>());
        match parsed {
            (Ok(k), Ok(w)) => pairs.push((k, w)),
            _ if i == 0 => continue,
            _ => {
                return Err(CliError::Config(format!(
                    "{} row {}: cannot parse {:?}",
                    path.display(),
                    i + 1,
                    record
                )))
            }
        }
    }
    Ok(Tabulated::from_pairs(&pairs)?)
}
