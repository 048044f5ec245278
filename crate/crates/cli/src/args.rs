use crate::commands::Figure1Options;
use crate::config::{ExperimentConfig, WeightSelector};
use crate::error::CliError;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "One-dimensional two-state quantum walk experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the walk and write the distribution of X_t for every t.
    Simulate(ExperimentArgs),
    /// Write the limit density on a 2001-point grid over ±0.999|cos θ|.
    Density(ExperimentArgs),
    /// Compare simulated, x-space and k-space moments of X_t/t.
    Moments(ExperimentArgs),
    /// KS distances and moment errors along t, with a power-law fit.
    Convergence(ExperimentArgs),
    /// Overlays of the four seed laws at t = 5000 with the coin (1/√2, i/√2).
    Figure1(Figure1Args),
}

/// JSON config file plus flag overrides; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct ExperimentArgs {
    /// JSON file with any subset of the config fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Coin angle θ in radians.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_im: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_re: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta_im: Option<f64>,
    #[arg(long, value_enum)]
    pub weight: Option<WeightSelector>,
    /// Gaussian seed width (default 0.25·|cos θ|).
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Two-column (k, w) CSV for `--weight tabulated`.
    #[arg(long)]
    pub tabulated: Option<PathBuf>,
    /// Step counts, comma separated and strictly ascending.
    #[arg(long = "t", value_delimiter = ',')]
    pub t_list: Option<Vec<u64>>,
    /// Moment orders 0..=r-max.
    #[arg(long)]
    pub r_max: Option<u32>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    #[arg(long)]
    pub tail_tol: Option<f64>,
    #[arg(long = "out")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentArgs {
    pub fn to_config(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.theta {
            cfg.theta = v;
        }
        if let Some(v) = self.alpha_re {
            cfg.alpha[0] = v;
        }
        if let Some(v) = self.alpha_im {
            cfg.alpha[1] = v;
        }
        if let Some(v) = self.beta_re {
            cfg.beta[0] = v;
        }
        if let Some(v) = self.beta_im {
            cfg.beta[1] = v;
        }
        if let Some(v) = self.weight {
            cfg.weight = v;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = Some(v);
        }
        if let Some(v) = &self.tabulated {
            cfg.tabulated_csv = Some(v.clone());
        }
        if let Some(v) = &self.t_list {
            cfg.t_list = v.clone();
        }
        if let Some(v) = self.r_max {
            cfg.r_list = (0..=v).collect();
        }
        if let Some(v) = self.grid_size {
            cfg.grid_size = v;
        }
        if let Some(v) = self.tail_tol {
            cfg.tail_tol = v;
        }
        if let Some(v) = &self.output_dir {
            cfg.output_dir = v.clone();
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Figure1Args {
    /// Coin angle θ in radians (default π/4).
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Number of steps (default 5000).
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long)]
    pub grid_size: Option<usize>,
    /// Gaussian seed width (default 0.25·|cos θ|).
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub tail_tol: Option<f64>,
    /// Histogram bin width in units of x/t (default 2/t).
    #[arg(long)]
    pub bin_width: Option<f64>,
    #[arg(long = "out")]
    pub output_dir: Option<PathBuf>,
}

impl Figure1Args {
    pub fn to_options(&self) -> Figure1Options {
        let d = Figure1Options::default();
        Figure1Options {
            theta: self.theta.unwrap_or(d.theta),
            t: self.t.unwrap_or(d.t),
            grid_size: self.grid_size.unwrap_or(d.grid_size),
            sigma: self.sigma.or(d.sigma),
            tail_tol: self.tail_tol.unwrap_or(d.tail_tol),
            bin_width: self.bin_width.or(d.bin_width),
            output_dir: self.output_dir.clone().unwrap_or(d.output_dir),
        }
    }
}
