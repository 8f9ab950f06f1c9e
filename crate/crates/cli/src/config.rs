//! Run configuration: a JSON layer and a flag layer merged into one
//! validated [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    WaveletCheck,
    Ipm,
    FitExponent,
    Example5,
    Estimate,
    Rate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    PerturbedCircle,
    CircleRadius,
}

/// One layer of settings. Every field is optional so that a JSON file and
/// the command line can each supply any subset.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    #[arg(skip)]
    pub command: Option<Command>,
    /// Measure-pair family of `fit-exponent`.
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Frequencies, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u32>>,
    /// Radius offsets, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Finest analysis level.
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub max_level: Option<u32>,
    /// Quadrature nodes per curve measure.
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Trapezoid nodes of the cost integral.
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    /// Daubechies order (default: ceil(eta) + 3).
    #[arg(long)]
    pub order: Option<usize>,
    /// Cascade depth D of the wavelet tables.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Ambient dimension of the Gram check.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of index pairs in the Gram check.
    #[arg(long)]
    pub gram_pairs: Option<usize>,
    /// Exponent c of the (1+j)^-c level weight applied from smoothness 1 up.
    #[arg(long)]
    pub log_weight: Option<f64>,
    /// Allowed deviation of the fitted slope from the prediction.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Smallest acceptable r².
    #[arg(long)]
    pub min_r2: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Sample sizes of `rate`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sample_sizes: Option<Vec<usize>>,
    /// Sample size of `estimate` when no sample file is given.
    #[arg(long)]
    pub sample_size: Option<usize>,
    /// Spacing of the candidate radius grid.
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Candidates on each side of the unit circle.
    #[arg(long)]
    pub grid_half_width: Option<usize>,
    /// Radius offset of the sampled curve.
    #[arg(long)]
    pub truth_offset: Option<f64>,
    #[arg(long)]
    pub gamma_loss: Option<f64>,
    #[arg(long)]
    pub gamma_eval: Option<f64>,
    /// Measure CSV files of `ipm`.
    #[arg(long)]
    pub left: Option<PathBuf>,
    #[arg(long)]
    pub right: Option<PathBuf>,
    /// Measure CSV file of `estimate`.
    #[arg(long)]
    pub sample: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )*
    };
}

impl ConfigLayer {
    /// `self` with every field set in `top` replaced.
    pub fn merged(mut self, top: &ConfigLayer) -> ConfigLayer {
        overlay!(self, top; command, family, beta, gamma, eta, n, eps, max_level, nodes, quad_nodes,
            order, depth, dim, gram_pairs, log_weight, tolerance, min_r2, seed, reps, sample_sizes,
            sample_size, grid_step, grid_half_width, truth_offset, gamma_loss, gamma_eval, left, right,
            sample, out);
        self
    }
}

/// Command-line interface.
#[derive(Debug, Parser)]
#[command(name = "besov-ipm", version, about = "Besov surrogates of Hölder IPMs between curve measures")]
pub struct Cli {
    /// Experiment to run; may instead come from the JSON config.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub flags: ConfigLayer,
}

impl Cli {
    /// Reads the JSON file, if any, and resolves it together with the flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let json = match &self.config {
            Some(path) => Some(
                std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?,
            ),
            None => None,
        };
        let mut flags = self.flags.clone();
        if self.command.is_some() {
            flags.command = self.command;
        }
        parse_config(json.as_deref(), &flags)
    }
}

/// Fully resolved and validated settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub family: FamilyName,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
    pub n: Vec<u32>,
    pub eps: Vec<f64>,
    #[serde(rename = "J")]
    pub max_level: u32,
    pub nodes: usize,
    pub quad_nodes: usize,
    pub order: Option<usize>,
    pub depth: u32,
    pub dim: usize,
    pub gram_pairs: usize,
    pub log_weight: f64,
    pub tolerance: f64,
    pub min_r2: f64,
    pub seed: u64,
    pub reps: usize,
    pub sample_sizes: Vec<usize>,
    pub sample_size: usize,
    pub grid_step: f64,
    pub grid_half_width: usize,
    pub truth_offset: f64,
    pub gamma_loss: f64,
    pub gamma_eval: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<PathBuf>,
    #[serde(skip)]
    pub out: PathBuf,
}

/// Largest frequency accepted by the experiments.
pub const MAX_FREQUENCY: u32 = 64;
/// Largest analysis level accepted by the experiments.
pub const MAX_LEVEL: u32 = 12;

/// Parses an optional JSON layer, overlays `flags`, fills defaults and
/// validates everything the selected command will use.
pub fn parse_config(json: Option<&str>, flags: &ConfigLayer) -> Result<RunConfig, CliError> {
    let base: ConfigLayer = match json {
        Some(text) => serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON config: {e}")))?,
        None => ConfigLayer::default(),
    };
    let layer = base.merged(flags);
    let command = layer
        .command
        .ok_or_else(|| CliError::Config("no command given (pass it on the command line or as \"command\")".into()))?;
    let family = layer.family.unwrap_or(FamilyName::PerturbedCircle);
    let radius = family == FamilyName::CircleRadius;
    let (default_level, default_nodes) = match command {
        Command::Estimate | Command::Rate => (6, 512),
        Command::Example5 => (10, 1024),
        _ if radius => (10, 4096),
        _ => (10, 512),
    };
    let default_n = match command {
        Command::Example5 => vec![2, 4, 8, 16, 32],
        _ => vec![4, 8, 16, 32],
    };
    let config = RunConfig {
        command,
        family,
        beta: layer.beta.unwrap_or(0.0),
        gamma: layer.gamma.unwrap_or(if radius { 0.5 } else { 1.0 }),
        eta: layer.eta.unwrap_or(if radius { 1.0 } else { 2.0 }),
        n: layer.n.unwrap_or(default_n),
        eps: layer.eps.unwrap_or_else(|| vec![0.025, 0.05, 0.1, 0.2]),
        max_level: layer.max_level.unwrap_or(default_level),
        nodes: layer.nodes.unwrap_or(default_nodes),
        quad_nodes: layer.quad_nodes.unwrap_or(1 << 14),
        order: layer.order,
        depth: layer.depth.unwrap_or(12),
        dim: layer.dim.unwrap_or(1),
        gram_pairs: layer.gram_pairs.unwrap_or(50),
        log_weight: layer.log_weight.unwrap_or(besov_ipm::interpolation::DEFAULT_LOG_WEIGHT),
        tolerance: layer.tolerance.unwrap_or(if radius { 0.05 } else { 0.15 }),
        min_r2: layer.min_r2.unwrap_or(0.98),
        seed: layer.seed.unwrap_or(0),
        reps: layer.reps.unwrap_or(10),
        sample_sizes: layer.sample_sizes.unwrap_or_else(|| vec![100, 400, 1600]),
        sample_size: layer.sample_size.unwrap_or(400),
        grid_step: layer.grid_step.unwrap_or(5e-4),
        grid_half_width: layer.grid_half_width.unwrap_or(10),
        truth_offset: layer.truth_offset.unwrap_or(2e-3),
        gamma_loss: layer.gamma_loss.unwrap_or(besov_ipm::estimator::DEFAULT_GAMMA_LOSS),
        gamma_eval: layer.gamma_eval.unwrap_or(1.0),
        left: layer.left,
        right: layer.right,
        sample: layer.sample,
        out: layer.out.unwrap_or_else(|| PathBuf::from("out")),
    };
    config.validate()?;
    Ok(config)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn ascending<T: PartialOrd>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        check(self.max_level <= MAX_LEVEL, || format!("J={} exceeds {MAX_LEVEL}", self.max_level))?;
        check((4..=24).contains(&self.depth), || format!("depth={} must lie in 4..=24", self.depth))?;
        check(self.log_weight >= 0.0, || format!("log_weight={} must be >= 0", self.log_weight))?;
        if let Some(order) = self.order {
            check((1..=besov_ipm::wavelets::MAX_ORDER).contains(&order), || {
                format!("order={order} must lie in 1..={}", besov_ipm::wavelets::MAX_ORDER)
            })?;
        }
        match self.command {
            Command::WaveletCheck => {
                check((1..=besov_ipm::wavelets::MAX_DIM).contains(&self.dim), || {
                    format!("dim={} must lie in 1..={}", self.dim, besov_ipm::wavelets::MAX_DIM)
                })?;
                check(self.gram_pairs > 0, || "gram_pairs must be positive".into())?;
            }
            Command::Ipm => {
                check(self.gamma > 0.0, || format!("gamma={} must be > 0", self.gamma))?;
                check(self.left.is_some() && self.right.is_some(), || "ipm needs --left and --right measure files".into())?;
            }
            Command::FitExponent => {
                self.validate_pair()?;
                self.validate_fit()?;
                match self.family {
                    FamilyName::PerturbedCircle => self.validate_frequencies(3)?,
                    FamilyName::CircleRadius => {
                        check(self.eps.len() >= 3, || format!("need at least 3 eps values (got {})", self.eps.len()))?;
                        check(ascending(&self.eps), || "eps must be strictly increasing".into())?;
                        check(self.eps.iter().all(|&e| e > -1.0 && e.is_finite()), || "eps values must exceed -1".into())?;
                    }
                }
            }
            Command::Example5 => {
                check(self.beta >= 0.0, || format!("beta={} must be >= 0", self.beta))?;
                check(self.eta >= 1.0 && self.eta.fract() == 0.0, || format!("eta={} must be an integer >= 1", self.eta))?;
                self.validate_frequencies(3)?;
                let top = *self.n.last().unwrap_or(&1) as usize;
                check(self.quad_nodes >= 32 * top, || {
                    format!("quad_nodes={} must be >= 32 * max n = {}", self.quad_nodes, 32 * top)
                })?;
            }
            Command::Estimate | Command::Rate => {
                check(self.grid_step > 0.0 && self.grid_step.is_finite(), || format!("grid_step={} must be > 0", self.grid_step))?;
                check(self.grid_step * self.grid_half_width as f64 <= 0.5, || "radius grid must stay within offsets of +-0.5".into())?;
                check(self.truth_offset > -1.0, || format!("truth_offset={} must exceed -1", self.truth_offset))?;
                check(self.gamma_loss > 0.0, || format!("gamma_loss={} must be > 0", self.gamma_loss))?;
                check(self.gamma_eval > 0.0, || format!("gamma_eval={} must be > 0", self.gamma_eval))?;
                if self.command == Command::Rate {
                    check(!self.sample_sizes.is_empty(), || "sample_sizes must not be empty".into())?;
                    check(self.sample_sizes[0] > 0 && ascending(&self.sample_sizes), || {
                        "sample_sizes must be positive and strictly increasing".into()
                    })?;
                    check(self.reps >= 3, || format!("reps={} must be >= 3", self.reps))?;
                } else {
                    check(self.sample_size > 0 || self.sample.is_some(), || "sample_size must be positive".into())?;
                }
            }
        }
        Ok(())
    }

    fn validate_pair(&self) -> Result<(), CliError> {
        check(self.gamma > 0.0, || format!("gamma={} must be > 0", self.gamma))?;
        check(self.gamma <= self.eta, || format!("gamma={} must not exceed eta={}", self.gamma, self.eta))?;
        check(self.eta.is_finite(), || "eta must be finite".into())?;
        check(self.beta >= 0.0, || format!("beta={} must be >= 0", self.beta))
    }

    fn validate_fit(&self) -> Result<(), CliError> {
        check(self.tolerance >= 0.0, || format!("tolerance={} must be >= 0", self.tolerance))?;
        check((0.0..=1.0).contains(&self.min_r2), || format!("min_r2={} must lie in [0, 1]", self.min_r2))
    }

    fn validate_frequencies(&self, min_len: usize) -> Result<(), CliError> {
        check(self.n.len() >= min_len, || format!("need at least {min_len} values of n (got {})", self.n.len()))?;
        check(self.n[0] >= 1 && ascending(&self.n), || "n must be positive and strictly increasing".into())?;
        let top = *self.n.last().unwrap_or(&1);
        check(top <= MAX_FREQUENCY, || format!("n={top} exceeds {MAX_FREQUENCY}"))?;
        let need = besov_ipm::measures::NODES_PER_PERIOD * top as usize;
        check(self.nodes >= need, || format!("nodes={} must be >= {need} for n={top}", self.nodes))
    }
}
