//! Flat `key = value` configuration files merged with command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use plaquette_core::characters::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Svg,
}

/// Keys accepted in a configuration file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub hbar: Option<f64>,
    pub beta2: Option<f64>,
    pub coupling_g: Option<f64>,
    pub nu_tilde: Option<f64>,
    pub hbar_beta2: Option<f64>,
    pub n_max: Option<usize>,
    pub trunc: Option<usize>,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Keys set in `other` replace those in `self`.
    pub fn overridden_by(self, other: FileConfig) -> FileConfig {
        FileConfig {
            hbar: other.hbar.or(self.hbar),
            beta2: other.beta2.or(self.beta2),
            coupling_g: other.coupling_g.or(self.coupling_g),
            nu_tilde: other.nu_tilde.or(self.nu_tilde),
            hbar_beta2: other.hbar_beta2.or(self.hbar_beta2),
            n_max: other.n_max.or(self.n_max),
            trunc: other.trunc.or(self.trunc),
            grid: other.grid.or(self.grid),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
        }
    }
}

/// Flags shared by every subcommand; each mirrors a configuration key.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Configuration file (flat `key = value`).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Planck constant ħ.
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Lattice coupling β².
    #[arg(long)]
    pub beta2: Option<f64>,
    /// Gauge coupling g (`inf` for the free theory).
    #[arg(long, allow_hyphen_values = true)]
    pub coupling_g: Option<f64>,
    /// Reduced coupling ν̃ = 1/(g²ħ²β²).
    #[arg(long)]
    pub nu_tilde: Option<f64>,
    /// ħβ².
    #[arg(long)]
    pub hbar_beta2: Option<f64>,
    /// Number of energy levels.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Minimum basis truncation.
    #[arg(long)]
    pub trunc: Option<usize>,
    /// Number of grid points.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl CommonArgs {
    fn as_file_config(&self) -> FileConfig {
        FileConfig {
            hbar: self.hbar,
            beta2: self.beta2,
            coupling_g: self.coupling_g,
            nu_tilde: self.nu_tilde,
            hbar_beta2: self.hbar_beta2,
            n_max: self.n_max,
            trunc: self.trunc,
            grid: self.grid,
            out: self.out.clone(),
            format: self.format,
        }
    }

    /// Configuration file (if any) overridden by flags, then validated.
    pub fn resolve(&self) -> CliResult<Settings> {
        let base = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Settings::new(base.overridden_by(self.as_file_config()))
    }
}

/// Validated settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub raw: FileConfig,
    pub hbar: f64,
    /// `ħβ²` when fixed by the configuration.
    pub hbar_beta2: Option<f64>,
    pub format: Format,
}

impl Settings {
    pub fn new(raw: FileConfig) -> CliResult<Self> {
        if raw.coupling_g.is_some() && raw.nu_tilde.is_some() {
            return usage("coupling_g and nu_tilde are mutually exclusive");
        }
        if raw.hbar_beta2.is_some() && raw.beta2.is_some() {
            return usage("hbar_beta2 and beta2 are mutually exclusive");
        }
        for (name, v) in [
            ("hbar", raw.hbar),
            ("beta2", raw.beta2),
            ("hbar_beta2", raw.hbar_beta2),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return usage(format!("{name} must be positive and finite, got {v}"));
                }
            }
        }
        if let Some(g) = raw.coupling_g {
            if g.is_nan() || g <= 0.0 {
                return usage(format!("coupling_g must be positive, got {g}"));
            }
        }
        if let Some(nu) = raw.nu_tilde {
            if !(nu.is_finite() && nu >= 0.0) {
                return usage(format!(
                    "nu_tilde must be non-negative and finite, got {nu}"
                ));
            }
        }
        if raw.n_max == Some(0) {
            return usage("n_max must be at least 1");
        }
        if raw.grid == Some(0) {
            return usage("grid must be at least 1");
        }
        let hbar = raw.hbar.unwrap_or(1.0);
        let hbar_beta2 = raw.hbar_beta2.or(raw.beta2.map(|b| hbar * b));
        let format = raw.format.unwrap_or(Format::Csv);
        Ok(Self {
            raw,
            hbar,
            hbar_beta2,
            format,
        })
    }

    /// `ν̃` at a given `ħβ²`, from `nu_tilde` or `coupling_g` if either is set.
    pub fn nu_tilde_at(&self, hbar_beta2: f64) -> Option<f64> {
        self.raw.nu_tilde.or_else(|| {
            self.raw.coupling_g.map(|g| {
                if g.is_infinite() {
                    0.0
                } else {
                    1.0 / (g * g * self.hbar * hbar_beta2)
                }
            })
        })
    }

    pub fn coupling_fixed(&self) -> bool {
        self.raw.nu_tilde.is_some() || self.raw.coupling_g.is_some()
    }

    pub fn n_max(&self, default: usize) -> usize {
        self.raw.n_max.unwrap_or(default)
    }

    pub fn grid(&self, default: usize) -> usize {
        self.raw.grid.unwrap_or(default)
    }

    pub fn trunc(&self) -> usize {
        self.raw.trunc.unwrap_or(0)
    }
}

/// Model parameters with `ħ = 1` at the reduced couplings.
pub fn reduced_params(hbar_beta2: f64, nu_tilde: f64) -> CliResult<ModelParams> {
    Ok(ModelParams::from_reduced(hbar_beta2, nu_tilde)?)
}

/// `n` points from `lo` to `hi`, evenly spaced in `ln` when `log`.
pub fn grid_points(lo: f64, hi: f64, n: usize, log: bool) -> CliResult<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) {
        return usage(format!("range bounds must be finite, got [{lo}, {hi}]"));
    }
    if log && lo <= 0.0 {
        return usage(format!(
            "log-spaced range needs a positive lower bound, got {lo}"
        ));
    }
    if n == 0 {
        return usage("grid must be at least 1");
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if lo >= hi {
        return usage(format!("range must be increasing, got [{lo}, {hi}]"));
    }
    let (a, b) = if log { (lo.ln(), hi.ln()) } else { (lo, hi) };
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else if i == 0 {
                lo
            } else {
                let v = a + step * i as f64;
                if log {
                    v.exp()
                } else {
                    v
                }
            }
        })
        .collect())
}

/// Validates an explicit value list.
pub fn check_values(name: &str, values: &[f64], positive: bool) -> CliResult<()> {
    if values.is_empty() {
        return usage(format!("{name} list is empty"));
    }
    if values
        .iter()
        .any(|v| !v.is_finite() || (positive && *v <= 0.0) || *v < 0.0)
    {
        return usage(format!(
            "{name} values must be finite and {}",
            if positive { "positive" } else { "non-negative" }
        ));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return usage(format!("{name} values must be strictly increasing"));
    }
    Ok(())
}
