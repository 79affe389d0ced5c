//! Sweep subcommands. Grid points are evaluated in parallel and assembled in
//! grid order.

use std::f64::consts::PI;

use clap::{Args, ValueEnum};
use plaquette_core::characters::ModelParams;
use plaquette_core::costratified::{self, Vertex};
use plaquette_core::geometry::{monomial_decomposition, restriction_kernel};
use plaquette_core::mathieu::{self, MathieuSolution};
use plaquette_core::spectrum;
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{check_values, grid_points, reduced_params, CommonArgs, Format, Settings};
use crate::error::{usage, CliError, CliResult};
use crate::output::{Cell, RunConfig, Table};
use crate::svg::{Plot, Series};

/// Levels summed in the completeness diagnostic.
pub const COMPLETENESS_LEVELS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Log,
    Linear,
}

impl Spacing {
    fn name(self) -> &'static str {
        match self {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        }
    }
}

/// A finished command: rows, the configuration that produced them and an
/// optional plot.
pub struct Rendered {
    pub table: Table,
    pub config: RunConfig,
    pub plot: Option<Plot>,
}

impl Rendered {
    pub fn to_string(&self, format: Format) -> CliResult<String> {
        match (format, &self.plot) {
            (Format::Csv, _) => Ok(self.table.to_csv(&self.config)),
            (Format::Svg, Some(plot)) => Ok(plot.render(&self.config.header_line()[2..])),
            (Format::Svg, None) => usage("this subcommand has no svg output"),
        }
    }
}

fn base_config(name: &str, settings: &Settings) -> RunConfig {
    let mut c = RunConfig::new(name);
    c.set(
        "format",
        if settings.format == Format::Svg {
            "svg"
        } else {
            "csv"
        },
    );
    c
}

fn collect_ordered<T: Send>(items: Vec<CliResult<T>>) -> CliResult<Vec<T>> {
    items.into_iter().collect()
}

/// `(⟨ξ_n|ψ+⟩, ⟨ξ_n|ψ−⟩)` from a single Mathieu solve.
pub fn level_overlaps(
    n: usize,
    params: &ModelParams,
    min_trunc: usize,
) -> plaquette_core::Result<(f64, f64)> {
    let solution = level_solution(n, params, min_trunc)?;
    Ok((
        spectrum::overlap_from_solution(&solution, params, Vertex::Plus)?,
        spectrum::overlap_from_solution(&solution, params, Vertex::Minus)?,
    ))
}

fn level_solution(
    n: usize,
    params: &ModelParams,
    min_trunc: usize,
) -> plaquette_core::Result<MathieuSolution> {
    mathieu::solve_from(
        n,
        params.mathieu_q(),
        min_trunc.max(spectrum::working_trunc(n, params)),
    )
}

#[derive(Debug, Clone, Args)]
pub struct TunnelingArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Smallest ħβ² of the sweep.
    #[arg(long)]
    pub t_min: Option<f64>,
    /// Largest ħβ² of the sweep.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
}

pub fn tunneling(args: &TunnelingArgs, settings: &Settings) -> CliResult<Rendered> {
    let mut config = base_config("tunneling", settings);
    let ts = match settings.hbar_beta2 {
        Some(t) => {
            if args.t_min.is_some() || args.t_max.is_some() || args.spacing.is_some() {
                return usage("a fixed hbar_beta2 excludes --t-min/--t-max/--spacing");
            }
            config.set("hbar_beta2", t);
            vec![t]
        }
        None => {
            let (lo, hi) = (args.t_min.unwrap_or(0.01), args.t_max.unwrap_or(5.0));
            let spacing = args.spacing.unwrap_or(Spacing::Log);
            let n = settings.grid(200);
            config
                .set("t_min", lo)
                .set("t_max", hi)
                .set("grid", n)
                .set("spacing", spacing.name());
            grid_points(lo, hi, n, spacing == Spacing::Log)?
        }
    };
    if ts.iter().any(|&t| t <= 0.0) {
        return usage("hbar_beta2 values must be positive");
    }
    let rows = collect_ordered(
        ts.par_iter()
            .map(|&t| {
                let overlap = costratified::tunneling_overlap(t)?;
                Ok((t, overlap, overlap * overlap))
            })
            .collect(),
    )?;
    let mut table = Table::new(["hbar_beta2", "overlap", "probability"]);
    for &(t, o, p) in &rows {
        table.push(vec![t.into(), o.into(), p.into()]);
    }
    let plot = Plot {
        title: "tunneling probability".into(),
        x_label: "hbar_beta2".into(),
        y_label: "|<psi+,psi->|^2".into(),
        log_x: ts.len() > 1 && ts[0] > 0.0,
        series: vec![Series {
            label: "P".into(),
            points: rows.iter().map(|r| (r.0, r.2)).collect(),
        }],
    };
    Ok(Rendered {
        table,
        config,
        plot: Some(plot),
    })
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Smallest ν̃ of the sweep.
    #[arg(long)]
    pub nu_min: Option<f64>,
    /// Largest ν̃ of the sweep.
    #[arg(long)]
    pub nu_max: Option<f64>,
}

fn nu_grid(
    config: &mut RunConfig,
    settings: &Settings,
    t: f64,
    lo: Option<f64>,
    hi: Option<f64>,
    defaults: (f64, f64, usize),
    log: bool,
) -> CliResult<Vec<f64>> {
    if let Some(nu) = settings.nu_tilde_at(t) {
        if lo.is_some() || hi.is_some() {
            return usage("a fixed coupling excludes --nu-min/--nu-max");
        }
        if let Some(g) = settings.raw.coupling_g {
            config.set(
                "coupling_g",
                if g.is_infinite() {
                    Value::from("inf")
                } else {
                    Value::from(g)
                },
            );
        }
        config.set("nu_tilde", nu);
        return Ok(vec![nu]);
    }
    let (lo, hi) = (lo.unwrap_or(defaults.0), hi.unwrap_or(defaults.1));
    let n = settings.grid(defaults.2);
    config
        .set("nu_min", lo)
        .set("nu_max", hi)
        .set("grid", n)
        .set("spacing", if log { "log" } else { "linear" });
    let values = grid_points(lo, hi, n, log)?;
    if values[0] < 0.0 {
        return usage("nu_tilde must be non-negative");
    }
    Ok(values)
}

pub fn spectrum_sweep(args: &SpectrumArgs, settings: &Settings) -> CliResult<Rendered> {
    let mut config = base_config("spectrum", settings);
    let t = settings.hbar_beta2.unwrap_or(1.0);
    config.set("hbar_beta2", t);
    let nus = nu_grid(
        &mut config,
        settings,
        t,
        args.nu_min,
        args.nu_max,
        (0.0, 20.0, 41),
        false,
    )?;
    let levels = settings.n_max(8);
    let trunc = settings.trunc();
    config.set("n_max", levels).set("trunc", trunc);
    let rows = collect_ordered(
        nus.par_iter()
            .map(|&nu| {
                let params = reduced_params(t, nu)?;
                let energies = (0..=levels)
                    .map(|n| {
                        let b = mathieu::solve_from(n, params.mathieu_q(), trunc)?.b;
                        Ok(spectrum::energy_from_characteristic(b, &params) / params.hbar2_beta2())
                    })
                    .collect::<plaquette_core::Result<Vec<f64>>>()?;
                Ok((nu, energies))
            })
            .collect(),
    )?;
    let mut table = Table::new(["nu_tilde", "n", "energy", "gap"]);
    for (nu, e) in &rows {
        for n in 0..levels {
            table.push(vec![
                (*nu).into(),
                n.into(),
                e[n].into(),
                (e[n + 1] - e[n]).into(),
            ]);
        }
    }
    let series = (0..levels)
        .map(|n| Series {
            label: format!("E_{n}"),
            points: rows.iter().map(|(nu, e)| (*nu, e[n])).collect(),
        })
        .collect();
    let plot = Plot {
        title: "energy levels / (hbar^2 beta^2)".into(),
        x_label: "nu_tilde".into(),
        y_label: "E_n".into(),
        log_x: false,
        series,
    };
    Ok(Rendered {
        table,
        config,
        plot: Some(plot),
    })
}

/// Which state `states` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateSelector {
    Psi(Vertex),
    Xi(usize),
}

impl StateSelector {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "psi+" | "psi_plus" => Ok(Self::Psi(Vertex::Plus)),
            "psi-" | "psi_minus" => Ok(Self::Psi(Vertex::Minus)),
            _ => s
                .strip_prefix("xi")
                .map(|rest| rest.trim_start_matches('_'))
                .and_then(|rest| rest.parse::<usize>().ok())
                .map(Self::Xi)
                .ok_or_else(|| {
                    CliError::Usage(format!("unknown state `{s}`; expected psi+, psi- or xi<n>"))
                }),
        }
    }

    fn name(self) -> String {
        match self {
            Self::Psi(Vertex::Plus) => "psi+".into(),
            Self::Psi(Vertex::Minus) => "psi-".into(),
            Self::Xi(n) => format!("xi{n}"),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct StatesArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `psi+`, `psi-` or `xi<n>`.
    #[arg(long, default_value = "psi+")]
    pub state: String,
}

/// `√2 sin(m π i / d)` with the argument reduced exactly modulo `2π`.
fn grid_sine(m: usize, i: usize, d: usize) -> f64 {
    let r = (m * i) % (2 * d);
    if r == 0 || r == d {
        0.0
    } else {
        std::f64::consts::SQRT_2 * (PI * r as f64 / d as f64).sin()
    }
}

pub fn states(args: &StatesArgs, settings: &Settings) -> CliResult<Rendered> {
    let selector = StateSelector::parse(&args.state)?;
    let mut config = base_config("states", settings);
    let t = settings.hbar_beta2.unwrap_or(0.125);
    let nu = settings.nu_tilde_at(t).unwrap_or(0.0);
    let params = reduced_params(t, nu)?;
    let grid = settings.grid(201);
    if grid < 2 {
        return usage("states needs at least two grid points");
    }
    let trunc = settings.trunc();
    config
        .set("state", selector.name())
        .set("hbar_beta2", t)
        .set("nu_tilde", nu)
        .set("grid", grid)
        .set("trunc", trunc);
    let coeffs: Vec<f64> = match selector {
        StateSelector::Psi(vertex) => {
            let psi =
                costratified::psi(vertex, &params, trunc.max(costratified::default_trunc(t)))?;
            psi.coeffs().iter().map(|c| c.re).collect()
        }
        StateSelector::Xi(n) => spectrum::eigenstate(n, &params, trunc)?
            .xi
            .coeffs()
            .iter()
            .map(|c| c.re)
            .collect(),
    };
    let d = grid - 1;
    let samples: Vec<(f64, f64)> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let x = if i == d { PI } else { PI * i as f64 / d as f64 };
            let v = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * grid_sine(k + 1, i, d))
                .sum();
            (x, v)
        })
        .collect();
    let mut table = Table::new(["x", "value"]);
    for &(x, v) in &samples {
        table.push(vec![x.into(), v.into()]);
    }
    let plot = Plot {
        title: format!("{} in L2[0,pi]", selector.name()),
        x_label: "x".into(),
        y_label: "value".into(),
        log_x: false,
        series: vec![Series {
            label: selector.name(),
            points: samples,
        }],
    };
    Ok(Rendered {
        table,
        config,
        plot: Some(plot),
    })
}

#[derive(Debug, Clone, Args)]
pub struct ProjectorArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated ħβ² values.
    #[arg(long, value_delimiter = ',')]
    pub t_values: Option<Vec<f64>>,
    /// Smallest ν̃ of the (log-spaced) sweep.
    #[arg(long)]
    pub nu_min: Option<f64>,
    /// Largest ν̃ of the sweep.
    #[arg(long)]
    pub nu_max: Option<f64>,
}

pub fn projector_expectations(args: &ProjectorArgs, settings: &Settings) -> CliResult<Rendered> {
    let mut config = base_config("projector-expectations", settings);
    let ts = match (settings.hbar_beta2, &args.t_values) {
        (Some(_), Some(_)) => return usage("hbar_beta2 and --t-values are mutually exclusive"),
        (Some(t), None) => vec![t],
        (None, Some(v)) => v.clone(),
        (None, None) => vec![1.0 / 32.0, 0.125, 0.5],
    };
    check_values("hbar_beta2", &ts, true)?;
    config.set("t_values", ts.clone());
    let mut nus_per_t = Vec::new();
    for (i, &t) in ts.iter().enumerate() {
        let mut scratch = RunConfig::default();
        let target = if i == 0 { &mut config } else { &mut scratch };
        nus_per_t.push(nu_grid(
            target,
            settings,
            t,
            args.nu_min,
            args.nu_max,
            (0.1, 100.0, 30),
            true,
        )?);
    }
    let levels = settings.n_max(6);
    let sum_levels = levels.max(COMPLETENESS_LEVELS);
    let trunc = settings.trunc();
    config
        .set("n_max", levels)
        .set("sum_levels", sum_levels)
        .set("trunc", trunc);
    let points: Vec<(f64, f64)> = ts
        .iter()
        .zip(&nus_per_t)
        .flat_map(|(&t, nus)| nus.iter().map(move |&nu| (t, nu)))
        .collect();
    let results = collect_ordered(
        points
            .par_iter()
            .map(|&(t, nu)| {
                let params = reduced_params(t, nu)?;
                let overlaps = (0..sum_levels)
                    .map(|n| level_overlaps(n, &params, trunc))
                    .collect::<plaquette_core::Result<Vec<_>>>()?;
                Ok(overlaps)
            })
            .collect(),
    )?;
    let mut table = Table::new([
        "hbar_beta2",
        "nu_tilde",
        "n",
        "P_plus",
        "P_minus",
        "sum_P_plus",
    ]);
    let mut series: Vec<Series> = Vec::new();
    for (&(t, nu), overlaps) in points.iter().zip(&results) {
        let sum: f64 = overlaps.iter().map(|(p, _)| p * p).sum();
        for (n, &(gp, gm)) in overlaps.iter().take(levels).enumerate() {
            table.push(vec![
                Cell::Float(t),
                Cell::Float(nu),
                n.into(),
                (gp * gp).into(),
                (gm * gm).into(),
                sum.into(),
            ]);
            let label = format!("P+ n={n} t={t}");
            match series.iter_mut().find(|s| s.label == label) {
                Some(s) => s.points.push((nu, gp * gp)),
                None => series.push(Series {
                    label,
                    points: vec![(nu, gp * gp)],
                }),
            }
        }
    }
    let plot = Plot {
        title: "projector expectations P_{+,n}".into(),
        x_label: "nu_tilde".into(),
        y_label: "P_plus".into(),
        log_x: points.iter().all(|p| p.1 > 0.0) && points.len() > ts.len(),
        series,
    };
    Ok(Rendered {
        table,
        config,
        plot: Some(plot),
    })
}

#[derive(Debug, Clone, Args)]
pub struct DecompArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of principal minors `δ_1 … δ_s`.
    #[arg(long)]
    pub s: usize,
    /// Polynomial degree.
    #[arg(long)]
    pub k: u32,
}

pub fn decomp(args: &DecompArgs, settings: &Settings) -> CliResult<Rendered> {
    if args.s == 0 {
        return usage("s must be at least 1");
    }
    let mut config = base_config("decomp", settings);
    config.set("s", args.s).set("k", args.k);
    let list = monomial_decomposition(args.s, args.k);
    let mut columns: Vec<String> = (1..=args.s).map(|m| format!("alpha_{m}")).collect();
    let kernel = if args.s >= 2 {
        columns.push("kernel".into());
        Some(restriction_kernel(args.s, args.k)?.kernel)
    } else {
        None
    };
    let mut table = Table::new(columns);
    for a in &list {
        let mut row: Vec<Cell> = a.iter().map(|&x| Cell::from(x)).collect();
        if let Some(kernel) = &kernel {
            row.push(Cell::from(usize::from(kernel.contains(a))));
        }
        table.push(row);
    }
    Ok(Rendered {
        table,
        config,
        plot: None,
    })
}
