//! Command-line front end: parameter sweeps and plot data as deterministic
//! CSV (or SVG), plus verification suites.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::{Args, Parser, Subcommand};

use commands::{DecompArgs, ProjectorArgs, SpectrumArgs, StatesArgs, TunnelingArgs};
use config::{CommonArgs, Format, Settings};
use error::{usage, CliError, CliResult, EXIT_OK, EXIT_USAGE};
use output::RunConfig;
use verify::{SuiteResult, VerifyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "plaquette-qgauge",
    version,
    about = "SU(2) single-plaquette quantum model: sweeps and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tunneling overlap and probability between the vertex states.
    Tunneling(TunnelingArgs),
    /// Energy levels and gaps in units of ħ²β² over a ν̃ sweep.
    Spectrum(SpectrumArgs),
    /// Samples of ψ± or ξ_n on a uniform grid of [0, π].
    States(StatesArgs),
    /// P_{±,n} = |⟨ξ_n|ψ±⟩|² over ħβ² values and a ν̃ sweep.
    ProjectorExpectations(ProjectorArgs),
    /// Highest-weight monomials of degree k in s principal minors.
    Decomp(DecompArgs),
    /// Poisson-algebra, momentum-map and decomposition checks.
    GeometryVerify(VerifyArgs),
    /// Every verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Seed for sampled points.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Sampled points per randomized suite.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

impl Command {
    fn common(&self) -> &CommonArgs {
        match self {
            Command::Tunneling(a) => &a.common,
            Command::Spectrum(a) => &a.common,
            Command::States(a) => &a.common,
            Command::ProjectorExpectations(a) => &a.common,
            Command::Decomp(a) => &a.common,
            Command::GeometryVerify(a) | Command::Verify(a) => &a.common,
        }
    }
}

/// Output text plus whether every verification passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

/// Runs the verification suites with an explicit overlap routine.
pub fn run_verify(
    args: &VerifyArgs,
    settings: &Settings,
    geometry_only: bool,
    opts: &VerifyOptions,
) -> CliResult<Outcome> {
    if settings.format == Format::Svg {
        return usage("verification reports have no svg output");
    }
    let mut config = RunConfig::new(if geometry_only {
        "geometry-verify"
    } else {
        "verify"
    });
    config.set("seed", args.seed).set("samples", args.samples);
    let mut results: Vec<SuiteResult> = verify::geometry_suites(opts);
    if !geometry_only {
        results.extend(verify::spectral_suites(opts));
    }
    Ok(Outcome {
        text: verify::render_report(&config, &results),
        passed: results.iter().all(|r| r.passed),
    })
}

pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let settings = cli.command.common().resolve()?;
    let rendered = match &cli.command {
        Command::Tunneling(a) => commands::tunneling(a, &settings)?,
        Command::Spectrum(a) => commands::spectrum_sweep(a, &settings)?,
        Command::States(a) => commands::states(a, &settings)?,
        Command::ProjectorExpectations(a) => commands::projector_expectations(a, &settings)?,
        Command::Decomp(a) => commands::decomp(a, &settings)?,
        Command::GeometryVerify(a) | Command::Verify(a) => {
            let opts = VerifyOptions {
                seed: a.seed,
                samples: a.samples,
                ..VerifyOptions::default()
            };
            let geometry_only = matches!(cli.command, Command::GeometryVerify(_));
            return run_verify(a, &settings, geometry_only, &opts);
        }
    };
    Ok(Outcome {
        text: rendered.to_string(settings.format)?,
        passed: true,
    })
}

/// Parses `args`, runs the command and writes its output to `--out` or
/// `stdout`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let result = execute(&cli).and_then(|outcome| {
        let out_path = cli.command.common().resolve()?.raw.out;
        match out_path {
            Some(path) => fs::write(&path, &outcome.text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
            None => stdout.write_all(outcome.text.as_bytes())?,
        }
        if outcome.passed {
            Ok(())
        } else {
            Err(CliError::Verification("one or more suites failed".into()))
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "plaquette-qgauge: {e}");
            e.exit_code()
        }
    }
}
