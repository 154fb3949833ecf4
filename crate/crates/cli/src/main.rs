//! `attopmm` command-line front end.
//!
//! Errors are reported on stdout as one JSON record
//! `{"error": kind, "message": text}` with a nonzero exit status.

mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "attopmm", version, about = "Time-resolved photoelectron momentum maps")]
pub struct Cli {
    /// Scenario TOML. Defaults to the built-in pentacene scenario.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Load and check the configuration with overrides applied, then exit.
    #[arg(long, global = true)]
    pub validate: bool,

    #[command(subcommand)]
    pub command: Command,
}

/// Overrides of configuration values. Applied before validation.
#[derive(Args, Debug, Clone, Default)]
pub struct Overrides {
    /// Photoelectron energies, eV.
    #[arg(long, value_delimiter = ',')]
    pub energy: Option<Vec<f64>>,
    /// Pulse arrival times, fs.
    #[arg(long, value_delimiter = ',')]
    pub tp: Option<Vec<f64>>,
    /// Pulse durations (intensity FWHM), fs. Only fig6 takes several.
    #[arg(long, value_delimiter = ',')]
    pub tau: Option<Vec<f64>>,
    /// Momentum raster size per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Energy-averaging window, eV.
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Energy samples across the averaging window.
    #[arg(long)]
    pub energy_samples: Option<usize>,
    /// Degree of the angular quadrature for spectra.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Spectrum energy step, eV.
    #[arg(long)]
    pub step: Option<f64>,
    /// Spectrum energy range `LO,HI`, eV.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub range: Option<Vec<f64>>,
    /// Density voxel spacing, Å.
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Density box padding around the nuclei, Å.
    #[arg(long)]
    pub padding: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print derived quantities: period, mean energy, channel table.
    Validate {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Momentum maps at the configured energies and arrival times.
    Pmm {
        #[command(flatten)]
        overrides: Overrides,
        /// Use the finite-duration model with per-member envelopes.
        #[arg(long)]
        long: bool,
        /// Average over the configured energy window.
        #[arg(long)]
        average: bool,
    },
    /// Angle-integrated spectra of the excited and ground states.
    Spectrum {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        long: bool,
    },
    /// Density change relative to the ground state as cube files.
    Density {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Dyson orbital coefficients for one final state at one `--tp` (default 0).
    Dyson {
        /// Final-state index, 1-based.
        #[arg(long = "final")]
        final_index: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Regenerate the data behind one of the published figures.
    ReproduceFigure {
        #[arg(value_enum)]
        figure: Figure,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            println!("{record}");
            ExitCode::FAILURE
        }
    }
}
