//! `ifatune`: sweep, synthesize, tune and calibrate a tunable dual-band IFA.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ifa_tune::resosynth::SynthesisMode;

use ifa_tune_cli::commands::{self, Context};
use ifa_tune_cli::config::RunConfig;
use ifa_tune_cli::CliError;

#[derive(Parser, Debug)]
#[command(name = "ifatune", version, about = "Model, synthesize and tune a dual-band inverted-F antenna")]
struct Cli {
    /// Configuration file (TOML, dotted keys). Defaults to the reference antenna.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep input impedance and S11; write CSV, Touchstone and SVG.
    Sweep {
        /// Bias voltage; sets c1 from the varactor law. Without it the
        /// configured resonator.c1_pf is used.
        #[arg(long, allow_negative_numbers = true)]
        bias: Option<f64>,
    },
    /// Find L and C that put the resonances at f1 and f2.
    Synthesize {
        #[arg(long, value_name = "HZ")]
        f1: f64,
        #[arg(long, value_name = "HZ")]
        f2: f64,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
    /// Sweep every configured bias voltage and report band coverage.
    Tune {
        /// Take per-voltage bands from a CSV instead of the model.
        #[arg(long, value_name = "CSV")]
        bands_from: Option<PathBuf>,
        /// Band plan TOML overriding the built-in systems.
        #[arg(long, value_name = "FILE")]
        plan: Option<PathBuf>,
    },
    /// Fit line lengths to a measured resonance pair and write a new config.
    Calibrate {
        #[arg(long, value_name = "HZ")]
        f1: f64,
        #[arg(long, value_name = "HZ")]
        f2: f64,
        /// Also fit the characteristic impedance.
        #[arg(long)]
        release_z0: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    ClosedForm,
    Numeric,
    Auto,
}

impl From<Mode> for SynthesisMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::ClosedForm => SynthesisMode::ClosedForm,
            Mode::Numeric => SynthesisMode::Numeric,
            Mode::Auto => SynthesisMode::Auto,
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let ctx = Context {
        config,
        json: cli.json,
        out: cli.out,
    };
    match cli.command {
        Command::Sweep { bias } => commands::sweep_cmd(&ctx, bias),
        Command::Synthesize { f1, f2, mode } => commands::synthesize_cmd(&ctx, f1, f2, mode.into()),
        Command::Tune { bands_from, plan } => commands::tune_cmd(&ctx, bands_from.as_deref(), plan.as_deref()),
        Command::Calibrate { f1, f2, release_z0 } => commands::calibrate_cmd(&ctx, f1, f2, release_z0),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let CliError::Calibration { report, .. } = &e {
                print!("{report}");
            }
            eprintln!("ifatune: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
