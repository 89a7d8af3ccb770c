//! `ancmet`: runs the reproducible sweeps and the randomized validation.
//!
//! Exit codes: 0 success, 1 config or I/O error, 2 numerical failure or a
//! failed validation.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use ancilla_metrology::experiments::validation::run_validation;
use ancilla_metrology::experiments::{run_and_write, ExperimentError, Scenario, SweepConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ancmet", version, about = "Qubit-assisted time-reversal metrology sweeps")]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. They override values from `--config`.
#[derive(Args, Debug)]
struct Common {
    /// Config file with `key = value` lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Ensemble sizes, e.g. `4`, `2..20`, `10..100..10`, `4,11`
    #[arg(long, global = true)]
    n: Option<String>,

    /// Probe frequency (units of g unless --g is changed)
    #[arg(long, global = true, allow_hyphen_values = true)]
    wp: Option<String>,

    /// Ancilla frequency
    #[arg(long, global = true, allow_hyphen_values = true)]
    wa: Option<String>,

    /// Coupling strength
    #[arg(long, global = true)]
    g: Option<String>,

    #[arg(long, global = true, value_enum)]
    interaction: Option<InteractionArg>,

    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    /// Extra `key=value` settings, applied last
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalized trace |Tr U(T)|/dim over total evolution time
    TraceScan,
    /// Quantum Fisher information sweeps
    QfiSweep {
        #[arg(long, value_enum)]
        sweep: Sweep,
    },
    /// Ancilla-only classical Fisher information over (t1, t2)
    CfiMap,
    /// QFI scaling for the XZ interaction
    XzScaling,
    /// QFI under parameter deviations
    Deviation,
    /// QFI under ancilla dephasing
    Dephasing,
    /// Randomized cross-check of the QFI implementations
    Validate {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 20241016)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Sweep {
    Theta0,
    T1,
    Heatmap,
    Scaling,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum InteractionArg {
    Zz,
    Xz,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Period,
    Conjugate,
}

impl Command {
    fn scenario(&self) -> Option<Scenario> {
        Some(match self {
            Command::TraceScan => Scenario::TraceScan,
            Command::QfiSweep { sweep } => match sweep {
                Sweep::Theta0 => Scenario::QfiTheta0,
                Sweep::T1 => Scenario::QfiT1,
                Sweep::Heatmap => Scenario::QfiHeatmap,
                Sweep::Scaling => Scenario::QfiScaling,
            },
            Command::CfiMap => Scenario::CfiMap,
            Command::XzScaling => Scenario::XzScaling,
            Command::Deviation => Scenario::DeviationScan,
            Command::Dephasing => Scenario::DephasingScan,
            Command::Validate { .. } => return None,
        })
    }
}

fn build_config(scenario: Scenario, common: &Common) -> Result<SweepConfig, ExperimentError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io {
                path: path.clone(),
                source,
            })?;
            SweepConfig::parse_for(scenario, &text)?
        }
        None => SweepConfig::new(scenario),
    };
    let mut overrides: Vec<(&str, String)> = Vec::new();
    if let Some(v) = &common.n {
        overrides.push(("n", v.clone()));
    }
    if let Some(v) = &common.wp {
        overrides.push(("omega_p", v.clone()));
    }
    if let Some(v) = &common.wa {
        overrides.push(("omega_a", v.clone()));
    }
    if let Some(v) = &common.g {
        overrides.push(("g", v.clone()));
    }
    if let Some(i) = common.interaction {
        overrides.push(("interaction", format!("{i:?}").to_lowercase()));
    }
    if let Some(m) = common.mode {
        overrides.push(("mode", format!("{m:?}").to_lowercase()));
    }
    for (key, value) in overrides {
        cfg.set(key, &value)?;
    }
    for item in &common.set {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| ExperimentError::Config(format!("--set expects KEY=VALUE, got `{item}`")))?;
        cfg.set(key.trim(), value.trim())?;
    }
    if let Some(out) = &common.out {
        cfg.output_path = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, ExperimentError> {
    match (&cli.command, cli.command.scenario()) {
        (Command::Validate { samples, seed, max_n }, _) => {
            if *samples == 0 || *max_n == 0 {
                return Err(ExperimentError::Config("--samples and --max-n must be positive".into()));
            }
            let out = cli.common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let report = run_validation(*samples, *seed, *max_n)?;
            let files = report.write(&out)?;
            print!("{}", report.summary().render());
            for f in files {
                log::info!("wrote {}", f.display());
            }
            Ok(report.passed())
        }
        (_, Some(scenario)) => {
            let cfg = build_config(scenario, &cli.common)?;
            log::info!("running {scenario} into {}", cfg.output_path.display());
            let (output, files) = run_and_write(&cfg)?;
            print!("{}", output.summary.render());
            for f in files {
                log::info!("wrote {}", f.display());
            }
            Ok(true)
        }
        (_, None) => unreachable!("every sweep subcommand maps to a scenario"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("ancmet: validation failed");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("ancmet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
