use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dstform::commands;
use dstform::error::{exit, CliError};
use dstform::presets;
use dstform::{Overrides, ScenarioConfig};
use serde::Serialize;

/// Adaptive time-varying formation control over directed spanning trees.
#[derive(Parser)]
#[command(name = "dstform", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check graph assumptions, feasibility, LMI and tree identities.
    Verify(Common),
    /// Compute the controller gains.
    Synthesize(Common),
    /// Run the closed loop; writes a CSV trace to --out and prints a summary.
    Simulate(Common),
    /// Print a built-in scenario (e1, e2, e3).
    Example {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the adaptive law and the baselines on the same seed.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario instead of a file.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => ScenarioConfig::load(path)?,
            (None, Some(name)) => presets::preset(name).ok_or_else(|| unknown_preset(name))?,
            (None, None) => return Err(CliError::config("either --config or --preset is required")),
        };
        cfg.apply(Overrides {
            seed: self.seed,
            dt: self.dt,
            horizon: self.horizon,
        });
        Ok(cfg)
    }
}

fn unknown_preset(name: &str) -> CliError {
    CliError::config(format!("unknown example {name:?}; choose one of {}", presets::NAMES.join(", ")))
}

fn init_logging() {
    let level = match std::env::var("FORMATION_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).init();
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

/// Summary path next to the CSV: `run.csv` -> `run.summary.json`.
fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Verify(c) => {
            let report = commands::verify(&c.load()?)?;
            emit(&json(&report), c.out.as_deref())?;
            if let Some(f) = &report.failure {
                log::error!("{f}");
            }
            Ok(report.exit_code)
        }
        Command::Synthesize(c) => {
            let report = commands::synthesize(&c.load()?)?;
            emit(&json(&report), c.out.as_deref())?;
            Ok(exit::OK)
        }
        Command::Simulate(c) => {
            let cfg = c.load()?;
            let (summary, _) = commands::simulate(&cfg, c.out.as_deref())?;
            let text = json(&summary);
            match &c.out {
                Some(csv) => emit(&text, Some(&summary_path(csv)))?,
                None => emit(&text, None)?,
            }
            Ok(exit::OK)
        }
        Command::Example { name, out } => {
            let cfg = presets::preset(&name).ok_or_else(|| unknown_preset(&name))?;
            emit(&cfg.to_toml(), out.as_deref())?;
            Ok(exit::OK)
        }
        Command::Compare(c) => {
            let report = commands::compare(&c.load()?)?;
            emit(&json(&report), c.out.as_deref())?;
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
