//! `srg`: configuration-driven front end for the spectral-rg engine.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use commands::Outcome;

#[derive(Parser, Debug)]
#[command(name = "srg", version, about = "Spectral renormalization group runs and diagnostics")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML configuration; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `section.key=value` override, repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized runs, overriding `suite.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Instance count for the isospectrality suite, overriding `suite.instances`.
    #[arg(long)]
    instances: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Build,
    GsEnergy,
    RgRun,
    AuditContraction,
    IsospectralSuite,
    Mourre,
    LapScan,
    DecayScan,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Build => "build",
            Command::GsEnergy => "gs-energy",
            Command::RgRun => "rg-run",
            Command::AuditContraction => "audit-contraction",
            Command::IsospectralSuite => "isospectral-suite",
            Command::Mourre => "mourre",
            Command::LapScan => "lap-scan",
            Command::DecayScan => "decay-scan",
            Command::All => "all",
        }
    }

    fn randomized(self) -> bool {
        matches!(self, Command::IsospectralSuite | Command::All)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut overrides = cli.overrides.clone();
    if let Some(s) = cli.seed {
        overrides.push(format!("suite.seed={s}"));
    }
    if let Some(n) = cli.instances {
        overrides.push(format!("suite.instances={n}"));
    }
    if let Some(o) = &cli.out {
        overrides.push(format!("output.dir={}", toml::Value::String(o.display().to_string())));
    }
    let cfg = match config::load(cli.config.as_deref(), &overrides) {
        Ok(c) => c,
        Err(errors) => return validation_failure(&errors),
    };
    let mut errors = cfg.validate();
    if cli.command.randomized() && cfg.suite.seed.is_none() {
        errors.push("suite.seed is required for randomized runs (use --seed)".into());
    }
    if !errors.is_empty() {
        return validation_failure(&errors);
    }
    let outcome = commands::run(cli.command, &cfg);
    match outcome {
        Ok(Outcome::Pass) => ExitCode::from(0),
        Ok(Outcome::Failed(why)) => {
            eprintln!("acceptance failure: {why}");
            ExitCode::from(3)
        }
        Err(commands::RunError::Validation(e)) => validation_failure(&[e]),
        Err(commands::RunError::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn validation_failure(errors: &[String]) -> ExitCode {
    let report = serde_json::json!({ "errors": errors });
    eprintln!("{report}");
    for e in errors {
        eprintln!("error: {e}");
    }
    ExitCode::from(1)
}
