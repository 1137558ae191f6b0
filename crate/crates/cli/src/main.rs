use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use cavityflow_cli::{exit_code, load_config, presets, run_scenario, RunOptions};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cavityflow", version, about = "Run photon-fluid scenarios for lossy planar microcavities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON file or a built-in preset.
    Run {
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Output directory (overrides the configuration).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random seed (overrides the configuration).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check a configuration and list every problem found.
    Validate { config: PathBuf },
    /// Print a preset configuration, or list the presets.
    Preset { name: Option<String> },
    /// Print the tool version.
    Version,
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, preset, out, seed } => {
            let cfg = match (config, preset) {
                (Some(path), None) => load_config(&path)?,
                (None, Some(name)) => presets::preset(&name)?,
                _ => bail!(cavityflow_cli::ConfigError { problems: vec!["give exactly one of CONFIG or --preset".into()] }),
            };
            let summary = run_scenario(&cfg, &RunOptions { out_dir: out, seed })?;
            for w in &summary.manifest.warnings {
                eprintln!("warning [{}]: {}", w.code, w.message);
            }
            println!("wrote {} files to {}", summary.manifest.files.len() + 1, summary.out_dir.display());
        }
        Command::Validate { config } => {
            load_config(&config)?;
            println!("{}: ok", config.display());
        }
        Command::Preset { name: Some(name) } => match presets::preset_text(&name) {
            Some(text) => print!("{text}"),
            None => bail!(cavityflow_cli::ConfigError { problems: vec![format!("unknown preset {name:?}")] }),
        },
        Command::Preset { name: None } => {
            for n in presets::names() {
                println!("{n}");
            }
        }
        Command::Version => println!("cavityflow {}", env!("CARGO_PKG_VERSION")),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
