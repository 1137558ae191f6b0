//! Scenario runner for `cavityflow`: JSON configurations, audits, CSV/JSON
//! outputs with a hashed manifest, and SVG figures.

pub mod config;
pub mod output;
pub mod plot;
pub mod presets;
pub mod run;

pub use config::{load_config, parse_config, ConfigError, ScenarioConfig};
pub use run::{run_file, run_scenario, RunOptions, RunSummary};

/// Exit status for a failed run: 2 for invalid input, 3 for numerical
/// failures, 1 for anything else (I/O and the like).
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<cavityflow::Error>() {
        Some(e) if e.is_validation() => 2,
        Some(_) => 3,
        None => 1,
    }
}
