//! Configuration, run dispatch and artifact emission for the `conformon` binary.

pub mod config;
pub mod output;
pub mod run;

pub use config::{demo_config, parse_config, parse_config_for, Mode, RunConfig};
pub use run::{defaults_table, error_record, numeric_defaults, run, write_error_record, RunOutcome};
