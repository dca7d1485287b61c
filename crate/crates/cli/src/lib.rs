//! Command-line harness for `levyfluct`.

mod app;
pub mod config;
pub mod report;
pub mod suite;

pub use app::run;
pub use config::{emit_config, parse_config, parse_config_file, ConfigError, RunConfig, RunParams};
pub use report::{ReportRow, ValidationReport};

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status when a validation row fails (`|z| > 3`).
pub const EXIT_VALIDATION_FAILED: i32 = 1;
/// Exit status for usage, configuration and evaluation errors.
pub const EXIT_USAGE: i32 = 2;
