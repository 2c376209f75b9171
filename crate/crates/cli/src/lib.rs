//! Command-line front end for wallgrowth: simulation runs, kernel and
//! limit-shape evaluation, SVG snapshots and the verification suites.

pub mod cli;
pub mod config;
pub mod kernel_cmd;
pub mod record;
pub mod shape;
pub mod simulate;
pub mod svg;
pub mod verify;

pub use cli::run_args;
pub use config::RunConfig;
pub use record::ResultRecord;
