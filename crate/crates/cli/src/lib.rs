//! Command-line front end for `nashcover`: JSON file formats, subcommand
//! logic, the benchmark harness and numeric self-checks.

pub mod bench;
pub mod commands;
pub mod format;
pub mod selfcheck;
