//! Command-line front end for `squeezelab`: scenario files, the preset
//! built from the reference experiment, and one subcommand per analysis.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod output;

pub use cli::run;
pub use config::Scenario;
