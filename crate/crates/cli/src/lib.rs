//! Command-line front end for `mxfreq`.
//!
//! Parsing lives in [`args`], validation in [`config`], execution in
//! [`run`], and encoding in [`output`].

pub mod args;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::RunConfig;
pub use error::CliError;
pub use output::Output;
pub use run::{execute, run};
