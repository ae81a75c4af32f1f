//! File formats and command-line front end for `intrinsic-core`.

pub mod args;
pub mod formats;
pub mod run;

pub use args::Cli;
pub use run::{run, Status};
