//! Command-line front end: definition files, batch commands, the REPL and the
//! session server.

pub mod commands;
pub mod error;
pub mod repl;
pub mod server;

pub use error::{CliError, CliResult};
pub use repl::Repl;
pub use server::Connection;
