use std::io;
use std::path::PathBuf;

use cdslab_core::syntax::DefError;
use cdslab_core::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },
    #[error("{}", join_defs(.0))]
    Definitions(Vec<DefError>),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Engine(#[from] Error),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: io::Error },
}

fn join_defs(errs: &[DefError]) -> String {
    errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn unknown(kind: &'static str, name: &str) -> Self {
        CliError::UnknownName {
            kind,
            name: name.to_string(),
        }
    }

    /// 2 for usage errors and unknown names, 1 for everything the engine rejects.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::UnknownName { .. } | CliError::Io { .. } => 2,
            CliError::Engine(Error::RequestUnknownCell(_) | Error::UnknownField(_)) => 2,
            _ => 1,
        }
    }

    /// Short machine-readable category used by the session protocol.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::UnknownName { .. } => "unknown-name",
            CliError::Definitions(_) => "definition",
            CliError::Invalid(_) => "validation",
            CliError::Io { .. } => "io",
            CliError::Engine(e) => match e {
                Error::WrongPhase => "wrong-phase",
                Error::DialoguePending => "pending",
                Error::ArgumentAnswerIllTyped { .. } => "ill-typed",
                Error::RequestUnknownCell(_) | Error::UnknownField(_) => "unknown-name",
                Error::BudgetExceeded(_) => "budget",
                _ => "validation",
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
