use std::process::ExitCode;

use ltl_ground::agent::AgentError;
use ltl_ground::automata::AutomataError;
use ltl_ground::config::ConfigError;
use ltl_ground::env::EnvError;
use ltl_ground::ltl::LtlError;
use ltl_ground::nrm::NrmError;
use ltl_ground::tasks::TaskError;
use thiserror::Error;

/// Failures grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, configuration or input formulae (status 1).
    #[error("{0}")]
    Usage(String),
    /// An oracle check disagreed (status 2).
    #[error("verification failed: {0}")]
    Verification(String),
    /// Missing or unreadable files (status 3).
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Io(_) => 3,
        })
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

macro_rules! usage_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Usage(e.to_string())
            }
        }
    )*};
}

usage_errors!(ConfigError, LtlError, AutomataError);

impl From<TaskError> for CliError {
    fn from(e: TaskError) -> Self {
        match e {
            TaskError::Io(e) => e.into(),
            TaskError::Verification { .. } => CliError::Verification(e.to_string()),
            TaskError::Manifest { .. } => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<EnvError> for CliError {
    fn from(e: EnvError) -> Self {
        match e {
            EnvError::Io(e) => e.into(),
            EnvError::Log(_) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<NrmError> for CliError {
    fn from(e: NrmError) -> Self {
        match e {
            NrmError::Io(e) => e.into(),
            NrmError::Checkpoint(_) => CliError::Io(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<AgentError> for CliError {
    fn from(e: AgentError) -> Self {
        match e {
            AgentError::Io(e) => e.into(),
            AgentError::Env(e) => e.into(),
            AgentError::Nrm(e) => e.into(),
            AgentError::Format(_) | AgentError::Json(_) => CliError::Io(e.to_string()),
            AgentError::NoTasks => CliError::Usage(e.to_string()),
        }
    }
}
