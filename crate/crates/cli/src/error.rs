//! Command-line failures and their exit codes.

use std::fmt;

use coolplan::ErrorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Config,
    Input,
    Infeasible,
    Training,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Config => 2,
            Kind::Input => 3,
            Kind::Infeasible => 4,
            Kind::Training => 5,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Kind::Config => "E_CONFIG",
            Kind::Input => "E_INPUT",
            Kind::Infeasible => "E_INFEASIBLE",
            Kind::Training => "E_TRAINING",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Kind::Config, message)
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(Kind::Input, message)
    }

    /// `error[E_CODE]: message`, always on one line.
    pub fn line(&self) -> String {
        let msg: String = self.message.split_whitespace().collect::<Vec<_>>().join(" ");
        format!("error[{}]: {}", self.kind.code(), msg)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

impl std::error::Error for CliError {}

impl From<coolplan::Error> for CliError {
    fn from(e: coolplan::Error) -> Self {
        let kind = match e.kind() {
            ErrorKind::Config => Kind::Config,
            ErrorKind::Input => Kind::Input,
            ErrorKind::Infeasible => Kind::Infeasible,
            ErrorKind::Training => Kind::Training,
        };
        Self::new(kind, e.to_string())
    }
}
