use std::fmt;

/// Pipeline stage that produced an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stage {
    Config,
    Input,
    Norms { n: usize, kind: String },
    Spectrum { n: usize, kind: String },
    Okounkov,
    Laws,
    Output,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stage::Config => write!(f, "config"),
            Stage::Input => write!(f, "input"),
            Stage::Norms { n, kind } => write!(f, "norms (n = {n}, {kind})"),
            Stage::Spectrum { n, kind } => write!(f, "spectrum (n = {n}, {kind})"),
            Stage::Okounkov => write!(f, "okounkov"),
            Stage::Laws => write!(f, "laws"),
            Stage::Output => write!(f, "output"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad configuration, input or environment.
    Config,
    /// A numerical routine failed or an audit did not pass.
    Numerical,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("stage {stage}: {message}")]
pub struct RunError {
    pub stage: Stage,
    pub kind: ErrorKind,
    pub message: String,
}

impl RunError {
    pub fn config(stage: Stage, message: impl Into<String>) -> Self {
        Self { stage, kind: ErrorKind::Config, message: message.into() }
    }

    pub fn numerical(stage: Stage, err: impl fmt::Display) -> Self {
        Self { stage, kind: ErrorKind::Numerical, message: err.to_string() }
    }

    /// Process exit code: 2 for configuration errors, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 2,
            ErrorKind::Numerical => 3,
        }
    }
}
