use std::fmt;

/// A failure that ends the run, with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input files: exit 1.
    Usage(String),
    /// Nothing left to process: exit 2.
    NoInput(String),
    /// An estimator failed numerically: exit 3.
    Numeric(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::NoInput(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::NoInput(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<word_entropy::Error> for CliError {
    fn from(err: word_entropy::Error) -> Self {
        match err {
            word_entropy::Error::Numeric { .. } => CliError::Numeric(err.to_string()),
            word_entropy::Error::TooShort { .. } => CliError::NoInput(err.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}
