use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] partmax::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// Stable category printed on failure.
    pub fn category(&self) -> &'static str {
        use partmax::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) | CliError::Csv(_) | CliError::Core(E::Io(_)) => "io",
            CliError::Core(E::InstanceTooLarge { .. }) => "too-large",
            CliError::Core(E::Parse(_) | E::MalformedLine { .. }) => "input",
            CliError::Core(_) => "instance",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 2,
            "io" => 3,
            "input" => 4,
            "too-large" => 5,
            _ => 6,
        }
    }
}
