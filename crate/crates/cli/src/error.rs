use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("numerical failure: {0}")]
    Numerical(quadmod::Error),
}

impl From<quadmod::Error> for CliError {
    /// Bad shapes and out-of-domain parameters are input errors; everything
    /// else went wrong inside the computation.
    fn from(e: quadmod::Error) -> Self {
        match e {
            quadmod::Error::Domain(m) | quadmod::Error::Geometry(m) => CliError::Input(m),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        }
    }
}
