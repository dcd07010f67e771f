use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unreadable or invalid config, unwritable output.
    #[error("config error: {0}")]
    Config(String),

    /// A computation or check failed.
    #[error("validation failure: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
        }
    }

    /// Input-domain errors from the core become config errors, the rest are
    /// computation failures.
    pub fn from_core(context: &str, err: jclab_core::Error) -> Self {
        use jclab_core::Error as E;
        match err {
            E::InvalidParameter { .. } | E::InvalidTime(_) | E::OutOfRange { .. } | E::InvalidBlock(..) => {
                CliError::Config(format!("{context}: {err}"))
            }
            _ => CliError::Validation(format!("{context}: {err}")),
        }
    }
}
