use wentzell_core::error::Error as CoreError;

/// Failure classes of the tool, each with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl LabError {
    /// 1 validation, 2 numerical, 3 verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Validation(_) => 1,
            LabError::Numerical(_) => 2,
            LabError::Verification(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LabError::Validation(_) => "validation",
            LabError::Numerical(_) => "numerical",
            LabError::Verification(_) => "verification",
        }
    }
}

impl From<CoreError> for LabError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(_) | CoreError::InvalidConfig(_) => LabError::Validation(e.to_string()),
            _ => LabError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Validation(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Validation(format!("json: {e}"))
    }
}

impl From<csv::Error> for LabError {
    fn from(e: csv::Error) -> Self {
        LabError::Validation(format!("csv: {e}"))
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
