use std::path::Path;

/// CLI failure modes, split by exit code: usage problems (bad flags,
/// invalid parameter combinations) exit 1, runtime problems (I/O) exit 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Runtime(format!("{}: {err}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "error: {msg}"),
            CliError::Runtime(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<linksim::Error> for CliError {
    fn from(err: linksim::Error) -> Self {
        // Config and domain errors are parameter problems: usage class.
        CliError::Usage(err.to_string())
    }
}
