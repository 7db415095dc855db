use std::fmt;

/// Kind used when the reader of stdout went away; not reported.
pub const BROKEN_PIPE: &str = "broken-pipe";

/// Failure reported as `error: {kind}: {message}` on stderr.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::new("config", message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Keep the report on one line.
        let msg = self.message.replace(['\n', '\r'], " ");
        write!(f, "{}: {}", self.kind, msg)
    }
}

impl std::error::Error for CliError {}

impl From<stringcat_core::Error> for CliError {
    fn from(e: stringcat_core::Error) -> Self {
        if let stringcat_core::Error::Io(io) = e {
            return io.into();
        }
        CliError::new(e.kind(), e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return CliError::new(BROKEN_PIPE, e.to_string());
        }
        CliError::new("io", e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line());
        let msg = e.to_string();
        match (line, e.into_kind()) {
            (_, csv::ErrorKind::Io(io)) => io.into(),
            (Some(line), _) => CliError::new("csv", format!("line {line}: {msg}")),
            (None, _) => CliError::new("csv", msg),
        }
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> Self {
        CliError::config(format!("config file: {}", e.message()))
    }
}

pub type CliResult<T> = Result<T, CliError>;
