use std::io::Write;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// Fixed-precision number formatting for CSV output.
#[derive(Debug, Clone, Copy)]
pub struct Format {
    pub precision: usize,
}

impl Format {
    pub const DEFAULT_PRECISION: usize = 2;

    /// dB, meters, exponents.
    pub fn num(&self, v: f64) -> String {
        format!("{v:.*}", self.precision)
    }

    pub fn prob(&self, p: f64) -> String {
        format!("{p:.*}", self.precision + 4)
    }

    pub fn opt(&self, v: Option<f64>) -> String {
        v.map(|v| self.num(v)).unwrap_or_default()
    }
}

/// Writes `content` to `path` through a temporary file in the same
/// directory, so readers never observe a partial file.
pub fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(content.as_bytes())
        .and_then(|_| tmp.flush())
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
