use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::config::RunConfig;
use crate::error::CliError;

pub const CSV_HEADER: &str =
    "lambda,gamma,alpha,beta,L,n3,t3,tau_ub,tau_lb,neg_i,neg_j,neg_k,c_alpha,status";

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: serde_json::Value,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Metadata {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config: serde_json::to_value(config).expect("config serializes"),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// Comment lines opening every CSV file.
    pub fn csv_lines(&self, config: &RunConfig) -> String {
        format!(
            "# {} {}\n# config: {}\n# timestamp: {}\n",
            self.tool,
            self.version,
            config.canonical(),
            self.timestamp
        )
    }
}

/// Writes `contents` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Writes to `path` when given, else to stdout.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    meta: &'a Metadata,
    data: &'a T,
}

pub fn json_document<T: Serialize>(meta: &Metadata, data: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Document { meta, data }).expect("result serializes");
    s.push('\n');
    s
}

/// Formats an optional float; missing values are empty fields.
pub fn field(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "a\n").unwrap();
        write_atomic(&path, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn missing_directory_is_an_io_error() {
        let err = write_atomic(Path::new("/nonexistent-dir/x/out.csv"), "a").unwrap_err();
        assert!(matches!(err, CliError::Io(_)));
    }

    #[test]
    fn empty_field_for_missing_value() {
        assert_eq!(field(None), "");
        assert_eq!(field(Some(0.5)), "5e-1");
    }
}
