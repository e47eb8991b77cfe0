use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use tempfile::NamedTempFile;

/// The only environment variable the tool reads.
pub const OUT_DIR_ENV: &str = "PTORSION_OUT_DIR";

pub const DEFAULT_OUT_DIR: &str = "ptorsion-out";

pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Writes every artifact of one run through a temp file in the target
/// directory followed by a rename.
pub struct Sink {
    dir: PathBuf,
    written: Vec<String>,
}

impl Sink {
    pub fn new(dir: PathBuf) -> std::io::Result<Sink> {
        fs::create_dir_all(&dir)?;
        Ok(Sink { dir, written: Vec::new() })
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> std::io::Result<()> {
        let mut tmp = NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(data)?;
        tmp.flush()?;
        tmp.persist(self.dir.join(name)).map_err(|e| e.error)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn text(&mut self, name: &str, data: &str) -> std::io::Result<()> {
        self.bytes(name, data.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        text.push('\n');
        self.text(name, &text)
    }

    /// `write` receives an in-memory buffer, for the library's CSV writers.
    pub fn with<F>(&mut self, name: &str, write: F) -> std::io::Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.bytes(name, &buf)
    }
}

pub fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Everything that changes between identical runs lives here and nowhere else.
pub fn metadata(command: &str, args: &[String], started: f64, files: &[String], exit_code: i32) -> Value {
    json!({
        "command": command,
        "args": args,
        "started_unix": started,
        "finished_unix": unix_seconds(),
        "tool_version": env!("CARGO_PKG_VERSION"),
        "files": files,
        "exit_code": exit_code,
    })
}
