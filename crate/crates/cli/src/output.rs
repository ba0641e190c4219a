//! Output files are staged in temporaries next to their destination and
//! renamed into place, so a failed run leaves nothing half-written.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Files to write, relative to an output directory.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, String)>,
}

impl Outputs {
    pub fn add(&mut self, rel: impl Into<PathBuf>, text: String) {
        self.files.push((rel.into(), text));
    }

    pub fn add_json(&mut self, rel: impl Into<PathBuf>, value: &serde_json::Value) -> CliResult<()> {
        self.add(rel, serde_json::to_string_pretty(value)? + "\n");
        Ok(())
    }

    pub fn extend(&mut self, prefix: &Path, other: Outputs) {
        for (p, t) in other.files {
            self.files.push((prefix.join(p), t));
        }
    }

    pub fn write(&self, dir: &Path) -> CliResult<()> {
        for (rel, text) in &self.files {
            write_atomic(&dir.join(rel), text)?;
        }
        Ok(())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_atomic(path: &Path, text: &str) -> CliResult<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(|e| io_err(parent, e))?;
    tmp.write_all(text.as_bytes()).map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

/// Checks up front that `dir` can be created and written to.
pub fn ensure_writable(dir: &Path) -> CliResult<()> {
    if dir.exists() && !dir.is_dir() {
        return Err(CliError::Io(format!("{} exists and is not a directory", dir.display())));
    }
    let mut probe = dir.to_path_buf();
    while !probe.exists() {
        match probe.parent() {
            Some(p) if !p.as_os_str().is_empty() => probe = p.to_path_buf(),
            _ => {
                probe = PathBuf::from(".");
                break;
            }
        }
    }
    let meta = fs::metadata(&probe).map_err(|e| io_err(&probe, e))?;
    if meta.permissions().readonly() {
        return Err(CliError::Io(format!("{} is not writable", probe.display())));
    }
    Ok(())
}

/// Prints to stdout; a closed pipe (e.g. `| head`) is not an error.
pub fn emit(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}
