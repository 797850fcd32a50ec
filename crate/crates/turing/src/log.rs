//! Append-only JSONL event log.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::ServiceError;
use crate::session::{Envelope, Event, SessionStore, EVENT_VERSION};

pub struct EventLog {
    path: PathBuf,
    file: File,
}

impl EventLog {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let path = path.into();
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| ServiceError::Log(format!("{}: {e}", path.display())))?;
        Ok(Self { path, file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes one event as a single line and syncs it to disk.
    pub fn append(&mut self, event: &Event) -> Result<(), ServiceError> {
        let mut line = serde_json::to_vec(&Envelope { v: EVENT_VERSION, event: event.clone() })
            .map_err(|e| ServiceError::Log(e.to_string()))?;
        line.push(b'\n');
        self.file
            .write_all(&line)
            .and_then(|_| self.file.sync_data())
            .map_err(|e| ServiceError::Log(e.to_string()))
    }
}

/// Rebuilds a store from a log file. A torn final line (crash mid-append) is
/// ignored; a malformed line anywhere else is an error.
pub fn replay(path: impl AsRef<Path>) -> Result<SessionStore, ServiceError> {
    let path = path.as_ref();
    let mut store = SessionStore::default();
    if !path.exists() {
        return Ok(store);
    }
    let file = File::open(path).map_err(|e| ServiceError::Log(e.to_string()))?;
    let lines: Vec<String> =
        BufReader::new(file).lines().collect::<Result<_, _>>().map_err(|e| ServiceError::Log(e.to_string()))?;
    let last = lines.len().saturating_sub(1);
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let envelope: Envelope = match serde_json::from_str(line) {
            Ok(e) => e,
            Err(_) if i == last => break,
            Err(e) => return Err(ServiceError::Log(format!("line {}: {e}", i + 1))),
        };
        if envelope.v != EVENT_VERSION {
            return Err(ServiceError::Log(format!("line {}: unsupported event version {}", i + 1, envelope.v)));
        }
        store.apply(&envelope.event).map_err(|e| ServiceError::Log(format!("line {}: {e}", i + 1)))?;
    }
    Ok(store)
}
