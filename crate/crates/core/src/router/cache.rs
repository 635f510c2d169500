use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::client::ChatRequest;

/// One recorded exchange, stored as a single JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub request_hash: String,
    pub prompt: ChatRequest,
    pub response: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

/// Hex SHA-256 of the canonical JSON request body.
pub fn request_hash(body: &ChatRequest) -> String {
    hex::encode(Sha256::digest(body.canonical_json().as_bytes()))
}

struct Inner {
    entries: HashMap<String, String>,
    file: Option<File>,
}

/// Request-hash to raw-response map, optionally backed by an append-only
/// JSONL file. When a hash appears more than once the first record wins.
pub struct TranscriptCache {
    path: Option<PathBuf>,
    inner: Mutex<Inner>,
}

impl TranscriptCache {
    pub fn in_memory() -> Self {
        TranscriptCache {
            path: None,
            inner: Mutex::new(Inner {
                entries: HashMap::new(),
                file: None,
            }),
        }
    }

    /// Loads `path` if it exists and appends new records to it.
    pub fn open(path: impl AsRef<Path>) -> io::Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: TranscriptRecord = serde_json::from_str(&line).map_err(|e| {
                    io::Error::new(io::ErrorKind::InvalidData, format!("{}:{}: {e}", path.display(), i + 1))
                })?;
                entries.entry(rec.request_hash).or_insert(rec.response);
            }
        } else if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(TranscriptCache {
            path: Some(path),
            inner: Mutex::new(Inner {
                entries,
                file: Some(file),
            }),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn get(&self, hash: &str) -> Option<String> {
        self.inner.lock().expect("cache lock").entries.get(hash).cloned()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Records a response unless one is already stored for the same request.
    /// Returns whether a record was added.
    pub fn insert(&self, body: &ChatRequest, response: &str) -> io::Result<bool> {
        let hash = request_hash(body);
        let mut inner = self.inner.lock().expect("cache lock");
        if inner.entries.contains_key(&hash) {
            return Ok(false);
        }
        if let Some(file) = inner.file.as_mut() {
            let rec = TranscriptRecord {
                request_hash: hash.clone(),
                prompt: body.clone(),
                response: response.to_string(),
                timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            };
            let mut line = serde_json::to_string(&rec).expect("record serializes");
            line.push('\n');
            file.write_all(line.as_bytes())?;
            file.flush()?;
        }
        inner.entries.insert(hash, response.to_string());
        Ok(true)
    }
}
