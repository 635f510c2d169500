//! Token-tag split files.
//!
//! UTF-8, one token per line, TAB-separated columns: token, optional level-one
//! BIO tag, optional level-two BIO tag. A `# id = <doc-id>` line opens each
//! document and a blank line separates documents. Other lines starting with
//! `# ` are comments. All rows of a file carry the same number of columns.

use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use super::Document;
use crate::error::FormatError;

const ID_PREFIX: &str = "# id = ";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplitName {
    Train,
    Dev,
    Test,
    Other(String),
}

impl SplitName {
    /// Name for a split file, taken from its stem (`train.conll` is `Train`).
    pub fn from_path(path: &Path) -> SplitName {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        stem.parse().expect("infallible")
    }
}

impl FromStr for SplitName {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "train" => SplitName::Train,
            "dev" | "validation" => SplitName::Dev,
            "test" => SplitName::Test,
            _ => SplitName::Other(s.to_string()),
        })
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitName::Train => f.write_str("train"),
            SplitName::Dev => f.write_str("dev"),
            SplitName::Test => f.write_str("test"),
            SplitName::Other(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitManifest {
    pub name: SplitName,
    pub documents: Vec<Document>,
}

impl SplitManifest {
    pub fn new(name: SplitName, documents: Vec<Document>) -> Self {
        SplitManifest { name, documents }
    }

    pub fn token_count(&self) -> usize {
        self.documents.iter().map(Document::len).sum()
    }
}

struct Pending {
    id: String,
    tokens: Vec<String>,
    level1: Vec<String>,
    level2: Vec<String>,
}

pub fn read_split(path: impl AsRef<Path>) -> Result<SplitManifest, FormatError> {
    let path = path.as_ref();
    let file = File::open(path)?;
    read_split_from(BufReader::new(file), SplitName::from_path(path))
}

pub fn read_split_from<R: BufRead>(reader: R, name: SplitName) -> Result<SplitManifest, FormatError> {
    let mut pending: Option<Pending> = None;
    let mut raw: Vec<Pending> = Vec::new();
    let mut columns: Option<usize> = None;

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);

        if let Some(id) = line.strip_prefix(ID_PREFIX) {
            raw.extend(pending.take());
            pending = Some(Pending {
                id: id.to_string(),
                tokens: Vec::new(),
                level1: Vec::new(),
                level2: Vec::new(),
            });
            continue;
        }
        if line.starts_with("# ") {
            continue;
        }
        if line.trim().is_empty() {
            raw.extend(pending.take());
            continue;
        }

        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() > 3 {
            return Err(FormatError::malformed(
                lineno,
                format!("expected at most 3 columns, found {}", fields.len()),
            ));
        }
        match columns {
            None => columns = Some(fields.len()),
            Some(n) if n != fields.len() => {
                return Err(FormatError::malformed(
                    lineno,
                    format!("expected {n} columns, found {}", fields.len()),
                ))
            }
            Some(_) => {}
        }
        if let Some(col) = fields.iter().position(|f| !super::valid_token(f)) {
            return Err(FormatError::malformed(
                lineno,
                format!("column {} is empty or contains whitespace", col + 1),
            ));
        }

        let doc = pending.get_or_insert_with(|| Pending {
            id: format!("doc-{}", raw.len() + 1),
            tokens: Vec::new(),
            level1: Vec::new(),
            level2: Vec::new(),
        });
        doc.tokens.push(fields[0].to_string());
        if let Some(t) = fields.get(1) {
            doc.level1.push(t.to_string());
        }
        if let Some(t) = fields.get(2) {
            doc.level2.push(t.to_string());
        }
    }
    raw.extend(pending.take());

    let columns = columns.unwrap_or(1);
    let documents = raw
        .into_iter()
        .map(|p| {
            let mut doc = Document::new(p.id, p.tokens)?;
            if columns >= 2 {
                doc.set_level1(Some(p.level1))?;
            }
            if columns >= 3 {
                doc.set_level2(Some(p.level2))?;
            }
            Ok(doc)
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(SplitManifest { name, documents })
}

pub fn write_split(manifest: &SplitManifest, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let path = path.as_ref();
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    write_split_to(manifest, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_split_to<W: Write>(manifest: &SplitManifest, out: &mut W) -> Result<(), FormatError> {
    let layout = manifest
        .documents
        .first()
        .map(|d| (d.level1.is_some(), d.level2.is_some()));
    for doc in &manifest.documents {
        let this = (doc.level1.is_some(), doc.level2.is_some());
        if Some(this) != layout || this == (false, true) {
            return Err(FormatError::InconsistentLayers(doc.id.clone()));
        }
    }

    for (i, doc) in manifest.documents.iter().enumerate() {
        if i > 0 {
            out.write_all(b"\n")?;
        }
        writeln!(out, "{ID_PREFIX}{}", doc.id)?;
        for (t, token) in doc.tokens.iter().enumerate() {
            out.write_all(token.as_bytes())?;
            for layer in [&doc.level1, &doc.level2].into_iter().flatten() {
                out.write_all(b"\t")?;
                out.write_all(layer[t].as_bytes())?;
            }
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

impl SplitManifest {
    /// Serialized file contents.
    pub fn to_file_string(&self) -> Result<String, FormatError> {
        let mut buf = Vec::new();
        write_split_to(self, &mut buf)?;
        String::from_utf8(buf).map_err(|e| FormatError::Io(io::Error::new(io::ErrorKind::InvalidData, e)))
    }
}
