//! Bill documents: ingestion, tokenization and the token-tag file format.

mod fetch;
mod format;
mod tokenize;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FetchError, FormatError};

pub use fetch::{BillClient, BillClientConfig, DEFAULT_API_BASE};
pub use format::{read_split, read_split_from, write_split, write_split_to, SplitManifest, SplitName};
pub use tokenize::{tokenize, Tokenizer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chamber {
    House,
    Senate,
}

impl Chamber {
    /// Bill type code used by the congressional API (`hr`, `s`).
    pub fn api_code(self) -> &'static str {
        match self {
            Chamber::House => "hr",
            Chamber::Senate => "s",
        }
    }
}

impl FromStr for Chamber {
    type Err = FetchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "house" | "hr" | "h" => Ok(Chamber::House),
            "senate" | "s" => Ok(Chamber::Senate),
            _ => Err(FetchError::InvalidBillId(s.to_string())),
        }
    }
}

/// Identifies a bill: congress, chamber and bill number.
///
/// The textual form is `<congress>-<hr|s>-<number>`, e.g. `118-hr-189`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BillId {
    congress: u32,
    chamber: Chamber,
    number: u32,
}

impl BillId {
    pub fn new(congress: u32, chamber: Chamber, number: u32) -> Result<Self, FetchError> {
        if congress == 0 || number == 0 {
            return Err(FetchError::InvalidBillId(format!(
                "{congress}-{}-{number}",
                chamber.api_code()
            )));
        }
        Ok(BillId {
            congress,
            chamber,
            number,
        })
    }

    pub fn congress(&self) -> u32 {
        self.congress
    }

    pub fn chamber(&self) -> Chamber {
        self.chamber
    }

    pub fn number(&self) -> u32 {
        self.number
    }
}

impl fmt::Display for BillId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}-{}", self.congress, self.chamber.api_code(), self.number)
    }
}

impl FromStr for BillId {
    type Err = FetchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FetchError::InvalidBillId(s.to_string());
        let mut parts = s.split('-');
        let (Some(c), Some(t), Some(n), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let congress = c.parse().map_err(|_| bad())?;
        let number = n.parse().map_err(|_| bad())?;
        BillId::new(congress, t.parse().map_err(|_| bad())?, number).map_err(|_| bad())
    }
}

/// One bill as a token sequence with up to two tag layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    id: String,
    tokens: Vec<String>,
    level1: Option<Vec<String>>,
    level2: Option<Vec<String>>,
}

pub(crate) fn valid_token(t: &str) -> bool {
    !t.is_empty() && !t.chars().any(char::is_whitespace)
}

impl Document {
    pub fn new(id: impl Into<String>, tokens: Vec<String>) -> Result<Self, FormatError> {
        let id = id.into();
        if id.trim().is_empty() || id.trim() != id || id.contains(['\n', '\r']) {
            return Err(FormatError::InvalidId(id));
        }
        if let Some(bad) = tokens.iter().find(|t| !valid_token(t)) {
            return Err(FormatError::InvalidToken {
                doc_id: id.clone(),
                token: bad.clone(),
            });
        }
        Ok(Document {
            id,
            tokens,
            level1: None,
            level2: None,
        })
    }

    /// Tokenizes `text` into a new untagged document.
    pub fn from_text(id: impl Into<String>, text: &str, tokenizer: &Tokenizer) -> Result<Self, FormatError> {
        Document::new(id, tokenizer.tokenize(text))
    }

    pub fn with_level1(mut self, tags: Vec<String>) -> Result<Self, FormatError> {
        self.set_level1(Some(tags))?;
        Ok(self)
    }

    pub fn with_level2(mut self, tags: Vec<String>) -> Result<Self, FormatError> {
        self.set_level2(Some(tags))?;
        Ok(self)
    }

    pub fn set_level1(&mut self, tags: Option<Vec<String>>) -> Result<(), FormatError> {
        self.check_layer(tags.as_deref())?;
        self.level1 = tags;
        Ok(())
    }

    pub fn set_level2(&mut self, tags: Option<Vec<String>>) -> Result<(), FormatError> {
        self.check_layer(tags.as_deref())?;
        self.level2 = tags;
        Ok(())
    }

    fn check_layer(&self, tags: Option<&[String]>) -> Result<(), FormatError> {
        let Some(tags) = tags else { return Ok(()) };
        if tags.len() != self.tokens.len() {
            return Err(FormatError::LengthMismatch(self.id.clone()));
        }
        if let Some(bad) = tags.iter().find(|t| !valid_token(t)) {
            return Err(FormatError::InvalidToken {
                doc_id: self.id.clone(),
                token: bad.clone(),
            });
        }
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn level1(&self) -> Option<&[String]> {
        self.level1.as_deref()
    }

    pub fn level2(&self) -> Option<&[String]> {
        self.level2.as_deref()
    }

    /// Tokens `[start, end)` joined by single spaces.
    pub fn text(&self, start: usize, end: usize) -> String {
        self.tokens[start..end].join(" ")
    }
}
