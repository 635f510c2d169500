//! Whitespace segmentation followed by punctuation splitting.
//!
//! Every punctuation character becomes its own token, with these exceptions:
//!
//! * capital dotted abbreviations such as `U.S.C.`, `H.R.` or `S.` (one or
//!   two uppercase letters followed by a period, repeated) stay whole;
//! * the plain-text bill quote marks ` `` ` and `''` and the `--` dash are
//!   single tokens;
//! * a hyphen joining two alphanumeric runs (`pre-placement`) stays inside
//!   the word;
//! * entries of a user-supplied keep-list stay whole.
//!
//! Re-tokenizing the space-joined output yields the same tokens.

use std::fs;
use std::io;
use std::path::Path;

/// Tokenizer with an optional keep-list of extra abbreviations.
#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    // longest first so that the first match is the longest
    keep: Vec<Vec<char>>,
}

impl Tokenizer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds keep-list entries. Entries must start with an alphanumeric
    /// character and contain no whitespace.
    pub fn with_abbreviations<I, S>(mut self, entries: I) -> Result<Self, String>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for entry in entries {
            let entry = entry.as_ref();
            let chars: Vec<char> = entry.chars().collect();
            match chars.first() {
                Some(c) if c.is_alphanumeric() => {}
                _ => return Err(format!("keep-list entry {entry:?} must start with a letter or digit")),
            }
            if chars.iter().any(|c| c.is_whitespace()) {
                return Err(format!("keep-list entry {entry:?} contains whitespace"));
            }
            if !self.keep.contains(&chars) {
                self.keep.push(chars);
            }
        }
        self.keep.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        Ok(self)
    }

    /// Reads a keep-list file: one entry per line, blank lines and lines
    /// starting with `#` ignored.
    pub fn with_abbreviation_file(self, path: impl AsRef<Path>) -> io::Result<Self> {
        let text = fs::read_to_string(path)?;
        let entries = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        self.with_abbreviations(entries)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for chunk in text.split_whitespace() {
            self.split_chunk(chunk, &mut out);
        }
        out
    }

    fn split_chunk(&self, chunk: &str, out: &mut Vec<String>) {
        let chars: Vec<char> = chunk.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let len = if c.is_alphanumeric() {
                self.keep_match(&chars, i)
                    .or_else(|| abbreviation_len(&chars, i))
                    .unwrap_or_else(|| word_len(&chars, i))
            } else {
                punct_len(&chars, i)
            };
            out.push(chars[i..i + len].iter().collect());
            i += len;
        }
    }

    fn keep_match(&self, chars: &[char], at: usize) -> Option<usize> {
        self.keep.iter().find_map(|entry| {
            let end = at + entry.len();
            if end > chars.len() || chars[at..end] != entry[..] {
                return None;
            }
            // an entry ending in a letter or digit must end at a word boundary
            let last = *entry.last()?;
            if last.is_alphanumeric() && chars.get(end).is_some_and(|c| c.is_alphanumeric()) {
                return None;
            }
            Some(entry.len())
        })
    }
}

/// Tokenizes with the default rules and an empty keep-list.
pub fn tokenize(text: &str) -> Vec<String> {
    Tokenizer::new().tokenize(text)
}

/// Length of a `(uppercase{1,2} ".")+` match starting at `at`, if any.
fn abbreviation_len(chars: &[char], at: usize) -> Option<usize> {
    let mut j = at;
    loop {
        let run = chars[j..].iter().take_while(|c| c.is_uppercase()).count();
        if !(1..=2).contains(&run) || chars.get(j + run) != Some(&'.') {
            break;
        }
        j += run + 1;
    }
    (j > at).then_some(j - at)
}

/// Alphanumeric runs joined by single inner hyphens.
fn word_len(chars: &[char], at: usize) -> usize {
    let run = |from: usize| chars[from..].iter().take_while(|c| c.is_alphanumeric()).count();
    let mut j = at + run(at);
    while chars.get(j) == Some(&'-') && chars.get(j + 1).is_some_and(|c| c.is_alphanumeric()) {
        j += 1 + run(j + 1);
    }
    j - at
}

fn punct_len(chars: &[char], at: usize) -> usize {
    match (chars[at], chars.get(at + 1)) {
        ('`', Some('`')) | ('\'', Some('\'')) | ('-', Some('-')) => 2,
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn honorific_period_is_split() {
        assert_eq!(toks("Mr. Cardin"), ["Mr", ".", "Cardin"]);
    }

    #[test]
    fn dotted_abbreviations_stay_whole() {
        assert_eq!(toks("(19 U.S.C. 1677)"), ["(", "19", "U.S.C.", "1677", ")"]);
        assert_eq!(toks("( 19 U.S.C. 1677 )"), ["(", "19", "U.S.C.", "1677", ")"]);
        assert_eq!(toks("[S. 104 Introduced in Senate (IS)]"), [
            "[", "S.", "104", "Introduced", "in", "Senate", "(", "IS", ")", "]"
        ]);
        assert_eq!(toks("H.R. 189"), ["H.R.", "189"]);
        assert_eq!(toks("SEC. 2."), ["SEC", ".", "2", "."]);
    }

    #[test]
    fn headings() {
        assert_eq!(toks("SECTION 1. SHORT TITLE."), ["SECTION", "1", ".", "SHORT", "TITLE", "."]);
    }

    #[test]
    fn empty_and_blank() {
        assert!(toks("").is_empty());
        assert!(toks(" \n\t ").is_empty());
    }

    #[test]
    fn quotes_and_dashes() {
        assert_eq!(
            toks("``Defending Domestic Produce Production Act of 2023''."),
            ["``", "Defending", "Domestic", "Produce", "Production", "Act", "of", "2023", "''", "."]
        );
        assert_eq!(toks("Industry.--Section 771"), ["Industry", ".", "--", "Section", "771"]);
        assert_eq!(toks("Children's"), ["Children", "'", "s"]);
        assert_eq!(toks("\"x\""), ["\"", "x", "\""]);
        assert_eq!(toks("```"), ["``", "`"]);
    }

    #[test]
    fn hyphenated_words() {
        assert_eq!(toks("pre-placement"), ["pre-placement"]);
        assert_eq!(toks("PRE-\nPLACEMENT"), ["PRE", "-", "PLACEMENT"]);
        assert_eq!(toks("a - b"), ["a", "-", "b"]);
        assert_eq!(toks("U.S.-based"), ["U.S.", "-", "based"]);
    }

    #[test]
    fn keep_list() {
        let t = Tokenizer::new().with_abbreviations(["Mr.", "Dept."]).unwrap();
        assert_eq!(t.tokenize("Mr. Cardin"), ["Mr.", "Cardin"]);
        assert_eq!(t.tokenize("Dept., and"), ["Dept.", ",", "and"]);
        assert_eq!(t.tokenize("xMr."), ["xMr", "."]);
        let t = Tokenizer::new().with_abbreviations(["No"]).unwrap();
        assert_eq!(t.tokenize("Nov."), ["Nov", "."]);
        assert!(Tokenizer::new().with_abbreviations([".x"]).is_err());
        assert!(Tokenizer::new().with_abbreviations(["a b"]).is_err());
    }

    #[test]
    fn keep_list_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("abbrev.txt");
        std::fs::write(&path, "# honorifics\nMr.\n\nMs.\n").unwrap();
        let t = Tokenizer::new().with_abbreviation_file(&path).unwrap();
        assert_eq!(t.tokenize("Mr. and Ms. Smith"), ["Mr.", "and", "Ms.", "Smith"]);
    }

    #[test]
    fn unicode_punctuation() {
        assert_eq!(toks("Veterans\u{2019} Affairs"), ["Veterans", "\u{2019}", "Affairs"]);
        assert_eq!(toks("\u{201c}Ünïcödé\u{201d}"), ["\u{201c}", "Ünïcödé", "\u{201d}"]);
        assert_eq!(toks("§340B"), ["§", "340B"]);
    }
}
