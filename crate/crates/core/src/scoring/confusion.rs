use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{align, layer_tags, Level};
use crate::corpus::Document;
use crate::error::ScoringError;
use crate::ontology::{Level1Label, Level2Label};
use crate::seqlabel::{Layer, UNRESOLVED};

/// Token-level counts of (gold label, predicted label). Rows are gold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub cells: Vec<Vec<u64>>,
}

fn axis(level: Level) -> Vec<String> {
    let mut labels: Vec<String> = match level {
        Level::One => Level1Label::ALL.iter().map(|l| l.as_str().to_string()).collect(),
        Level::Two => Level2Label::ALL
            .iter()
            .map(|l| l.prompt_name().to_string())
            .chain([UNRESOLVED.to_string()])
            .collect(),
    };
    labels.push("O".to_string());
    labels
}

fn token_label(tag: &str, layer: Layer) -> Option<&'static str> {
    if tag == "O" {
        return Some("O");
    }
    let label = tag.strip_prefix("B-").or_else(|| tag.strip_prefix("I-"))?;
    layer.canonical(label)
}

/// Token-level confusion between two aligned sets of documents.
pub fn confusion(gold: &[Document], pred: &[Document], level: Level) -> Result<ConfusionMatrix, ScoringError> {
    let labels = axis(level);
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let n = labels.len();
    let mut cells = vec![vec![0u64; n]; n];
    let layer = level.layer();
    for (g, p) in align(gold, pred)? {
        let lookup = |doc: &Document, tag: &str| {
            token_label(tag, layer)
                .map(|l| index[l])
                .ok_or_else(|| ScoringError::UnknownLabel {
                    doc_id: doc.id().to_string(),
                    label: tag.to_string(),
                })
        };
        for (gt, pt) in layer_tags(g, level)?.iter().zip(layer_tags(p, level)?) {
            cells[lookup(g, gt)?][lookup(p, pt)?] += 1;
        }
    }
    Ok(ConfusionMatrix { labels, cells })
}

impl ConfusionMatrix {
    pub fn row_sum(&self, row: usize) -> u64 {
        self.cells[row].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    pub fn off_diagonal(&self) -> u64 {
        self.total() - (0..self.labels.len()).map(|i| self.cells[i][i]).sum::<u64>()
    }

    pub fn get(&self, gold: &str, pred: &str) -> Option<u64> {
        let g = self.labels.iter().position(|l| l == gold)?;
        let p = self.labels.iter().position(|l| l == pred)?;
        Some(self.cells[g][p])
    }

    /// Heatmap-ready CSV: header of predicted labels, one row per gold label.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gold\\pred");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (label, row) in self.labels.iter().zip(&self.cells) {
            out.push_str(label);
            for c in row {
                write!(out, ",{c}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let label_w = self.labels.iter().map(String::len).max().unwrap_or(1) + 2;
        let cell_w = self
            .cells
            .iter()
            .flatten()
            .map(|c| c.to_string().len())
            .chain(self.labels.iter().map(String::len))
            .max()
            .unwrap_or(1)
            + 2;
        let mut out = format!("{:<label_w$}", "gold \\ pred");
        for l in &self.labels {
            write!(out, "{l:>cell_w$}").unwrap();
        }
        out.push('\n');
        for (label, row) in self.labels.iter().zip(&self.cells) {
            write!(out, "{label:<label_w$}").unwrap();
            for c in row {
                write!(out, "{c:>cell_w$}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }
}
