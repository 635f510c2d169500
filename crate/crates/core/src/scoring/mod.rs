//! Entity-level evaluation.
//!
//! A predicted mention counts as correct only when its start, end and label
//! all match a gold mention. Level-two scoring keys mentions by subclass and
//! still requires the exact span.

mod confusion;
mod stats;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::corpus::Document;
use crate::error::ScoringError;
use crate::num::{percent_hundredths, Scalar};
use crate::seqlabel::{decode_spans, repair, Layer, RepairPolicy, Scheme, Span, TagSequence};

pub use confusion::{confusion, ConfusionMatrix};
pub use stats::{stats, DatasetStats};

/// Which tag layer to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    One,
    Two,
}

impl Level {
    pub fn layer(self) -> Layer {
        match self {
            Level::One => Layer::Level1,
            Level::Two => Layer::Level2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Level::One => "level-one",
            Level::Two => "level-two",
        }
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "one" | "1" | "level1" => Ok(Level::One),
            "two" | "2" | "level2" => Ok(Level::Two),
            _ => Err(format!("unknown level {s:?} (expected one or two)")),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::One => "one",
            Level::Two => "two",
        })
    }
}

/// A percentage rounded half-to-even to two decimals, stored in hundredths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Percent(u32);

impl Percent {
    pub fn from_ratio(num: u64, den: u64) -> Self {
        Percent(percent_hundredths(num, den))
    }

    pub fn from_hundredths(h: u32) -> Self {
        Percent(h)
    }

    pub fn hundredths(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 100.0
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format!("{}.{:02}", self.0 / 100, self.0 % 100);
        f.pad(&s)
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Counts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
}

/// Precision, recall and F1 in a chosen scalar type, as fractions in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prf<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

impl Counts {
    pub fn gold(&self) -> u64 {
        self.true_positives + self.false_negatives
    }

    pub fn predicted(&self) -> u64 {
        self.true_positives + self.false_positives
    }

    pub fn add(&mut self, other: &Counts) {
        self.true_positives += other.true_positives;
        self.false_positives += other.false_positives;
        self.false_negatives += other.false_negatives;
    }

    pub fn metrics<T: Scalar>(&self) -> Prf<T> {
        let p = T::ratio(self.true_positives, self.predicted());
        let r = T::ratio(self.true_positives, self.gold());
        let denom = p.clone() + r.clone();
        let f1 = if denom == T::zero() {
            T::zero()
        } else {
            (T::from_count(2) * p.clone() * r.clone()) / denom
        };
        Prf {
            precision: p,
            recall: r,
            f1,
        }
    }

    pub fn precision(&self) -> Percent {
        Percent::from_ratio(self.true_positives, self.predicted())
    }

    pub fn recall(&self) -> Percent {
        Percent::from_ratio(self.true_positives, self.gold())
    }

    /// `2PR / (P + R)`, which for counts equals `2TP / (2TP + FP + FN)`.
    pub fn f1(&self) -> Percent {
        let tp = self.true_positives;
        Percent::from_ratio(2 * tp, 2 * tp + self.false_positives + self.false_negatives)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreReport {
    pub level: Level,
    pub counts: Counts,
    pub per_type: BTreeMap<String, Counts>,
}

impl ScoreReport {
    pub fn precision(&self) -> Percent {
        self.counts.precision()
    }

    pub fn recall(&self) -> Percent {
        self.counts.recall()
    }

    pub fn f1(&self) -> Percent {
        self.counts.f1()
    }

    pub fn metrics<T: Scalar>(&self) -> Prf<T> {
        self.counts.metrics()
    }

    /// Aligned-column text table.
    pub fn to_text(&self) -> String {
        let width = self
            .per_type
            .keys()
            .map(String::len)
            .chain([4])
            .max()
            .unwrap_or(4)
            + 2;
        let mut out = String::new();
        let c = &self.counts;
        writeln!(
            out,
            "{} scores: {} gold, {} predicted, {} correct",
            self.level.name(),
            c.gold(),
            c.predicted(),
            c.true_positives
        )
        .unwrap();
        writeln!(
            out,
            "{:<width$}{:>10}{:>10}{:>10}{:>8}{:>8}",
            "Type", "Precision", "Recall", "F1", "Gold", "Pred"
        )
        .unwrap();
        let row = |out: &mut String, name: &str, c: &Counts| {
            writeln!(
                out,
                "{:<width$}{:>10}{:>10}{:>10}{:>8}{:>8}",
                name,
                c.precision(),
                c.recall(),
                c.f1(),
                c.gold(),
                c.predicted()
            )
            .unwrap();
        };
        row(&mut out, "ALL", c);
        for (label, counts) in &self.per_type {
            row(&mut out, label, counts);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn row(c: &Counts) -> TypeRow<'_> {
    TypeRow {
        precision: c.precision(),
        recall: c.recall(),
        f1: c.f1(),
        gold: c.gold(),
        pred: c.predicted(),
        counts: c,
    }
}

#[derive(Serialize)]
struct TypeRow<'a> {
    precision: Percent,
    recall: Percent,
    f1: Percent,
    gold: u64,
    pred: u64,
    #[serde(flatten)]
    counts: &'a Counts,
}

impl Serialize for ScoreReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ScoreReport", 3)?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("overall", &row(&self.counts))?;
        let per_type: BTreeMap<&str, TypeRow<'_>> =
            self.per_type.iter().map(|(k, v)| (k.as_str(), row(v))).collect();
        st.serialize_field("per_type", &per_type)?;
        st.end()
    }
}

/// How tag layers are read before scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreOptions {
    pub scheme: Scheme,
    /// Repair applied to both sides before decoding; `None` rejects invalid layers.
    pub repair: Option<RepairPolicy>,
    /// Score on the IO view of the (repaired) layers.
    pub collapse_to_io: bool,
}

impl Default for ScoreOptions {
    fn default() -> Self {
        ScoreOptions {
            scheme: Scheme::Bio,
            repair: Some(RepairPolicy::Conll),
            collapse_to_io: false,
        }
    }
}

fn layer_tags(doc: &Document, level: Level) -> Result<&[String], ScoringError> {
    match level {
        Level::One => doc.level1(),
        Level::Two => doc.level2(),
    }
    .ok_or_else(|| ScoringError::MissingLayer(doc.id().to_string(), level.name()))
}

/// Decoded spans of one document layer.
pub fn extract_spans(doc: &Document, level: Level, opts: &ScoreOptions) -> Result<Vec<Span>, ScoringError> {
    let layer = level.layer();
    let mut seq = TagSequence::new(opts.scheme, layer_tags(doc, level)?.to_vec());
    if let Some(policy) = opts.repair {
        seq = repair(&seq, policy, layer);
    }
    if opts.collapse_to_io {
        seq = seq.to_io();
    }
    decode_spans(&seq, layer).map_err(|source| ScoringError::Sequence {
        doc_id: doc.id().to_string(),
        source,
    })
}

/// Pairs each gold document with the prediction of the same id.
pub(crate) fn align<'a>(
    gold: &'a [Document],
    pred: &'a [Document],
) -> Result<Vec<(&'a Document, &'a Document)>, ScoringError> {
    let by_id: HashMap<&str, &Document> = pred.iter().map(|d| (d.id(), d)).collect();
    if by_id.len() != pred.len() {
        return Err(ScoringError::AlignmentError("duplicate document id in predictions".into()));
    }
    if pred.len() != gold.len() {
        return Err(ScoringError::AlignmentError(format!(
            "{} gold documents but {} predicted",
            gold.len(),
            pred.len()
        )));
    }
    gold.iter()
        .map(|g| {
            let p = by_id
                .get(g.id())
                .ok_or_else(|| ScoringError::AlignmentError(format!("no prediction for {}", g.id())))?;
            if p.len() != g.len() {
                return Err(ScoringError::AlignmentError(format!(
                    "{}: {} gold tokens, {} predicted",
                    g.id(),
                    g.len(),
                    p.len()
                )));
            }
            Ok((g, *p))
        })
        .collect()
}

/// Counts for a single document pair, overall and per label.
pub fn count_spans(gold: &[Span], pred: &[Span]) -> (Counts, BTreeMap<String, Counts>) {
    let gold_set: HashSet<&Span> = gold.iter().collect();
    let pred_set: HashSet<&Span> = pred.iter().collect();
    let mut overall = Counts::default();
    let mut per_type: BTreeMap<String, Counts> = BTreeMap::new();
    for p in pred {
        let entry = per_type.entry(p.label.clone()).or_default();
        if gold_set.contains(p) {
            overall.true_positives += 1;
            entry.true_positives += 1;
        } else {
            overall.false_positives += 1;
            entry.false_positives += 1;
        }
    }
    for g in gold.iter().filter(|g| !pred_set.contains(g)) {
        overall.false_negatives += 1;
        per_type.entry(g.label.clone()).or_default().false_negatives += 1;
    }
    (overall, per_type)
}

/// Scores predictions against gold at one level with default options.
pub fn score(gold: &[Document], pred: &[Document], level: Level) -> Result<ScoreReport, ScoringError> {
    score_with(gold, pred, level, &ScoreOptions::default())
}

pub fn score_with(
    gold: &[Document],
    pred: &[Document],
    level: Level,
    opts: &ScoreOptions,
) -> Result<ScoreReport, ScoringError> {
    let mut counts = Counts::default();
    let mut per_type: BTreeMap<String, Counts> = BTreeMap::new();
    for (g, p) in align(gold, pred)? {
        let (c, types) = count_spans(&extract_spans(g, level, opts)?, &extract_spans(p, level, opts)?);
        counts.add(&c);
        for (label, tc) in types {
            per_type.entry(label).or_default().add(&tc);
        }
    }
    Ok(ScoreReport {
        level,
        counts,
        per_type,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IaaMode {
    /// Level-one labels on the IO view of both annotations.
    Io,
    /// Level-one labels under BIO.
    Level1,
}

impl FromStr for IaaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "io" => Ok(IaaMode::Io),
            "level1" | "one" => Ok(IaaMode::Level1),
            _ => Err(format!("unknown agreement mode {s:?} (expected io or level1)")),
        }
    }
}

/// Pairwise agreement: `a` is treated as gold and `b` is scored against it.
/// F1 is symmetric in the two annotators.
pub fn iaa(a: &[Document], b: &[Document], mode: IaaMode, policy: RepairPolicy) -> Result<ScoreReport, ScoringError> {
    let opts = ScoreOptions {
        scheme: Scheme::Bio,
        repair: Some(policy),
        collapse_to_io: mode == IaaMode::Io,
    };
    score_with(a, b, Level::One, &opts)
}

/// One annotator pair's agreement in both modes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IaaRow {
    pub pair: String,
    pub io_f1: Percent,
    pub level1_f1: Percent,
}

impl IaaRow {
    pub fn compute(
        pair: impl Into<String>,
        a: &[Document],
        b: &[Document],
        policy: RepairPolicy,
    ) -> Result<IaaRow, ScoringError> {
        Ok(IaaRow {
            pair: pair.into(),
            io_f1: iaa(a, b, IaaMode::Io, policy)?.f1(),
            level1_f1: iaa(a, b, IaaMode::Level1, policy)?.f1(),
        })
    }
}

/// Agreement table with one row per annotator pair.
pub fn iaa_table(rows: &[IaaRow]) -> String {
    let width = rows.iter().map(|r| r.pair.len()).chain([11]).max().unwrap_or(11) + 2;
    let mut out = String::new();
    writeln!(out, "{:<width$}{:>8}{:>12}", "Annotators", "IO F1", "Level 1 F1").unwrap();
    for r in rows {
        writeln!(out, "{:<width$}{:>8}{:>12}", r.pair, r.io_f1, r.level1_f1).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn doc(id: &str, l1: &[&str]) -> Document {
        let tokens = (0..l1.len()).map(|i| format!("t{i}")).collect();
        Document::new(id, tokens)
            .unwrap()
            .with_level1(l1.iter().map(|s| s.to_string()).collect())
            .unwrap()
    }

    #[test]
    fn identity_scores_full_marks() {
        let g = vec![doc("a", &["B-Act", "I-Act", "O", "B-Person"])];
        let r = score(&g, &g, Level::One).unwrap();
        assert_eq!(r.f1().to_string(), "100.00");
        assert_eq!(r.precision().to_string(), "100.00");
        assert_eq!(r.recall().to_string(), "100.00");
    }

    #[test]
    fn partial_match_example() {
        // gold: 3 mentions; pred: 2 mentions, one exact
        let g = vec![doc("a", &["B-Act", "I-Act", "O", "B-Person", "O", "B-Class"])];
        let p = vec![doc("a", &["B-Act", "I-Act", "O", "B-Person", "I-Person", "O"])];
        let r = score(&g, &p, Level::One).unwrap();
        assert_eq!(r.counts, Counts { true_positives: 1, false_positives: 1, false_negatives: 2 });
        assert_eq!(r.precision().to_string(), "50.00");
        assert_eq!(r.recall().to_string(), "33.33");
        assert_eq!(r.f1().to_string(), "40.00");
        let exact: Prf<Ratio<i64>> = r.metrics();
        assert_eq!(exact.f1, Ratio::new(2, 5));
        let approx: Prf<f64> = r.metrics();
        assert!((approx.recall - 1.0 / 3.0).abs() < 1e-12);
        let single: Prf<f32> = r.metrics();
        assert!((single.f1 - 0.4).abs() < 1e-6);
        assert_eq!(r.per_type["Person"].false_positives, 1);
        assert_eq!(r.per_type["Class"].false_negatives, 1);
    }

    #[test]
    fn empty_sides() {
        let g = vec![doc("a", &["O", "O"])];
        let r = score(&g, &g, Level::One).unwrap();
        assert_eq!(r.f1(), Percent::from_hundredths(0));
        assert!(r.per_type.is_empty());
    }

    #[test]
    fn alignment_errors() {
        let g = vec![doc("a", &["O", "O"])];
        assert!(matches!(score(&g, &[doc("a", &["O"])], Level::One), Err(ScoringError::AlignmentError(_))));
        assert!(matches!(score(&g, &[doc("b", &["O", "O"])], Level::One), Err(ScoringError::AlignmentError(_))));
        assert!(matches!(score(&g, &[], Level::One), Err(ScoringError::AlignmentError(_))));
        assert!(matches!(score(&g, &g, Level::Two), Err(ScoringError::MissingLayer(..))));
    }

    #[test]
    fn strict_mode_rejects_invalid_layers() {
        let g = vec![doc("a", &["O", "I-Act"])];
        let opts = ScoreOptions { repair: None, ..Default::default() };
        assert!(matches!(score_with(&g, &g, Level::One, &opts), Err(ScoringError::Sequence { .. })));
        assert_eq!(score(&g, &g, Level::One).unwrap().counts.true_positives, 1);
    }

    #[test]
    fn predictions_may_come_in_any_order() {
        let g = vec![doc("a", &["B-Act"]), doc("b", &["B-Class"])];
        let p = vec![g[1].clone(), g[0].clone()];
        assert_eq!(score(&g, &p, Level::One).unwrap().counts.true_positives, 2);
    }

    #[test]
    fn iaa_io_merges_adjacent_mentions() {
        let a = vec![doc("a", &["B-Act", "B-Act", "O"])];
        let b = vec![doc("a", &["B-Act", "I-Act", "O"])];
        assert_eq!(iaa(&a, &b, IaaMode::Io, RepairPolicy::Conll).unwrap().f1().to_string(), "100.00");
        assert_eq!(iaa(&a, &b, IaaMode::Level1, RepairPolicy::Conll).unwrap().f1().to_string(), "0.00");
        let row = IaaRow::compute("1-2", &a, &b, RepairPolicy::Conll).unwrap();
        let table = iaa_table(&[row]);
        assert!(table.starts_with("Annotators"));
        assert!(table.contains("IO F1"));
        assert!(table.contains("Level 1 F1"));
        assert!(table.lines().nth(1).unwrap().contains("100.00"));
    }

    #[test]
    fn report_text_and_json() {
        let g = vec![doc("a", &["B-Act", "O", "B-Person"])];
        let p = vec![doc("a", &["B-Act", "O", "O"])];
        let r = score(&g, &p, Level::One).unwrap();
        let text = r.to_text();
        assert!(text.contains("ALL"));
        assert!(text.lines().any(|l| l.starts_with("Act") && l.contains("100.00")));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["overall"]["f1"], serde_json::json!(66.67));
        assert_eq!(v["overall"]["true_positives"], serde_json::json!(1));
        assert_eq!(v["per_type"]["Person"]["recall"], serde_json::json!(0.0));
        assert_eq!(v["level"], "one");
    }

    #[test]
    fn percent_display() {
        assert_eq!(Percent::from_ratio(1, 3).to_string(), "33.33");
        assert_eq!(Percent::from_ratio(0, 3).to_string(), "0.00");
        assert_eq!(format!("{:>7}", Percent::from_ratio(1, 2)), "  50.00");
    }
}
