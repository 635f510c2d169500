//! Generators and reference implementations shared by the integration tests.
//!
//! The reference functions here work on raw tag strings and never call the
//! library's decoding or scoring code.

#![allow(dead_code)]

pub mod release;

use std::collections::BTreeMap;

use billner::corpus::{Document, SplitName};
use billner::router::{ChatBackend, ChatRequest, SublabelRequest};
use billner::{Level2Label, SplitManifest};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const LEVEL1: [&str; 6] = ["Person", "Organization", "Document", "Act", "Abstraction", "Class"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// A span `[start, end)` with its label.
pub type RawSpan = (usize, usize, String);

/// Random non-overlapping spans over `len` tokens.
pub fn random_spans(rng: &mut ChaCha8Rng, len: usize, labels: &[&str]) -> Vec<RawSpan> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < len {
        if rng.gen_bool(0.3) {
            let n = rng.gen_range(1..=3).min(len - i);
            out.push((i, i + n, labels.choose(rng).unwrap().to_string()));
            i += n;
        } else {
            i += 1;
        }
    }
    out
}

/// BIO tags for spans, written position by position.
pub fn bio_tags(spans: &[RawSpan], len: usize) -> Vec<String> {
    let mut tags = vec!["O".to_string(); len];
    for (s, e, l) in spans {
        tags[*s] = format!("B-{l}");
        for t in &mut tags[s + 1..*e] {
            *t = format!("I-{l}");
        }
    }
    tags
}

/// Arbitrary, possibly ill-formed, tags over known labels.
pub fn random_tags(rng: &mut ChaCha8Rng, len: usize, labels: &[&str]) -> Vec<String> {
    (0..len)
        .map(|_| match rng.gen_range(0..3) {
            0 => "O".to_string(),
            1 => format!("B-{}", labels.choose(rng).unwrap()),
            _ => format!("I-{}", labels.choose(rng).unwrap()),
        })
        .collect()
}

/// Entities as read by conlleval: a chunk starts at `B-X`, or at `I-X` when
/// the previous tag is not of type X, and continues over `I-X`.
pub fn naive_chunks(tags: &[String]) -> Vec<RawSpan> {
    let split = |t: &str| -> Option<(char, String)> {
        if t == "O" {
            None
        } else {
            Some((t.chars().next().unwrap(), t[2..].to_string()))
        }
    };
    let mut out: Vec<RawSpan> = Vec::new();
    let mut open: Option<RawSpan> = None;
    for (i, t) in tags.iter().enumerate() {
        let cur = split(t);
        let extend = match (&open, &cur) {
            (Some(o), Some(('I', l))) => &o.2 == l,
            _ => false,
        };
        if extend {
            open.as_mut().unwrap().1 = i + 1;
            continue;
        }
        if let Some(o) = open.take() {
            out.push(o);
        }
        if let Some((_, l)) = cur {
            open = Some((i, i + 1, l));
        }
    }
    out.extend(open);
    out
}

/// Spans of an IO sequence: maximal runs of one label.
pub fn naive_io_chunks(tags: &[String]) -> Vec<RawSpan> {
    let mut out: Vec<RawSpan> = Vec::new();
    for (i, t) in tags.iter().enumerate() {
        if t == "O" {
            continue;
        }
        let l = t[2..].to_string();
        match out.last_mut() {
            Some(last) if last.1 == i && last.2 == l => last.1 = i + 1,
            _ => out.push((i, i + 1, l)),
        }
    }
    out
}

/// `num/den` as a percentage in hundredths, ties to even.
pub fn round_hundredths(num: u64, den: u64) -> u32 {
    if den == 0 {
        return 0;
    }
    let x = Ratio::new(num as i128 * 10_000, den as i128);
    let floor = x.floor();
    let frac = x - floor;
    let half = Ratio::new(1, 2);
    let mut v = *floor.numer();
    if frac > half || (frac == half && v % 2 == 1) {
        v += 1;
    }
    v as u32
}

/// Precision, recall and F1 in hundredths by exhaustive comparison.
pub fn brute_force_prf(gold: &[Vec<RawSpan>], pred: &[Vec<RawSpan>]) -> (u32, u32, u32) {
    let mut tp = 0u64;
    let mut g = 0u64;
    let mut p = 0u64;
    for (gs, ps) in gold.iter().zip(pred) {
        g += gs.len() as u64;
        p += ps.len() as u64;
        for a in gs {
            if ps.iter().any(|b| a == b) {
                tp += 1;
            }
        }
    }
    let prec = if p == 0 { Ratio::new(0, 1) } else { Ratio::new(tp as i128, p as i128) };
    let rec = if g == 0 { Ratio::new(0, 1) } else { Ratio::new(tp as i128, g as i128) };
    let f = if prec + rec == Ratio::new(0, 1) {
        Ratio::new(0, 1)
    } else {
        Ratio::new(2, 1) * prec * rec / (prec + rec)
    };
    let h = |r: Ratio<i128>| round_hundredths(*r.numer() as u64, *r.denom() as u64);
    (h(prec), h(rec), h(f))
}

/// A document whose tokens are `t0 t1 ...`.
pub fn doc(id: &str, level1: Vec<String>, level2: Option<Vec<String>>) -> Document {
    let tokens = (0..level1.len()).map(|i| format!("t{i}")).collect();
    let d = Document::new(id, tokens).unwrap().with_level1(level1).unwrap();
    match level2 {
        Some(l2) => d.with_level2(l2).unwrap(),
        None => d,
    }
}

pub fn manifest(docs: Vec<Document>) -> SplitManifest {
    SplitManifest::new(SplitName::Test, docs)
}

/// Subclasses per class in ontology order.
pub fn children(parent: &str) -> Vec<Level2Label> {
    Level2Label::ALL
        .into_iter()
        .filter(|s| s.parent().as_str() == parent)
        .collect()
}

/// Random gold document with both layers; every subclass is drawn from the
/// routing set of its class.
pub fn random_gold(rng: &mut ChaCha8Rng, id: &str, len: usize) -> Document {
    let spans = random_spans(rng, len, &LEVEL1);
    let sub: Vec<RawSpan> = spans
        .iter()
        .map(|(s, e, l)| {
            let routing = l.parse::<billner::Level1Label>().unwrap().routing_set();
            let pick = routing.labels().choose(rng).unwrap();
            (*s, *e, pick.prompt_name().to_string())
        })
        .collect();
    doc(id, bio_tags(&spans, len), Some(bio_tags(&sub, len)))
}

/// Answers each request with the gold subclass of the same span, looked up
/// by document id and span offsets; refuses when there is none.
pub struct GoldBackend {
    pub gold: BTreeMap<(String, usize, usize), String>,
}

impl GoldBackend {
    pub fn new(gold_docs: &[Document]) -> Self {
        let mut gold = BTreeMap::new();
        for d in gold_docs {
            let l1 = d.level1().unwrap();
            let l2 = d.level2().unwrap();
            let c1 = naive_chunks(l1);
            let c2 = naive_chunks(l2);
            for ((s, e, _), (_, _, sub)) in c1.iter().zip(&c2) {
                gold.insert((d.id().to_string(), *s, *e), sub.clone());
            }
        }
        GoldBackend { gold }
    }
}

impl ChatBackend for GoldBackend {
    fn complete(&self, req: &SublabelRequest, _body: &ChatRequest) -> Result<String, String> {
        let m = req.mention();
        let tag = self
            .gold
            .get(&(req.doc_id().to_string(), m.start, m.end))
            .cloned()
            .unwrap_or_else(|| "none of these".to_string());
        Ok(format!("[[ ## reasoning ## ]]\nlookup\n\n[[ ## tag ## ]]\n{tag}\n\n[[ ## completed ## ]]"))
    }
}

pub struct RefuseBackend;

impl ChatBackend for RefuseBackend {
    fn complete(&self, _req: &SublabelRequest, _body: &ChatRequest) -> Result<String, String> {
        Ok("I cannot choose one of these.".to_string())
    }
}

/// Level-one predictions derived from gold by random edits: dropped,
/// relabelled, shifted and spurious spans, plus raw tag noise.
pub fn perturb_level1(rng: &mut ChaCha8Rng, gold: &Document) -> Document {
    let len = gold.len();
    let mut spans: Vec<RawSpan> = Vec::new();
    for (s, e, l) in naive_chunks(gold.level1().unwrap()) {
        match rng.gen_range(0..6) {
            0 => {}
            1 => spans.push((s, e, LEVEL1.choose(rng).unwrap().to_string())),
            2 if e - s > 1 => spans.push((s + 1, e, l)),
            _ => spans.push((s, e, l)),
        }
    }
    let mut tags = bio_tags(&spans, len);
    for t in tags.iter_mut() {
        if rng.gen_bool(0.05) {
            *t = format!("{}-{}", if rng.gen_bool(0.5) { "B" } else { "I" }, LEVEL1.choose(rng).unwrap());
        }
    }
    Document::new(gold.id(), gold.tokens().to_vec()).unwrap().with_level1(tags).unwrap()
}
