mod common;

use std::collections::BTreeMap;
use std::io::Cursor;

use billner::corpus::{read_split_from, Document, SplitName, Tokenizer};
use billner::router::{build_prompt, ClassifyOptions, EndpointConfig, Outcome, Sublabeler, SublabelRequest};
use billner::scoring::{confusion, count_spans, extract_spans, score, Level, ScoreOptions};
use billner::seqlabel::{
    check_layers, decode_spans, encode_spans, repair, validate, Layer, RepairPolicy, Scheme, Span, UNRESOLVED,
};
use billner::{Level2Label, Mention, SplitManifest, TagSequence};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use common::*;

fn to_spans(raw: &[RawSpan]) -> Vec<Span> {
    raw.iter().map(|(s, e, l)| Span::new(*s, *e, l.clone())).collect()
}

fn tag_strategy(labels: Vec<&'static str>) -> impl Strategy<Value = String> {
    let labels = prop::sample::select(labels);
    prop_oneof![
        4 => Just("O".to_string()),
        3 => labels.clone().prop_map(|l| format!("B-{l}")),
        3 => labels.prop_map(|l| format!("I-{l}")),
        1 => prop::sample::select(vec!["B-", "I", "X-Act", "b-Person", "I-Nope", "B-Treaty"]).prop_map(str::to_string),
    ]
}

fn level2_labels() -> Vec<&'static str> {
    let mut v: Vec<&'static str> = Level2Label::ALL.iter().map(|l| l.prompt_name()).collect();
    v.push(UNRESOLVED);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn tokenizer_is_idempotent_on_printable_text(s in "[ -~\n\t]{0,80}") {
        let tok = Tokenizer::new();
        let once = tok.tokenize(&s);
        prop_assert_eq!(tok.tokenize(&once.join(" ")), once);
    }

    #[test]
    fn tokenizer_is_idempotent_on_unicode(s in "\\PC{0,60}") {
        let tok = Tokenizer::new();
        let once = tok.tokenize(&s);
        prop_assert!(once.iter().all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace)));
        prop_assert_eq!(tok.tokenize(&once.join(" ")), once);
    }

    #[test]
    fn repair_output_validates_and_is_stable(
        tags in prop::collection::vec(tag_strategy(LEVEL1.to_vec()), 0..40),
        io in any::<bool>(),
        discard in any::<bool>(),
    ) {
        let scheme = if io { Scheme::Io } else { Scheme::Bio };
        let policy = if discard { RepairPolicy::Discard } else { RepairPolicy::Conll };
        let seq = TagSequence::new(scheme, tags.clone());
        let fixed = repair(&seq, policy, Layer::Level1);
        prop_assert!(validate(&fixed, Layer::Level1).is_empty(), "{:?}", fixed.tags);
        prop_assert_eq!(&repair(&fixed, policy, Layer::Level1), &fixed);
        prop_assert_eq!(fixed.len(), tags.len());
        if validate(&seq, Layer::Level1).is_empty() {
            prop_assert_eq!(fixed, seq);
        }
    }

    #[test]
    fn conll_repair_keeps_conlleval_entities(tags in prop::collection::vec(tag_strategy(LEVEL1.to_vec()), 0..40)) {
        let seq = TagSequence::new(Scheme::Bio, tags.clone());
        let fixed = repair(&seq, RepairPolicy::Conll, Layer::Level1);
        let clean: Vec<String> = tags
            .iter()
            .map(|t| if Layer::Level1.canonical(t.get(2..).unwrap_or("")).is_some() && (t.starts_with("B-") || t.starts_with("I-")) { t.clone() } else { "O".to_string() })
            .collect();
        let got: Vec<RawSpan> = decode_spans(&fixed, Layer::Level1).unwrap().into_iter().map(|s| (s.start, s.end, s.label)).collect();
        prop_assert_eq!(got, naive_chunks(&clean));
    }

    #[test]
    fn level2_repair_validates(tags in prop::collection::vec(tag_strategy(level2_labels()), 0..40), discard in any::<bool>()) {
        let policy = if discard { RepairPolicy::Discard } else { RepairPolicy::Conll };
        let fixed = repair(&TagSequence::new(Scheme::Bio, tags), policy, Layer::Level2);
        prop_assert!(validate(&fixed, Layer::Level2).is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn decode_inverts_encode(seed in any::<u64>(), len in 0usize..60) {
        let mut rng = rng(seed);
        let raw = random_spans(&mut rng, len, &LEVEL1);
        let spans = to_spans(&raw);
        let bio = encode_spans(&spans, len, Scheme::Bio).unwrap();
        prop_assert_eq!(&bio.tags, &bio_tags(&raw, len));
        prop_assert_eq!(decode_spans(&bio, Layer::Level1).unwrap(), spans.clone());
        let scanned: Vec<Span> = to_spans(&naive_chunks(&bio.tags));
        prop_assert_eq!(scanned, spans);
    }

    #[test]
    fn io_view_merges_adjacent_same_type_spans(seed in any::<u64>(), len in 0usize..60) {
        let mut rng = rng(seed);
        let raw = random_spans(&mut rng, len, &LEVEL1[..2]);
        let bio = encode_spans(&to_spans(&raw), len, Scheme::Bio).unwrap();
        let io = bio.to_io();
        let got = decode_spans(&io, Layer::Level1).unwrap();
        prop_assert_eq!(&got, &to_spans(&naive_io_chunks(&io.tags)));
        let mut merged: Vec<RawSpan> = Vec::new();
        for s in &raw {
            match merged.last_mut() {
                Some(last) if last.1 == s.0 && last.2 == s.2 => last.1 = s.1,
                _ => merged.push(s.clone()),
            }
        }
        prop_assert_eq!(&got, &to_spans(&merged));
        let lossless = merged.len() == raw.len();
        prop_assert_eq!(lossless, got == to_spans(&raw));
    }

    #[test]
    fn split_files_round_trip(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let layers = rng.gen_range(0..3);
        let pool = ["the", "Senate", "(", "19", "U.S.C.", "''", "``", "--", "é", "#", "#x", "O", "B-Act"];
        let n = rng.gen_range(0..5);
        let docs: Vec<Document> = (0..n)
            .map(|i| {
                let len = rng.gen_range(1..30);
                let tokens: Vec<String> = (0..len).map(|_| pool.choose(&mut rng).unwrap().to_string()).collect();
                let mut d = Document::new(format!("doc {i}"), tokens).unwrap();
                if layers >= 1 {
                    d.set_level1(Some(random_tags(&mut rng, len, &LEVEL1))).unwrap();
                }
                if layers == 2 {
                    d.set_level2(Some(random_tags(&mut rng, len, &["Bill", UNRESOLVED]))).unwrap();
                }
                d
            })
            .collect();
        let m = SplitManifest::new(SplitName::Dev, docs);
        let text = m.to_file_string().unwrap();
        let back = read_split_from(Cursor::new(text.as_bytes()), SplitName::Dev).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.to_file_string().unwrap(), text);
    }

    #[test]
    fn adding_a_correct_prediction_never_hurts(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let len = rng.gen_range(1..50);
        let gold = random_gold(&mut rng, "d", len);
        let pred = perturb_level1(&mut rng, &gold);
        let opts = ScoreOptions::default();
        let g = extract_spans(&gold, Level::One, &opts).unwrap();
        let p = extract_spans(&pred, Level::One, &opts).unwrap();
        let (base, _) = count_spans(&g, &p);
        let free: Vec<&Span> = g
            .iter()
            .filter(|s| !p.iter().any(|q| q.start < s.end && s.start < q.end))
            .collect();
        if let Some(add) = free.first() {
            let mut more = p.clone();
            more.push((*add).clone());
            let (c, _) = count_spans(&g, &more);
            prop_assert_eq!(c.true_positives, base.true_positives + 1);
            prop_assert!(c.recall() >= base.recall());
            prop_assert!(c.precision() >= base.precision());
            prop_assert!(c.f1() >= base.f1());
        }
        if let Some(i) = p.iter().position(|s| !g.contains(s)) {
            let mut fewer = p.clone();
            fewer.remove(i);
            let (c, _) = count_spans(&g, &fewer);
            prop_assert!(c.precision() >= base.precision());
            prop_assert_eq!(c.recall(), base.recall());
        }
    }

    #[test]
    fn micro_average_is_sum_of_parts(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..6);
        let gold: Vec<Document> = (0..n).map(|i| { let len = rng.gen_range(1..40); random_gold(&mut rng, &format!("d{i}"), len) }).collect();
        let pred: Vec<Document> = gold.iter().map(|g| perturb_level1(&mut rng, g)).collect();
        let all = score(&gold, &pred, Level::One).unwrap();
        let mut tp = 0;
        let mut fp = 0;
        let mut fn_ = 0;
        for (g, p) in gold.iter().zip(&pred) {
            let r = score(std::slice::from_ref(g), std::slice::from_ref(p), Level::One).unwrap();
            tp += r.counts.true_positives;
            fp += r.counts.false_positives;
            fn_ += r.counts.false_negatives;
        }
        prop_assert_eq!((all.counts.true_positives, all.counts.false_positives, all.counts.false_negatives), (tp, fp, fn_));
        let per_type_tp: u64 = all.per_type.values().map(|c| c.true_positives).sum();
        let per_type_gold: u64 = all.per_type.values().map(|c| c.gold()).sum();
        let per_type_pred: u64 = all.per_type.values().map(|c| c.predicted()).sum();
        prop_assert_eq!((per_type_tp, per_type_gold, per_type_pred), (all.counts.true_positives, all.counts.gold(), all.counts.predicted()));
        // reversed document order gives the same report
        let mut rg = gold.clone();
        rg.reverse();
        prop_assert_eq!(score(&rg, &pred, Level::One).unwrap(), all);
    }

    #[test]
    fn confusion_matches_naive_counts(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..4);
        let gold: Vec<Document> = (0..n).map(|i| { let len = rng.gen_range(1..30); random_gold(&mut rng, &format!("d{i}"), len) }).collect();
        let pred: Vec<Document> = gold
            .iter()
            .map(|g| {
                let p = perturb_level1(&mut rng, g);
                let l2 = random_tags(&mut rng, g.len(), &["Bill", "Member", UNRESOLVED]);
                p.with_level2(l2).unwrap()
            })
            .collect();
        for level in [Level::One, Level::Two] {
            let m = confusion(&gold, &pred, level).unwrap();
            let kind = |t: &str| if t == "O" { "O".to_string() } else { t[2..].to_string() };
            for (i, a) in m.labels.iter().enumerate() {
                for (j, b) in m.labels.iter().enumerate() {
                    let mut count = 0;
                    for (g, p) in gold.iter().zip(&pred) {
                        let (gt, pt) = match level {
                            Level::One => (g.level1().unwrap(), p.level1().unwrap()),
                            Level::Two => (g.level2().unwrap(), p.level2().unwrap()),
                        };
                        for k in 0..gt.len() {
                            if &kind(&gt[k]) == a && &kind(&pt[k]) == b {
                                count += 1;
                            }
                        }
                    }
                    prop_assert_eq!(m.cells[i][j], count, "{} / {}", a, b);
                }
            }
            let tokens: u64 = gold.iter().map(|d| d.len() as u64).sum();
            prop_assert_eq!(m.total(), tokens);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn router_keeps_level1_and_cascades(seed in any::<u64>(), jobs in 1usize..6) {
        let mut rng = rng(seed);
        let n = rng.gen_range(1..4);
        let gold: Vec<Document> = (0..n).map(|i| { let len = rng.gen_range(1..50); random_gold(&mut rng, &format!("d{i}"), len) }).collect();
        let pred: Vec<Document> = gold.iter().map(|g| perturb_level1(&mut rng, g)).collect();
        let opts = ClassifyOptions { scheme: Scheme::Bio, repair: Some(RepairPolicy::Conll) };
        let backend = GoldBackend::new(&gold);
        let cfg = EndpointConfig { max_parallel: jobs, ..EndpointConfig::default() };
        let (out, results) = Sublabeler::new(cfg, &backend).unwrap().classify_mentions(&pred, opts).unwrap();
        let (seq_out, seq_results) = Sublabeler::new(EndpointConfig { max_parallel: 1, ..EndpointConfig::default() }, &backend)
            .unwrap()
            .classify_mentions(&pred, opts)
            .unwrap();
        prop_assert_eq!(&out, &seq_out);
        prop_assert_eq!(&results, &seq_results);

        for (d, p) in out.iter().zip(&pred) {
            let repaired = repair(&TagSequence::new(Scheme::Bio, p.level1().unwrap().to_vec()), RepairPolicy::Conll, Layer::Level1);
            prop_assert_eq!(d.level1().unwrap(), &repaired.tags[..]);
            let l1 = TagSequence::new(Scheme::Bio, d.level1().unwrap().to_vec());
            let l2 = TagSequence::new(Scheme::Bio, d.level2().unwrap().to_vec());
            prop_assert!(check_layers(&l1, &l2).is_empty());
        }
        for r in &results {
            if let Outcome::ParsedTag(t) = r.outcome {
                prop_assert_eq!(t.parent(), r.request.mention().level1);
                prop_assert!(r.request.routing().contains(t));
            }
        }
        let one = score(&gold, &out, Level::One).unwrap();
        let two = score(&gold, &out, Level::Two).unwrap();
        prop_assert_eq!(one.f1(), two.f1());
    }

    #[test]
    fn prompts_are_pure_and_windows_clamped(seed in any::<u64>(), window in 0usize..60) {
        let mut rng = rng(seed);
        let len = rng.gen_range(1..150);
        let tokens: Vec<String> = (0..len).map(|i| format!("w{i}")).collect();
        let d = Document::new("d", tokens).unwrap();
        let start = rng.gen_range(0..len);
        let end = rng.gen_range(start + 1..=len.min(start + 5));
        let parent = *billner::Level1Label::ALL.choose(&mut rng).unwrap();
        let req = SublabelRequest::from_document(&d, Mention::new(start, end, parent), window).unwrap();
        prop_assert_eq!(build_prompt(&req), build_prompt(&req.clone()));
        let lo = start.saturating_sub(window);
        let hi = (end + window).min(len);
        prop_assert_eq!(req.context(), d.text(lo, hi));
        prop_assert!(req.context().contains(req.mention_text()));
        prop_assert_eq!(req.context().split(' ').count(), hi - lo);
    }
}

#[test]
fn conll_levels_are_independent_of_unrelated_layer() {
    let mut rng = rng(11);
    let gold: Vec<Document> = (0..20).map(|i| random_gold(&mut rng, &format!("d{i}"), 30)).collect();
    let bare: Vec<Document> = gold
        .iter()
        .map(|g| Document::new(g.id(), g.tokens().to_vec()).unwrap().with_level1(g.level1().unwrap().to_vec()).unwrap())
        .collect();
    let a = score(&gold, &gold, Level::One).unwrap();
    let b = score(&gold, &bare, Level::One).unwrap();
    assert_eq!(a, b);
    let counts: BTreeMap<String, u64> = a.per_type.iter().map(|(k, c)| (k.clone(), c.gold())).collect();
    assert_eq!(counts.values().sum::<u64>(), a.counts.gold());
}
