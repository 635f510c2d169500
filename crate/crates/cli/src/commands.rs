use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use billner::corpus::{BillClient, BillClientConfig, SplitName, Tokenizer};
use billner::router::{
    refusal_count, write_results, ClassifyOptions, EndpointConfig, HttpChatClient, Outcome, Sublabeler,
    TranscriptCache,
};
use billner::scoring::{confusion, iaa_table, score_with, stats, IaaRow, Level, ScoreOptions};
use billner::seqlabel::{check_layers, repair, validate, Layer};
use billner::{read_split, write_split, BillId, Document, SplitManifest, TagSequence};
use serde_json::json;

use crate::args::*;

/// A failure that ends the run with status 2.
#[derive(Debug)]
pub struct CliError(String);

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError(msg.into()))
}

pub type CmdResult = Result<i32, CliError>;

fn require_file(path: &Path) -> Result<(), CliError> {
    if !path.is_file() {
        return fail(format!("input file not found: {}", path.display()));
    }
    Ok(())
}

fn load(path: &Path) -> Result<SplitManifest, CliError> {
    require_file(path)?;
    read_split(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, contents).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn tokenizer(abbreviations: Option<&Path>) -> Result<Tokenizer, CliError> {
    match abbreviations {
        Some(p) => {
            require_file(p)?;
            Ok(Tokenizer::new().with_abbreviation_file(p)?)
        }
        None => Ok(Tokenizer::new()),
    }
}

pub fn ingest(args: &IngestArgs, jobs: u32) -> CmdResult {
    let mut ids: Vec<String> = args.bills.clone();
    if let Some(f) = &args.bills_file {
        require_file(f)?;
        let text = fs::read_to_string(f)?;
        ids.extend(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string),
        );
    }
    if ids.is_empty() {
        return fail("no bills given (use --bill or --bills-file)");
    }
    let ids: Vec<BillId> = ids.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    let Some(key) = args.api_key.clone().filter(|k| !k.trim().is_empty()) else {
        return fail("missing API key (set CONGRESS_API_KEY or pass --api-key)");
    };
    let tok = tokenizer(args.abbreviations.as_deref())?;
    let mut cfg = BillClientConfig::new(key);
    cfg.base_url = args.api_base.clone();
    cfg.max_parallel = jobs as usize;
    let client = BillClient::new(cfg)?;

    let mut docs = Vec::with_capacity(ids.len());
    let mut errors = Vec::new();
    for (id, res) in ids.iter().zip(client.fetch_many(&ids)) {
        match res {
            Ok(text) => {
                if let Some(dir) = &args.raw_dir {
                    write_file(&dir.join(format!("{id}.txt")), &text)?;
                }
                docs.push(Document::from_text(id.to_string(), &text, &tok)?);
            }
            Err(e) => errors.push(format!("{id}: {e}")),
        }
    }
    if !errors.is_empty() {
        for e in &errors {
            eprintln!("{e}");
        }
        return fail(format!("{} of {} bills could not be fetched", errors.len(), ids.len()));
    }
    let manifest = SplitManifest::new(SplitName::from_path(&args.out), docs);
    write_split(&manifest, &args.out)?;
    println!(
        "wrote {} bills, {} tokens to {}",
        manifest.documents.len(),
        manifest.token_count(),
        args.out.display()
    );
    Ok(0)
}

pub fn tokenize(args: &TokenizeArgs) -> CmdResult {
    let tok = tokenizer(args.abbreviations.as_deref())?;
    let mut docs = Vec::new();
    if args.inputs.is_empty() {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        docs.push(Document::from_text("stdin", &text, &tok)?);
    }
    for p in &args.inputs {
        require_file(p)?;
        let text = fs::read_to_string(p)?;
        let id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        docs.push(Document::from_text(id, &text, &tok)?);
    }
    let name = args.out.as_deref().map_or(SplitName::Other("stdin".into()), SplitName::from_path);
    let manifest = SplitManifest::new(name, docs);
    match &args.out {
        Some(out) => {
            write_split(&manifest, out)?;
            println!("wrote {} documents, {} tokens to {}", manifest.documents.len(), manifest.token_count(), out.display());
        }
        None => {
            let text = manifest.to_file_string()?;
            io::stdout().write_all(with_newline(text).as_bytes())?;
        }
    }
    Ok(0)
}

pub fn validate_cmd(args: &ValidateArgs) -> CmdResult {
    if args.out.is_some() && args.inputs.len() != 1 {
        return fail("--out needs exactly one input file");
    }
    let mut total = 0usize;
    let mut report = Vec::new();
    for path in &args.inputs {
        let mut manifest = load(path)?;
        let mut count = 0usize;
        for doc in &mut manifest.documents {
            let mut seqs: Vec<Option<TagSequence>> = vec![None, None];
            for (slot, (layer, tags)) in [(Layer::Level1, doc.level1()), (Layer::Level2, doc.level2())]
                .into_iter()
                .enumerate()
            {
                let Some(tags) = tags else { continue };
                let seq = TagSequence::new(args.scheme, tags.to_vec());
                let name = if layer == Layer::Level1 { "level1" } else { "level2" };
                for v in validate(&seq, layer) {
                    println!("{}\t{}\t{name}\t{}\t{}\t{}", path.display(), doc.id(), v.index, v.kind, v.tag);
                    report.push(json!({"file": path.display().to_string(), "doc_id": doc.id(), "layer": name,
                        "index": v.index, "kind": v.kind, "tag": v.tag}));
                    count += 1;
                }
                seqs[slot] = Some(seq);
            }
            if let [Some(l1), Some(l2)] = &seqs[..] {
                for v in check_layers(l1, l2) {
                    println!("{}\t{}\tlayers\t{}\t{:?}", path.display(), doc.id(), v.index, v.kind);
                    report.push(json!({"file": path.display().to_string(), "doc_id": doc.id(), "layer": "layers",
                        "index": v.index, "kind": v.kind}));
                    count += 1;
                }
            }
            if let Some(policy) = args.repair.and_then(RepairArg::policy) {
                if let Some(l1) = &seqs[0] {
                    doc.set_level1(Some(repair(l1, policy, Layer::Level1).tags))?;
                }
                if let Some(l2) = &seqs[1] {
                    doc.set_level2(Some(repair(l2, policy, Layer::Level2).tags))?;
                }
            }
        }
        println!("{}: {} documents, {} violations", path.display(), manifest.documents.len(), count);
        total += count;
        if let Some(out) = &args.out {
            write_split(&manifest, out)?;
        }
    }
    if let Some(p) = &args.report {
        write_file(p, &with_newline(serde_json::to_string_pretty(&report)?))?;
    }
    Ok(if args.strict && total > 0 { 1 } else { 0 })
}

pub fn stats_cmd(args: &StatsArgs) -> CmdResult {
    let mut all = Vec::new();
    for (i, path) in args.splits.iter().enumerate() {
        let s = stats(&load(path)?);
        if i > 0 {
            println!();
        }
        print!("{}", s.to_text());
        all.push(s);
    }
    if let Some(out) = &args.out {
        write_file(out, &with_newline(serde_json::to_string_pretty(&all)?))?;
    }
    Ok(0)
}

fn score_options(read: &ReadArgs, io: bool) -> ScoreOptions {
    ScoreOptions {
        scheme: read.scheme,
        repair: read.repair.policy(),
        collapse_to_io: io,
    }
}

pub fn score(args: &ScoreArgs) -> CmdResult {
    let gold = load(&args.gold)?;
    let pred = load(&args.pred)?;
    let report = score_with(&gold.documents, &pred.documents, args.level, &score_options(&args.read, args.io))?;
    print!("{}", report.to_text());
    if let Some(out) = &args.out {
        write_file(out, &with_newline(report.to_json()))?;
    }
    Ok(0)
}

/// Documents annotated by both sides, in the order of `a`.
fn shared(a: &[Document], b: &[Document]) -> (Vec<Document>, Vec<Document>) {
    let in_b: HashSet<&str> = b.iter().map(Document::id).collect();
    let in_a: HashSet<&str> = a.iter().map(Document::id).collect();
    let aa: Vec<Document> = a.iter().filter(|d| in_b.contains(d.id())).cloned().collect();
    let bb: Vec<Document> = b.iter().filter(|d| in_a.contains(d.id())).cloned().collect();
    (aa, bb)
}

pub fn iaa(args: &IaaArgs) -> CmdResult {
    if args.annotators.len() < 2 {
        return fail("need at least two --annotator NAME=FILE entries");
    }
    let Some(policy) = args.repair.policy() else {
        return fail("agreement needs a repair policy (conll or discard)");
    };
    let mut sides = Vec::new();
    for a in &args.annotators {
        let Some((name, file)) = a.split_once('=') else {
            return fail(format!("expected NAME=FILE, got {a:?}"));
        };
        sides.push((name.to_string(), load(Path::new(file))?.documents));
    }
    let mut rows = Vec::new();
    let mut shared_docs = Vec::new();
    for i in 0..sides.len() {
        for j in i + 1..sides.len() {
            let (a, b) = shared(&sides[i].1, &sides[j].1);
            if a.is_empty() {
                return fail(format!("{} and {} share no documents", sides[i].0, sides[j].0));
            }
            shared_docs.push(a.len());
            rows.push(IaaRow::compute(format!("{} / {}", sides[i].0, sides[j].0), &a, &b, policy)?);
        }
    }
    print!("{}", iaa_table(&rows));
    if let Some(out) = &args.out {
        let v: Vec<_> = rows
            .iter()
            .zip(&shared_docs)
            .map(|(r, n)| json!({"pair": r.pair, "documents": n, "io_f1": r.io_f1, "level1_f1": r.level1_f1}))
            .collect();
        write_file(out, &with_newline(serde_json::to_string_pretty(&v)?))?;
    }
    Ok(0)
}

pub fn confusion_cmd(args: &ConfusionArgs) -> CmdResult {
    let gold = load(&args.gold)?;
    let pred = load(&args.pred)?;
    let m = confusion(&gold.documents, &pred.documents, args.level)?;
    let rendered = match args.format {
        MatrixFormat::Csv => m.to_csv(),
        MatrixFormat::Text => m.to_text(),
        MatrixFormat::Json => m.to_json(),
    };
    match &args.out {
        Some(out) => {
            write_file(out, &with_newline(rendered))?;
            println!(
                "{} tokens, {} off the diagonal, written to {}",
                m.total(),
                m.off_diagonal(),
                out.display()
            );
        }
        None => print!("{}", with_newline(rendered)),
    }
    Ok(0)
}

fn endpoint_config(args: &EndpointArgs, jobs: u32) -> EndpointConfig {
    EndpointConfig {
        base_url: args.base_url.clone().unwrap_or_default(),
        model: args.model.clone(),
        api_key: args.api_key.clone().unwrap_or_default(),
        temperature: args.temperature,
        max_tokens: args.max_tokens,
        timeout_secs: args.timeout,
        max_parallel: jobs as usize,
        max_retries: args.retries,
    }
}

fn run_sublabel(
    pred: &Path,
    out: &Path,
    results_path: Option<&Path>,
    endpoint: &EndpointArgs,
    read: &ReadArgs,
    jobs: u32,
) -> CmdResult {
    let input = load(pred)?;
    let cfg = endpoint_config(endpoint, jobs);
    let cache = match &endpoint.cache {
        Some(p) => Some(TranscriptCache::open(p).map_err(|e| CliError(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let opts = ClassifyOptions {
        scheme: read.scheme,
        repair: read.repair.policy(),
    };
    let client;
    let labeler = if endpoint.offline {
        Sublabeler::offline(cfg, cache.as_ref().expect("clap requires --cache with --offline"))?
    } else {
        client = HttpChatClient::new(cfg.clone())?;
        let l = Sublabeler::new(cfg, &client)?;
        match &cache {
            Some(c) => l.with_cache(c),
            None => l,
        }
    };
    let (docs, results) = labeler.classify_mentions(&input.documents, opts)?;
    write_split(&SplitManifest::new(input.name.clone(), docs), out)?;
    if let Some(p) = results_path {
        let mut buf = Vec::new();
        write_results(&mut buf, &results)?;
        write_file(p, &String::from_utf8(buf).expect("JSON is UTF-8"))?;
    }
    let transport = results
        .iter()
        .filter(|r| matches!(r.outcome, Outcome::TransportError(_)))
        .count();
    let cached = results.iter().filter(|r| r.cached).count();
    println!(
        "{} mentions: {} refusals, {} transport errors, {} from cache; wrote {}",
        results.len(),
        refusal_count(&results),
        transport,
        cached,
        out.display()
    );
    Ok(0)
}

pub fn sublabel(args: &SublabelArgs, jobs: u32) -> CmdResult {
    run_sublabel(&args.pred, &args.out, args.results.as_deref(), &args.endpoint, &args.read, jobs)
}

/// File names written by `pipeline` inside its output directory.
pub struct PipelinePaths {
    pub level2: PathBuf,
    pub results: PathBuf,
    pub score_one: PathBuf,
    pub score_two: PathBuf,
    pub confusion_one: PathBuf,
    pub confusion_two: PathBuf,
}

impl PipelinePaths {
    pub fn new(dir: &Path) -> Self {
        PipelinePaths {
            level2: dir.join("pred_level2.conll"),
            results: dir.join("sublabel_results.jsonl"),
            score_one: dir.join("score_level1.json"),
            score_two: dir.join("score_level2.json"),
            confusion_one: dir.join("confusion_level1.csv"),
            confusion_two: dir.join("confusion_level2.csv"),
        }
    }
}

pub fn pipeline(args: &PipelineArgs, jobs: u32) -> CmdResult {
    let paths = PipelinePaths::new(&args.out_dir);
    require_file(&args.gold)?;
    println!("== validate");
    validate_cmd(&ValidateArgs {
        inputs: vec![args.gold.clone(), args.pred.clone()],
        scheme: args.read.scheme,
        strict: false,
        out: None,
        repair: None,
        report: None,
    })?;
    println!("== sublabel");
    run_sublabel(&args.pred, &paths.level2, Some(&paths.results), &args.endpoint, &args.read, jobs)?;
    for (level, report, matrix) in [
        (Level::One, &paths.score_one, &paths.confusion_one),
        (Level::Two, &paths.score_two, &paths.confusion_two),
    ] {
        println!("== score level {level}");
        score(&ScoreArgs {
            gold: args.gold.clone(),
            pred: paths.level2.clone(),
            level,
            io: false,
            read: args.read.clone(),
            out: Some(report.clone()),
        })?;
        confusion_cmd(&ConfusionArgs {
            gold: args.gold.clone(),
            pred: paths.level2.clone(),
            level,
            format: MatrixFormat::Csv,
            out: Some(matrix.clone()),
        })?;
    }
    Ok(0)
}

pub fn ontology(args: &OntologyArgs) -> CmdResult {
    let text = with_newline(billner::ontology::ontology_json_string());
    match &args.out {
        Some(out) => write_file(out, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}
