//! Level-two classification of level-one mentions by a chat model.
//!
//! Each mention becomes one [`SublabelRequest`]: the mention text, up to
//! [`CONTEXT_WINDOW`] tokens of context on either side and the routing set of
//! its level-one class. Responses are parsed into an [`Outcome`] and written
//! back as a level-two layer over the unchanged level-one spans. Mentions
//! without a usable answer get the [`UNRESOLVED`] sublabel.

mod cache;
mod client;
mod parse;
mod prompt;

use std::io::{self, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use serde::Serialize;

pub use cache::{request_hash, TranscriptCache, TranscriptRecord};
pub use client::{ChatMessage, ChatRequest, EndpointConfig, HttpChatClient, DEFAULT_MAX_TOKENS, DEFAULT_MODEL};
pub use parse::{parse_response, Outcome};
pub use prompt::{
    build_prompt, format_tag_list, ChatMessages, COMPLETED_MARKER, CONTEXT_MARKER, MENTION_MARKER,
    POSSIBLE_TAGS_MARKER, REASONING_MARKER, SYSTEM_PROMPT, TAG_MARKER,
};

use crate::corpus::Document;
use crate::error::RouterError;
use crate::ontology::{routing_set, RoutingSet};
use crate::seqlabel::{decode_spans, repair, validate, Layer, Mention, RepairPolicy, Scheme, TagSequence, UNRESOLVED};

/// Tokens of context taken on each side of a mention.
pub const CONTEXT_WINDOW: usize = 50;

/// One mention to classify.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublabelRequest {
    doc_id: String,
    mention: Mention,
    mention_text: String,
    context: String,
    routing: RoutingSet,
}

impl SublabelRequest {
    /// Builds a request from explicit strings. `mention_text` must occur in `context`.
    pub fn new(
        doc_id: impl Into<String>,
        mention: Mention,
        mention_text: impl Into<String>,
        context: impl Into<String>,
    ) -> Result<Self, RouterError> {
        let doc_id = doc_id.into();
        let mention_text = mention_text.into();
        let context = context.into();
        if mention_text.is_empty() || !context.contains(&mention_text) {
            return Err(RouterError::InvalidInput {
                doc_id,
                reason: format!("mention {mention_text:?} is not part of its context"),
            });
        }
        Ok(SublabelRequest {
            doc_id,
            routing: routing_set(mention.level1),
            mention,
            mention_text,
            context,
        })
    }

    /// Builds a request with `window` tokens of context on each side,
    /// truncated at the document edges.
    pub fn from_document(doc: &Document, mention: Mention, window: usize) -> Result<Self, RouterError> {
        if mention.is_empty() || mention.end > doc.len() {
            return Err(RouterError::InvalidInput {
                doc_id: doc.id().to_string(),
                reason: format!("mention [{}, {}) outside {} tokens", mention.start, mention.end, doc.len()),
            });
        }
        let lo = mention.start.saturating_sub(window);
        let hi = (mention.end + window).min(doc.len());
        SublabelRequest::new(doc.id(), mention, doc.text(mention.start, mention.end), doc.text(lo, hi))
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn mention(&self) -> Mention {
        self.mention
    }

    pub fn mention_text(&self) -> &str {
        &self.mention_text
    }

    pub fn context(&self) -> &str {
        &self.context
    }

    pub fn routing(&self) -> &RoutingSet {
        &self.routing
    }
}

/// Sends chat requests. Implementations must be safe to call from several threads.
pub trait ChatBackend: Sync {
    /// Returns the assistant message content, or a transport failure description.
    fn complete(&self, req: &SublabelRequest, body: &ChatRequest) -> Result<String, String>;
}

/// The outcome of one exchange.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SublabelResult {
    pub request: SublabelRequest,
    pub raw_response: String,
    pub outcome: Outcome,
    /// Wall time of the endpoint call; 0 for cache hits.
    pub latency_ms: u64,
    pub cached: bool,
}

#[derive(Serialize)]
struct ResultRecord<'a> {
    doc_id: &'a str,
    start: usize,
    end: usize,
    level1: &'a str,
    mention: &'a str,
    context: &'a str,
    possible_tags: Vec<&'static str>,
    raw_response: &'a str,
    outcome: &'a Outcome,
    latency_ms: u64,
    cached: bool,
}

impl SublabelResult {
    pub fn to_json_line(&self) -> String {
        let r = &self.request;
        serde_json::to_string(&ResultRecord {
            doc_id: &r.doc_id,
            start: r.mention.start,
            end: r.mention.end,
            level1: r.mention.level1.as_str(),
            mention: &r.mention_text,
            context: &r.context,
            possible_tags: r.routing.allowed_prompt_tags(),
            raw_response: &self.raw_response,
            outcome: &self.outcome,
            latency_ms: self.latency_ms,
            cached: self.cached,
        })
        .expect("result serializes")
    }
}

/// Writes one JSON object per result.
pub fn write_results(mut w: impl Write, results: &[SublabelResult]) -> io::Result<()> {
    for r in results {
        writeln!(w, "{}", r.to_json_line())?;
    }
    Ok(())
}

pub fn refusal_count(results: &[SublabelResult]) -> usize {
    results.iter().filter(|r| r.outcome.is_refusal()).count()
}

/// How level-one input layers are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassifyOptions {
    pub scheme: Scheme,
    /// Repair applied to invalid level-one layers; `None` rejects them.
    pub repair: Option<RepairPolicy>,
}

/// Drives level-two classification through an optional backend and cache.
///
/// Cached responses are used first. Without a backend, cache misses become
/// transport errors, so an offline run never touches the network.
pub struct Sublabeler<'a> {
    config: EndpointConfig,
    backend: Option<&'a dyn ChatBackend>,
    cache: Option<&'a TranscriptCache>,
}

impl<'a> Sublabeler<'a> {
    pub fn new(config: EndpointConfig, backend: &'a dyn ChatBackend) -> Result<Self, RouterError> {
        config.validate_sampling()?;
        Ok(Sublabeler {
            config,
            backend: Some(backend),
            cache: None,
        })
    }

    /// Answers only from the cache.
    pub fn offline(config: EndpointConfig, cache: &'a TranscriptCache) -> Result<Self, RouterError> {
        config.validate_sampling()?;
        Ok(Sublabeler {
            config,
            backend: None,
            cache: Some(cache),
        })
    }

    pub fn with_cache(mut self, cache: &'a TranscriptCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn config(&self) -> &EndpointConfig {
        &self.config
    }

    /// Runs one exchange.
    pub fn classify_one(&self, req: &SublabelRequest) -> SublabelResult {
        let msgs = build_prompt(req);
        let body = ChatRequest::new(&self.config, &msgs);
        let hash = request_hash(&body);
        let wrap = |raw: String, latency_ms: u64, cached: bool| SublabelResult {
            outcome: parse_response(&raw, req.routing()),
            request: req.clone(),
            raw_response: raw,
            latency_ms,
            cached,
        };
        if let Some(raw) = self.cache.and_then(|c| c.get(&hash)) {
            return wrap(raw, 0, true);
        }
        let Some(backend) = self.backend else {
            return SublabelResult {
                request: req.clone(),
                raw_response: String::new(),
                outcome: Outcome::TransportError(format!("offline and no cached response for {hash}")),
                latency_ms: 0,
                cached: false,
            };
        };
        let started = Instant::now();
        let answer = backend.complete(req, &body);
        let latency_ms = started.elapsed().as_millis() as u64;
        match answer {
            Ok(raw) => {
                if let Some(cache) = self.cache {
                    if let Err(e) = cache.insert(&body, &raw) {
                        log::warn!("could not record transcript: {e}");
                    }
                }
                wrap(raw, latency_ms, false)
            }
            Err(detail) => SublabelResult {
                request: req.clone(),
                raw_response: String::new(),
                outcome: Outcome::TransportError(detail),
                latency_ms,
                cached: false,
            },
        }
    }

    /// Runs `requests` on up to `max_parallel` threads; results keep input order.
    pub fn classify_requests(&self, requests: &[SublabelRequest]) -> Vec<SublabelResult> {
        let workers = self.config.max_parallel.clamp(1, requests.len().max(1));
        if workers == 1 {
            return requests.iter().map(|r| self.classify_one(r)).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Vec<Mutex<Option<SublabelResult>>> = requests.iter().map(|_| Mutex::new(None)).collect();
        thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(req) = requests.get(i) else { break };
                    let res = self.classify_one(req);
                    *slots[i].lock().expect("slot lock") = Some(res);
                });
            }
        });
        slots
            .into_iter()
            .map(|m| m.into_inner().expect("slot lock").expect("every slot filled"))
            .collect()
    }

    /// Classifies every level-one mention of `docs` and writes the level-two
    /// layer. Level-one layers are returned as read, or repaired when the
    /// options ask for it.
    pub fn classify_mentions(
        &self,
        docs: &[Document],
        opts: ClassifyOptions,
    ) -> Result<(Vec<Document>, Vec<SublabelResult>), RouterError> {
        let mut prepared: Vec<(Document, TagSequence, Vec<Mention>)> = Vec::with_capacity(docs.len());
        let mut requests = Vec::new();
        for doc in docs {
            let (seq, mentions) = level1_mentions(doc, opts)?;
            for m in &mentions {
                requests.push(SublabelRequest::from_document(doc, *m, CONTEXT_WINDOW)?);
            }
            prepared.push((doc.clone(), seq, mentions));
        }

        let results = self.classify_requests(&requests);
        let refusals = refusal_count(&results);
        let failures = results
            .iter()
            .filter(|r| matches!(r.outcome, Outcome::TransportError(_)))
            .count();
        log::info!(
            "classified {} mentions: {} refusals, {} transport errors",
            results.len(),
            refusals,
            failures
        );

        let mut answers = results.iter();
        let mut out = Vec::with_capacity(prepared.len());
        for (mut doc, seq, mentions) in prepared {
            let mut tags = vec!["O".to_string(); seq.len()];
            for m in &mentions {
                let res = answers.next().expect("one result per mention");
                let label = res.outcome.tag().map_or(UNRESOLVED, |t| t.prompt_name());
                for (t, l1) in tags[m.start..m.end].iter_mut().zip(&seq.tags[m.start..m.end]) {
                    *t = format!("{}-{label}", &l1[..1]);
                }
            }
            doc.set_level1(Some(seq.tags)).expect("same length");
            doc.set_level2(Some(tags)).expect("same length");
            out.push(doc);
        }
        Ok((out, results))
    }
}

fn level1_mentions(doc: &Document, opts: ClassifyOptions) -> Result<(TagSequence, Vec<Mention>), RouterError> {
    let invalid = |reason: String| RouterError::InvalidInput {
        doc_id: doc.id().to_string(),
        reason,
    };
    let tags = doc.level1().ok_or_else(|| invalid("no level-one layer".into()))?;
    let mut seq = TagSequence::new(opts.scheme, tags.to_vec());
    let violations = validate(&seq, Layer::Level1);
    if !violations.is_empty() {
        match opts.repair {
            Some(policy) => seq = repair(&seq, policy, Layer::Level1),
            None => {
                let v = &violations[0];
                return Err(invalid(format!(
                    "{} violations, first at token {}: {} {:?}",
                    violations.len(),
                    v.index,
                    v.kind,
                    v.tag
                )));
            }
        }
    }
    let spans = decode_spans(&seq, Layer::Level1).map_err(|e| invalid(e.to_string()))?;
    let mentions = spans
        .into_iter()
        .map(|s| Mention::new(s.start, s.end, s.label.parse().expect("canonical level-one label")))
        .collect();
    Ok((seq, mentions))
}

/// Classifies with the HTTP endpoint described by `cfg`.
pub fn classify_mentions(
    docs: &[Document],
    cfg: &EndpointConfig,
) -> Result<(Vec<Document>, Vec<SublabelResult>), RouterError> {
    let client = HttpChatClient::new(cfg.clone())?;
    Sublabeler::new(cfg.clone(), &client)?.classify_mentions(docs, ClassifyOptions::default())
}
