//! Two-level named entity recognition for U.S. congressional bills.
//!
//! The crate covers the whole evaluation pipeline: bill ingestion and
//! tokenization ([`corpus`]), the two-level label system ([`ontology`]), BIO
//! tag handling ([`seqlabel`]), entity-level scoring ([`scoring`]) and the
//! LLM-backed level-two classification stage ([`router`]).

pub mod corpus;
pub mod error;
pub mod num;
pub mod ontology;
pub mod router;
pub mod scoring;
pub mod seqlabel;

pub use corpus::{read_split, tokenize, write_split, BillId, Document, SplitManifest};
pub use ontology::{parent_of, resolve_label, routing_set, Label, Level1Label, Level2Label, RoutingSet};
pub use scoring::{Percent, Prf, ScoreReport};
pub use seqlabel::{Mention, RepairPolicy, Scheme, TagSequence};

/// Exact rational scalar for metric values.
pub type Rational = num_rational::Ratio<i64>;

/// Metrics as `f64` fractions.
pub type Metrics = Prf<f64>;

/// Metrics as single-precision fractions.
pub type Metrics32 = Prf<f32>;

/// Metrics as exact rationals.
pub type ExactMetrics = Prf<Rational>;
