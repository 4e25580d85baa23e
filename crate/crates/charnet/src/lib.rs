//! Character co-occurrence networks from annotated literary texts.
//!
//! The crate ingests token/entity annotations in the BookNLP tab-separated
//! layout (or falls back to a rule-based mention detector for plain text),
//! promotes coreference clusters to characters, builds weighted undirected
//! co-occurrence networks over configurable windows and narrative-time
//! slices, scores node importance, serializes the result to standard graph
//! formats, and evaluates coreference quality with MUC, B³ and CEAFₑ.
//!
//! The usual flow:
//!
//! 1. [`annotation`] parses `.tokens` / `.entities` files into a [`Document`].
//! 2. [`pipeline`] turns cluster annotations (or detected mentions) into
//!    [`Character`]s.
//! 3. [`network`] builds [`CharacterNetwork`]s from documents + characters.
//! 4. [`metrics`], [`layout`], [`render`] and [`export`] consume networks.
//! 5. [`eval`] compares two clusterings of the same text.

pub mod annotation;
pub mod assignment;
pub mod diag;
pub mod eval;
pub mod export;
pub mod layout;
pub mod lexicon;
pub mod metrics;
pub mod network;
pub mod pipeline;
pub mod render;
pub mod segment;

pub use annotation::{Document, Mention, MentionKind, Token};
pub use diag::{Diagnostic, DiagnosticKind};
pub use eval::{Clustering, EvalReport, Prf};
pub use lexicon::{Gender, Lexicon};
pub use metrics::{Measure, ScoreMap};
pub use network::{CharacterNetwork, CountScheme, SliceSpec, WindowMode, WindowSpec};
pub use pipeline::{Character, ClusterAssignment};
