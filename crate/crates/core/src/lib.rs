//! Ontology-backed question answering for Vietnamese.
//!
//! A question flows through five stages, each a module here:
//!
//! 1. [`preprocess`]: dictionary segmentation into `TokenVn` annotations and
//!    marking of question phrases (`ai`, `bao nhiêu`, `phải không`, ...).
//! 2. [`syntax`]: noun-phrase and relation-phrase grammars run by the
//!    [`annotation`] pattern engine.
//! 3. [`semantic`]: question classification and construction of the
//!    intermediate representation, a list of query tuples
//!    `(structure, class, term1, relation, term2, term3)`.
//! 4. [`mapping`]: resolution of tuple slots to [`ontology`] elements by exact
//!    name, string similarity, or by asking the user.
//! 5. [`answer`]: evaluation of the resolved tuples and rendering.
//!
//! [`Engine`] wires the stages together over the bundled resources, and
//! [`service`] adds sessions, the HTTP API and the evaluation harness.
//!
//! ```
//! let engine = vnqa::Engine::builtin().unwrap();
//! let reply = engine.ask_auto("có bao nhiêu sinh viên học lớp k50 khoa học máy tính?").unwrap();
//! assert_eq!(reply.answer.count, Some(7));
//! ```

pub mod annotation;
pub mod answer;
pub mod mapping;
pub mod ontology;
mod pipeline;
pub mod preprocess;
pub mod resources;
pub mod semantic;
pub mod service;
pub mod syntax;
pub mod text;

pub use pipeline::{Analysis, AutoReply, Engine, EngineError, PhraseView, Sources, Stage, TokenView, Trace, MAX_QUESTION_CHARS};
