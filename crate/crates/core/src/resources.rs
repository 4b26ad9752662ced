//! Bundled data files. Each can be replaced at runtime through the service
//! config; these are the defaults compiled into the binary.

/// `surface<TAB>category` lexicon for the university domain.
pub const LEXICON: &str = include_str!("../data/lexicon.tsv");
/// `phrase<TAB>qcat` question-phrase table.
pub const QUESTION_PHRASES: &str = include_str!("../data/question_phrases.tsv");
pub const NOUN_PHRASE_RULES: &str = include_str!("../data/noun_phrase.rules");
pub const RELATION_RULES: &str = include_str!("../data/relation.rules");
/// The university ontology (15 concepts, 17 properties, 78 instances).
pub const ONTOLOGY: &str = include_str!("../data/ontology.json");
pub const TEMPLATES: &str = include_str!("../data/templates.tsv");
/// 30-question evaluation corpus over [`ONTOLOGY`].
pub const CORPUS: &str = include_str!("../data/corpus.tsv");
/// Example service configuration with every key at its default.
pub const DEFAULT_CONFIG: &str = include_str!("../data/vnqa.conf");
