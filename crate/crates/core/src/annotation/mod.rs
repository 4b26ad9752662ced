//! Typed annotations over question text and a small pattern engine in the
//! spirit of JAPE: rules are sequences of annotation constraints with `1`,
//! `?` and `+` quantifiers, matched leftmost-longest.

mod matcher;
mod rule;
mod set;

pub use matcher::{apply_rules, find_matches, Match};
pub use rule::{
    compile_rule, parse_rules, Action, Constraint, FeatureValue, Quantifier, Rule, RuleElement, RuleError,
};
pub use set::{Annotation, AnnotationSet, Features, Span};

/// Annotation kinds produced by the built-in pipeline.
pub mod kinds {
    pub const TOKEN: &str = "TokenVn";
    pub const QUESTION_WORD: &str = "QuestionWord";
    pub const NOUN_PHRASE: &str = "NounPhrase";
    pub const RELATION: &str = "RelationPhrase";
}
