//! Noun-phrase and relation-phrase detection.
//!
//! Both grammars are rules files run by [`crate::annotation::apply_rules`].
//! After matching, noun phrases get `text`, `head` and `core` features and
//! relation phrases get `text`. A noun phrase that sits inside a pattern-1 or
//! pattern-4 relation (`là sinh viên của`, `có quê ở`) is part of the
//! relation, so it is flagged `embedded=true` and never used as a term.

use crate::annotation::{apply_rules, kinds, parse_rules, AnnotationSet, Rule, RuleError};
use crate::preprocess::PosTag;
use crate::resources;
use crate::text;

#[derive(Debug, Clone)]
pub struct Grammar {
    pub noun_phrase: Vec<Rule>,
    pub relation: Vec<Rule>,
}

impl Grammar {
    pub fn load(noun_phrase: &str, relation: &str) -> Result<Self, RuleError> {
        Ok(Grammar {
            noun_phrase: parse_rules(noun_phrase)?,
            relation: parse_rules(relation)?,
        })
    }

    pub fn builtin() -> Self {
        Grammar::load(resources::NOUN_PHRASE_RULES, resources::RELATION_RULES)
            .expect("bundled grammar parses")
    }
}

pub fn detect_noun_phrases(set: &AnnotationSet, rules: &[Rule]) -> AnnotationSet {
    let mut out = apply_rules(rules, set);
    let fresh: Vec<usize> = out
        .of_kind(kinds::NOUN_PHRASE)
        .filter(|np| !np.features.contains_key("text"))
        .map(|np| np.id)
        .collect();
    for id in fresh {
        let np = out.get(id).unwrap().clone();
        let covered = out.covered_text(np.span).to_string();
        let head = out
            .of_kind(kinds::TOKEN)
            .filter(|t| np.span.contains(&t.span))
            .find(|t| {
                t.feature("category")
                    .and_then(|c| c.parse::<PosTag>().ok())
                    .is_some_and(PosTag::is_noun_core)
            })
            .map(|t| out.covered_text(t.span).to_string())
            .unwrap_or_else(|| covered.clone());
        out.set_feature(id, "text", &text::fold_words(&covered));
        out.set_feature(id, "head", &head);
        if np.feature("core").is_none() {
            out.set_feature(id, "core", &covered);
        }
    }
    out
}

pub fn detect_relations(set: &AnnotationSet, rules: &[Rule]) -> AnnotationSet {
    let mut out = apply_rules(rules, set);
    let rels: Vec<_> = out
        .of_kind(kinds::RELATION)
        .filter(|r| !r.features.contains_key("text"))
        .map(|r| (r.id, r.span, r.feature("pattern-id").map(str::to_string)))
        .collect();
    for (id, span, pattern) in rels {
        let t = text::fold_words(out.covered_text(span));
        out.set_feature(id, "text", &t);
        if matches!(pattern.as_deref(), Some("1") | Some("4")) {
            let embedded: Vec<usize> = out
                .of_kind(kinds::NOUN_PHRASE)
                .filter(|np| span.contains(&np.span))
                .map(|np| np.id)
                .collect();
            for np in embedded {
                out.set_feature(np, "embedded", "true");
            }
        }
    }
    out
}
