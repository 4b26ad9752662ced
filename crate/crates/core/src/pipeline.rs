use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::annotation::{kinds, AnnotationSet, RuleError};
use crate::answer::{combine, evaluate_tuple, render_answer, Answer, AnswerSet, Templates};
use crate::mapping::{map_tuple, ChoiceOutOfRange, DisambiguationRequest, MappingConfig, MappingFailure, MappingStep, OntoTuple, SuspendedMapping};
use crate::ontology::{Ontology, OntologyError};
use crate::preprocess::{mark_question_words, segment, Lexicon, LoadError, QuestionPhraseTable};
use crate::resources;
use crate::semantic::{build_intermediate_representation, classify_question, IntermediateRepresentation, QuestionClass, SemanticError};
use crate::syntax::{detect_noun_phrases, detect_relations, Grammar};
use crate::text;

/// Longest question accepted, in characters.
pub const MAX_QUESTION_CHARS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Input,
    Analysis,
    Mapping,
    Extraction,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Input => "input",
            Stage::Analysis => "analysis",
            Stage::Mapping => "mapping",
            Stage::Extraction => "extraction",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("the question is empty")]
    EmptyQuestion,
    #[error("the question is longer than {MAX_QUESTION_CHARS} characters")]
    QuestionTooLong,
    #[error(transparent)]
    Analysis(#[from] SemanticError),
    #[error("mapping failed: {0}")]
    Mapping(MappingFailure),
    #[error("answer extraction failed: {0}")]
    Extraction(String),
    #[error("{what}: {message}")]
    Resource { what: String, message: String },
}

impl EngineError {
    pub fn stage(&self) -> Stage {
        match self {
            EngineError::EmptyQuestion | EngineError::QuestionTooLong | EngineError::Resource { .. } => Stage::Input,
            EngineError::Analysis(_) => Stage::Analysis,
            EngineError::Mapping(_) => Stage::Mapping,
            EngineError::Extraction(_) => Stage::Extraction,
        }
    }

    fn resource(what: &str, e: impl fmt::Display) -> Self {
        EngineError::Resource { what: what.to_string(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenView {
    pub text: String,
    pub category: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhraseView {
    pub text: String,
    pub start: usize,
    pub end: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

/// What each stage produced, for display and debugging.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Trace {
    pub tokens: Vec<TokenView>,
    pub question_words: Vec<PhraseView>,
    pub noun_phrases: Vec<PhraseView>,
    pub relations: Vec<PhraseView>,
    pub ir: Option<IntermediateRepresentation>,
    pub onto_tuples: Vec<String>,
}

impl Trace {
    pub fn from_annotations(set: &AnnotationSet) -> Self {
        let phrases = |kind: &str, tag: &str| -> Vec<PhraseView> {
            set.of_kind(kind)
                .map(|a| PhraseView {
                    text: set.covered_text(a.span).to_string(),
                    start: a.span.start,
                    end: a.span.end,
                    tag: a.feature(tag).map(str::to_string),
                })
                .collect()
        };
        Trace {
            tokens: set
                .of_kind(kinds::TOKEN)
                .map(|t| TokenView {
                    text: set.covered_text(t.span).to_string(),
                    category: t.feature("category").unwrap_or("Other").to_string(),
                })
                .collect(),
            question_words: phrases(kinds::QUESTION_WORD, "qcat"),
            noun_phrases: phrases(kinds::NOUN_PHRASE, "embedded"),
            relations: phrases(kinds::RELATION, "pattern-id"),
            ir: None,
            onto_tuples: Vec::new(),
        }
    }
}

/// Result of the analysis stages for one question.
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub annotations: AnnotationSet,
    pub classes: BTreeSet<QuestionClass>,
    pub ir: IntermediateRepresentation,
}

/// Answer obtained by always taking the top option when asked.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoReply {
    pub analysis: Analysis,
    pub onto_tuples: Vec<OntoTuple>,
    pub answer: Answer,
    /// the requests that were answered with option 0
    pub interactions: Vec<DisambiguationRequest>,
}

/// Contents of the replaceable data files.
#[derive(Debug, Clone, Default)]
pub struct Sources {
    pub lexicon: String,
    pub question_phrases: String,
    pub noun_phrase_rules: String,
    pub relation_rules: String,
    pub ontology: String,
    pub templates: String,
}

impl Sources {
    pub fn builtin() -> Self {
        Sources {
            lexicon: resources::LEXICON.into(),
            question_phrases: resources::QUESTION_PHRASES.into(),
            noun_phrase_rules: resources::NOUN_PHRASE_RULES.into(),
            relation_rules: resources::RELATION_RULES.into(),
            ontology: resources::ONTOLOGY.into(),
            templates: resources::TEMPLATES.into(),
        }
    }
}

/// The question-answering pipeline over one set of resources. Immutable and
/// shareable across threads.
#[derive(Debug, Clone)]
pub struct Engine {
    pub lexicon: Lexicon,
    pub question_phrases: QuestionPhraseTable,
    pub grammar: Grammar,
    pub ontology: Ontology,
    pub templates: Templates,
    pub mapping: MappingConfig,
}

impl Engine {
    pub fn builtin() -> Result<Self, EngineError> {
        Engine::from_sources(&Sources::builtin(), MappingConfig::default())
    }

    pub fn from_sources(src: &Sources, mapping: MappingConfig) -> Result<Self, EngineError> {
        let lexicon = Lexicon::load(&src.lexicon).map_err(|e: LoadError| EngineError::resource("lexicon", e))?;
        let question_phrases =
            QuestionPhraseTable::load(&src.question_phrases).map_err(|e| EngineError::resource("question phrases", e))?;
        let grammar = Grammar::load(&src.noun_phrase_rules, &src.relation_rules)
            .map_err(|e: RuleError| EngineError::resource("grammar", e))?;
        let ontology = Ontology::from_json(&src.ontology).map_err(|e: OntologyError| EngineError::resource("ontology", e))?;
        let templates = Templates::load(&src.templates).map_err(|e| EngineError::resource("templates", e))?;
        Ok(Engine {
            lexicon,
            question_phrases,
            grammar,
            ontology,
            templates,
            mapping,
        })
    }

    /// Cleans the question and runs segmentation, question-word marking and
    /// both grammars.
    pub fn annotate(&self, question: &str) -> Result<AnnotationSet, EngineError> {
        let q = text::clean_question(question);
        if q.is_empty() {
            return Err(EngineError::EmptyQuestion);
        }
        if q.chars().count() > MAX_QUESTION_CHARS {
            return Err(EngineError::QuestionTooLong);
        }
        let set = segment(&q, &self.lexicon);
        let set = mark_question_words(&set, &self.question_phrases);
        let set = detect_noun_phrases(&set, &self.grammar.noun_phrase);
        Ok(detect_relations(&set, &self.grammar.relation))
    }

    pub fn analyse(&self, question: &str) -> Result<Analysis, EngineError> {
        let annotations = self.annotate(question)?;
        let classes = classify_question(&annotations);
        let ir = build_intermediate_representation(&annotations, &classes)?;
        Ok(Analysis { annotations, classes, ir })
    }

    pub fn map(&self, ir: &IntermediateRepresentation) -> MappingStep {
        map_tuple(&self.ontology, ir, &self.mapping)
    }

    pub fn resume(&self, s: &SuspendedMapping, choice: usize) -> Result<MappingStep, ChoiceOutOfRange> {
        s.choose(&self.ontology, choice)
    }

    /// Evaluates resolved tuples, combines them per the IR structure and
    /// renders the answer.
    pub fn extract(&self, ir: &IntermediateRepresentation, onto: &[OntoTuple]) -> Result<Answer, EngineError> {
        let sets: Vec<AnswerSet> = onto.iter().map(|t| evaluate_tuple(&self.ontology, t)).collect();
        let result = combine(ir.structure, &sets).map_err(|e| EngineError::Extraction(e.to_string()))?;
        Ok(render_answer(&self.ontology, &self.templates, ir.structure, &ir.tuples, onto, &result))
    }

    /// Runs the whole pipeline, answering each disambiguation request with
    /// `choose` (which returns an option index).
    pub fn ask_with(
        &self,
        question: &str,
        mut choose: impl FnMut(&DisambiguationRequest) -> usize,
    ) -> Result<AutoReply, EngineError> {
        let analysis = self.analyse(question)?;
        let mut interactions = Vec::new();
        let mut step = self.map(&analysis.ir);
        let onto = loop {
            match step {
                MappingStep::Resolved(t) => break t,
                MappingStep::Failed(f) => return Err(EngineError::Mapping(f)),
                MappingStep::Suspended(s) => {
                    let i = choose(s.request());
                    interactions.push(s.request().clone());
                    step = self
                        .resume(&s, i)
                        .map_err(|e| EngineError::Mapping(MappingFailure { tuple: None, slot: None, reason: e.to_string() }))?;
                }
            }
        };
        let answer = self.extract(&analysis.ir, &onto)?;
        Ok(AutoReply {
            analysis,
            onto_tuples: onto,
            answer,
            interactions,
        })
    }

    /// [`Engine::ask_with`] taking the top-ranked option every time.
    pub fn ask_auto(&self, question: &str) -> Result<AutoReply, EngineError> {
        self.ask_with(question, |_| 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_question_end_to_end() {
        let e = Engine::builtin().unwrap();
        let r = e.ask_auto("có bao nhiêu sinh viên học lớp k50 khoa học máy tính?").unwrap();
        assert!(r.interactions.is_empty());
        assert_eq!(r.answer.count, Some(7));
        assert_eq!(r.onto_tuples[0].to_string(), "(sinh_viên, học, k50_khoa_học_máy_tính)");
    }

    #[test]
    fn input_limits() {
        let e = Engine::builtin().unwrap();
        assert!(matches!(e.analyse("  ?"), Err(EngineError::EmptyQuestion)));
        let long = "a ".repeat(400);
        assert!(matches!(e.analyse(&long), Err(EngineError::QuestionTooLong)));
    }

    #[test]
    fn error_stages() {
        let e = Engine::builtin().unwrap();
        assert_eq!(e.ask_auto("bao nhiêu").unwrap_err().stage(), Stage::Analysis);
        assert_eq!(e.ask_auto("sinh viên nào có quê ở Zzzz Qqqq").unwrap_err().stage(), Stage::Mapping);
    }

    #[test]
    fn trace_lists_annotations() {
        let e = Engine::builtin().unwrap();
        let set = e.annotate("ai là sinh viên của lớp khoa học máy tính?").unwrap();
        let t = Trace::from_annotations(&set);
        assert_eq!(t.relations.len(), 1);
        assert_eq!(t.relations[0].text, "là sinh viên của");
        assert_eq!(t.question_words[0].tag.as_deref(), Some("Who"));
    }
}
