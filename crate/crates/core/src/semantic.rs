//! Question classification and the intermediate representation.
//!
//! The builder reads the annotation set as a flat sequence of items (question
//! words, free noun phrases, relation phrases, conjunctions), splits it on
//! conjunctions and matches each piece against a small set of shapes:
//!
//! | shape                  | structure  | tuple                          |
//! |------------------------|------------|--------------------------------|
//! | `NP Rel NP`            | Normal     | (NP₁, Rel, NP₂)                |
//! | `QW Rel NP`            | Normal     | (QW, Rel, NP)                  |
//! | `NP Rel QW`            | Normal     | (NP, Rel, ∅), asks for values  |
//! | `NP`                   | Normal     | (NP, ∅, ∅), lists the concept  |
//! | `NP [là] QW`, `QW [là] NP` | Definition | (NP, ∅, ∅)                 |
//! | `NP NP`                | UnknRel    | (NP₁, ∅, NP₂)                  |
//! | `first và Rel NP ...`  | And / Or   | one tuple per group, shared term1 |
//!
//! Question words other than the one used as a term are ignored by the shape
//! match; they only select the class. A classifier noun not covered by any
//! phrase counts as a noun phrase here.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::annotation::{kinds, Annotation, AnnotationSet, Span};
use crate::preprocess::{PosTag, QuestionCategory};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuestionClass {
    HowWhy,
    YesNo,
    What,
    When,
    Where,
    Who,
    Many,
    ManyClass,
    List,
    Entity,
}

impl QuestionClass {
    pub const ALL: [QuestionClass; 10] = [
        QuestionClass::HowWhy,
        QuestionClass::YesNo,
        QuestionClass::What,
        QuestionClass::When,
        QuestionClass::Where,
        QuestionClass::Who,
        QuestionClass::Many,
        QuestionClass::ManyClass,
        QuestionClass::List,
        QuestionClass::Entity,
    ];

    /// Rank used to pick one class when several question words are present.
    fn rank(self) -> u8 {
        match self {
            QuestionClass::YesNo => 0,
            QuestionClass::Many | QuestionClass::ManyClass => 1,
            QuestionClass::List => 2,
            QuestionClass::Who => 3,
            QuestionClass::What => 4,
            QuestionClass::When => 5,
            QuestionClass::Where => 6,
            QuestionClass::HowWhy => 7,
            QuestionClass::Entity => 8,
        }
    }
}

impl fmt::Display for QuestionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuestionStructure {
    Normal,
    UnknTerm,
    UnknRel,
    Definition,
    Compare,
    ThreeTerm,
    Clause,
    Combine,
    And,
    Or,
    #[serde(rename = "AffirmNeg_3Term")]
    AffirmNeg3Term,
    #[serde(rename = "AffirmNeg_2Triple")]
    AffirmNeg2Triple,
    AffirmNeg,
}

impl QuestionStructure {
    pub const ALL: [QuestionStructure; 13] = [
        QuestionStructure::Normal,
        QuestionStructure::UnknTerm,
        QuestionStructure::UnknRel,
        QuestionStructure::Definition,
        QuestionStructure::Compare,
        QuestionStructure::ThreeTerm,
        QuestionStructure::Clause,
        QuestionStructure::Combine,
        QuestionStructure::And,
        QuestionStructure::Or,
        QuestionStructure::AffirmNeg3Term,
        QuestionStructure::AffirmNeg2Triple,
        QuestionStructure::AffirmNeg,
    ];

    /// Whether mapping and answer extraction know how to process this structure.
    pub fn is_processable(self) -> bool {
        matches!(
            self,
            QuestionStructure::Normal
                | QuestionStructure::And
                | QuestionStructure::Or
                | QuestionStructure::Definition
                | QuestionStructure::UnknRel
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QuestionStructure::Normal => "Normal",
            QuestionStructure::UnknTerm => "UnknTerm",
            QuestionStructure::UnknRel => "UnknRel",
            QuestionStructure::Definition => "Definition",
            QuestionStructure::Compare => "Compare",
            QuestionStructure::ThreeTerm => "ThreeTerm",
            QuestionStructure::Clause => "Clause",
            QuestionStructure::Combine => "Combine",
            QuestionStructure::And => "And",
            QuestionStructure::Or => "Or",
            QuestionStructure::AffirmNeg3Term => "AffirmNeg_3Term",
            QuestionStructure::AffirmNeg2Triple => "AffirmNeg_2Triple",
            QuestionStructure::AffirmNeg => "AffirmNeg",
        }
    }
}

impl fmt::Display for QuestionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTuple {
    pub structure: QuestionStructure,
    pub qclass: QuestionClass,
    pub term1: Option<String>,
    pub relation: Option<String>,
    pub term2: Option<String>,
    pub term3: Option<String>,
}

impl QueryTuple {
    /// Same tuple with every slot folded and underscores read as spaces, for
    /// comparing against hand-written expectations.
    pub fn normalized(&self) -> QueryTuple {
        let n = |s: &Option<String>| s.as_deref().map(|s| text::fold_words(&s.replace('_', " ")));
        QueryTuple {
            structure: self.structure,
            qclass: self.qclass,
            term1: n(&self.term1),
            relation: n(&self.relation),
            term2: n(&self.term2),
            term3: n(&self.term3),
        }
    }
}

impl fmt::Display for QueryTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |o: &Option<String>| o.clone().unwrap_or_else(|| "?".into());
        write!(
            f,
            "({}, {}, {}, {}, {}, {})",
            self.structure,
            self.qclass,
            s(&self.term1),
            s(&self.relation),
            s(&self.term2),
            s(&self.term3)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntermediateRepresentation {
    pub structure: QuestionStructure,
    pub tuples: Vec<QueryTuple>,
    pub text: String,
}

impl IntermediateRepresentation {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("IR serializes")
    }

    /// Structure and normalized tuples, ignoring the original text.
    pub fn same_query(&self, other: &IntermediateRepresentation) -> bool {
        self.structure == other.structure
            && self.tuples.len() == other.tuples.len()
            && self
                .tuples
                .iter()
                .zip(&other.tuples)
                .all(|(a, b)| a.normalized() == b.normalized())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemanticError {
    #[error("unsupported question structure: {reason}")]
    UnsupportedStructure {
        reason: String,
        annotations: Vec<Annotation>,
    },
}

/// Candidate classes from the question words present. A question with no
/// question word at all is an entity question.
pub fn classify_question(set: &AnnotationSet) -> BTreeSet<QuestionClass> {
    let mut out = BTreeSet::new();
    for qw in set.of_kind(kinds::QUESTION_WORD) {
        let Some(cat) = qw.feature("qcat").and_then(|c| c.parse::<QuestionCategory>().ok()) else {
            continue;
        };
        match cat {
            QuestionCategory::Who => out.extend([QuestionClass::Who]),
            QuestionCategory::What => out.extend([QuestionClass::What]),
            QuestionCategory::When => out.extend([QuestionClass::When]),
            QuestionCategory::Where => out.extend([QuestionClass::Where]),
            QuestionCategory::HowWhy => out.extend([QuestionClass::HowWhy]),
            QuestionCategory::YesNo => out.extend([QuestionClass::YesNo]),
            QuestionCategory::Many => out.extend([QuestionClass::Many, QuestionClass::ManyClass]),
            QuestionCategory::EntityMark => out.extend([QuestionClass::Entity]),
            QuestionCategory::ListMark => out.extend([QuestionClass::List]),
        }
    }
    if out.is_empty() {
        out.insert(QuestionClass::Entity);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Conj {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq)]
enum ItemKind {
    Qw(QuestionCategory),
    Np,
    Rel { copula: bool },
    Conj(Conj),
}

#[derive(Debug, Clone)]
struct Item {
    kind: ItemKind,
    span: Span,
    /// term text with original case: the NP core, the relation or QW surface
    text: String,
}

fn conjunction(word: &str) -> Option<Conj> {
    match word {
        "và" | "mà" => Some(Conj::And),
        "hoặc" | "hay" => Some(Conj::Or),
        _ => None,
    }
}

fn items(set: &AnnotationSet) -> Vec<Item> {
    let qws: Vec<&Annotation> = set.of_kind(kinds::QUESTION_WORD).collect();
    let mut out = Vec::new();
    for a in set.iter() {
        let covered = set.covered_text(a.span).to_string();
        let item = match a.kind.as_str() {
            kinds::QUESTION_WORD => {
                let Some(cat) = a.feature("qcat").and_then(|c| c.parse().ok()) else {
                    continue;
                };
                Item { kind: ItemKind::Qw(cat), span: a.span, text: covered }
            }
            kinds::NOUN_PHRASE => {
                if a.feature("embedded") == Some("true") || qws.iter().any(|q| q.span.overlaps(&a.span)) {
                    continue;
                }
                let core = a.feature("core").map(str::to_string).unwrap_or(covered);
                Item { kind: ItemKind::Np, span: a.span, text: core }
            }
            kinds::RELATION => {
                let copula = text::fold_words(&covered) == "là";
                Item { kind: ItemKind::Rel { copula }, span: a.span, text: covered }
            }
            _ => continue,
        };
        out.push(item);
    }
    for t in set.of_kind(kinds::TOKEN) {
        if out.iter().any(|i| i.span.overlaps(&t.span)) {
            continue;
        }
        let covered = set.covered_text(t.span).to_string();
        // A classifier standing alone (`khoa nào`, `học lớp nào`) names a
        // concept, so it can serve as a term without being a noun phrase.
        let kind = if t.feature("category") == Some(PosTag::Nt.as_str()) {
            ItemKind::Np
        } else if let Some(c) = conjunction(&text::fold_words(&covered)) {
            ItemKind::Conj(c)
        } else {
            continue;
        };
        out.push(Item { kind, span: t.span, text: covered });
    }
    out.sort_by_key(|i| (i.span.start, std::cmp::Reverse(i.span.end)));
    out
}

/// One conjunct reduced to terms and a relation, before the class is known.
#[derive(Debug, Clone)]
struct Shape {
    structure: QuestionStructure,
    term1: Option<Item>,
    relation: Option<String>,
    term2: Option<String>,
}

fn is_np(i: &Item) -> bool {
    i.kind == ItemKind::Np
}

fn is_rel(i: &Item) -> bool {
    matches!(i.kind, ItemKind::Rel { copula: false })
}

fn is_copula(i: &Item) -> bool {
    matches!(i.kind, ItemKind::Rel { copula: true })
}

fn qw_cat(i: &Item) -> Option<QuestionCategory> {
    match i.kind {
        ItemKind::Qw(c) => Some(c),
        _ => None,
    }
}

/// Whether a question word can stand in for a term (`ai là ...`, `... là gì`).
fn is_term_qw(i: &Item) -> bool {
    matches!(qw_cat(i), Some(QuestionCategory::Who | QuestionCategory::What))
}

/// The NP a question word is attached to: directly after a counting or
/// asking word, or directly before `nào`.
fn attached_np(seg: &[Item]) -> Option<usize> {
    for (i, it) in seg.iter().enumerate() {
        match qw_cat(it) {
            Some(QuestionCategory::Many | QuestionCategory::ListMark | QuestionCategory::Who | QuestionCategory::What) => {
                if seg.get(i + 1).is_some_and(is_np) {
                    return Some(i + 1);
                }
            }
            Some(QuestionCategory::EntityMark) if i > 0 && is_np(&seg[i - 1]) => return Some(i - 1),
            _ => {}
        }
    }
    None
}

fn first_shape(seg: &[Item]) -> Result<Shape, String> {
    // Question words are kept in `core` only where they act as a term.
    let core: Vec<&Item> = seg
        .iter()
        .filter(|i| !matches!(i.kind, ItemKind::Qw(_)) || is_term_qw(i))
        .collect();
    let nps: Vec<&Item> = core.iter().copied().filter(|i| is_np(i)).collect();
    let rels: Vec<&Item> = core.iter().copied().filter(|i| is_rel(i)).collect();
    let shape = |structure, t1: &Item, rel: Option<&Item>, t2: Option<&Item>| Shape {
        structure,
        term1: Some(t1.clone()),
        relation: rel.map(|r| r.text.clone()),
        term2: t2.map(|t| t.text.clone()),
    };

    match (rels.len(), nps.len()) {
        (1, _) => {
            let r = core.iter().position(|i| is_rel(i)).unwrap();
            let before: Vec<&Item> = core[..r].iter().copied().filter(|i| is_np(i) || is_term_qw(i)).collect();
            let after: Vec<&Item> = core[r + 1..].iter().copied().filter(|i| is_np(i) || is_term_qw(i)).collect();
            let rel = core[r];
            // A leading NP beats a question word for term1, a trailing NP beats
            // one for term2.
            let t1 = before.iter().rev().find(|i| is_np(i)).or(before.last());
            let t2 = after.iter().find(|i| is_np(i)).or(after.first());
            match (t1, t2) {
                (Some(t1), Some(t2)) if is_np(t2) => {
                    if before.iter().filter(|i| is_np(i)).count() > 1 {
                        return Err("more than one noun phrase before the relation".into());
                    }
                    Ok(shape(QuestionStructure::Normal, t1, Some(rel), Some(t2)))
                }
                (Some(t1), Some(_)) if is_np(t1) => Ok(shape(QuestionStructure::Normal, t1, Some(rel), None)),
                (Some(t1), None) if is_np(t1) => Ok(shape(QuestionStructure::Normal, t1, Some(rel), None)),
                _ => Err("relation without a subject term".into()),
            }
        }
        (0, 1) => {
            let np = nps[0];
            let term_qw = core.iter().any(|i| is_term_qw(i));
            let copula = seg.iter().any(is_copula);
            if term_qw || copula {
                Ok(shape(QuestionStructure::Definition, np, None, None))
            } else {
                Ok(shape(QuestionStructure::Normal, np, None, None))
            }
        }
        (0, 2) => {
            let seg_nps: Vec<usize> = seg.iter().enumerate().filter(|(_, i)| is_np(i)).map(|(k, _)| k).collect();
            let t1 = attached_np(seg).unwrap_or(seg_nps[0]);
            let t2 = *seg_nps.iter().find(|&&k| k != t1).unwrap();
            Ok(shape(QuestionStructure::UnknRel, &seg[t1], None, Some(&seg[t2])))
        }
        (0, 0) => Err("no noun phrase".into()),
        (0, _) => Err("more than two noun phrases and no relation".into()),
        _ => Err("more than one relation in one clause".into()),
    }
}

/// A conjunct after `và`/`hoặc`: `Rel NP`, or `NP Rel NP` repeating term1.
fn later_shape(seg: &[Item], term1: &Item) -> Result<Shape, String> {
    let core: Vec<&Item> = seg.iter().filter(|i| is_np(i) || is_rel(i)).collect();
    let same = |a: &Item| text::fold_words(&a.text) == text::fold_words(&term1.text);
    let (rel, t2) = match core.as_slice() {
        [r, n] if is_rel(r) && is_np(n) => (*r, *n),
        [s, r, n] if is_np(s) && same(s) && is_rel(r) && is_np(n) => (*r, *n),
        _ => return Err("conjunct is not a relation followed by a noun phrase".into()),
    };
    Ok(Shape {
        structure: QuestionStructure::Normal,
        term1: Some(term1.clone()),
        relation: Some(rel.text.clone()),
        term2: Some(t2.text.clone()),
    })
}

fn pick_class(candidates: &BTreeSet<QuestionClass>, seg: &[Item], term1: Option<&Item>) -> QuestionClass {
    let best = candidates
        .iter()
        .copied()
        .min_by_key(|c| c.rank())
        .unwrap_or(QuestionClass::Entity);
    if !matches!(best, QuestionClass::Many | QuestionClass::ManyClass) {
        return best;
    }
    // ManyClass counts instances of term1, so the counting word sits right
    // before the term1 phrase.
    let counts_term1 = seg.windows(2).any(|w| {
        qw_cat(&w[0]) == Some(QuestionCategory::Many) && term1.is_some_and(|t| t.span == w[1].span)
    });
    if counts_term1 {
        QuestionClass::ManyClass
    } else {
        QuestionClass::Many
    }
}

/// Builds the intermediate representation from an analysed annotation set.
pub fn build_intermediate_representation(
    set: &AnnotationSet,
    candidates: &BTreeSet<QuestionClass>,
) -> Result<IntermediateRepresentation, SemanticError> {
    let unsupported = |reason: String| SemanticError::UnsupportedStructure {
        reason,
        annotations: set.as_slice().to_vec(),
    };
    let all = items(set);
    let mut segments: Vec<Vec<Item>> = vec![Vec::new()];
    let mut conj: Option<Conj> = None;
    for it in all {
        if let ItemKind::Conj(c) = it.kind {
            if conj.is_some_and(|prev| prev != c) {
                return Err(unsupported("mixed conjunctions".into()));
            }
            conj = Some(c);
            segments.push(Vec::new());
        } else {
            segments.last_mut().unwrap().push(it);
        }
    }
    segments.retain(|s| !s.is_empty());
    if segments.is_empty() {
        return Err(unsupported("empty question".into()));
    }

    let first = first_shape(&segments[0]).map_err(unsupported)?;
    let mut shapes = vec![first.clone()];
    if segments.len() > 1 {
        if first.structure != QuestionStructure::Normal || first.term2.is_none() {
            return Err(unsupported("only relation clauses can be coordinated".into()));
        }
        let t1 = first.term1.as_ref().unwrap();
        for seg in &segments[1..] {
            shapes.push(later_shape(seg, t1).map_err(unsupported)?);
        }
    }
    let class = pick_class(candidates, &segments[0], first.term1.as_ref());

    let tuples: Vec<QueryTuple> = shapes
        .into_iter()
        .map(|s| QueryTuple {
            structure: s.structure,
            qclass: class,
            term1: s.term1.map(|t| t.text),
            relation: s.relation,
            term2: s.term2,
            term3: None,
        })
        .collect();

    let mut distinct = BTreeSet::new();
    for t in &tuples {
        if !distinct.insert((t.relation.as_deref().map(text::fold_words), t.term2.as_deref().map(text::fold_words))) {
            return Err(unsupported("repeated conjunct".into()));
        }
    }
    let structure = match (tuples.len(), conj) {
        (1, _) => tuples[0].structure,
        (_, Some(Conj::Or)) => QuestionStructure::Or,
        _ => QuestionStructure::And,
    };
    Ok(IntermediateRepresentation {
        structure,
        tuples,
        text: set.text().to_string(),
    })
}
