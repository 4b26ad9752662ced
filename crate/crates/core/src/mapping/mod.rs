//! Resolving query tuples to ontology elements.
//!
//! Each tuple is resolved slot by slot: term2, then term1, then the relation,
//! whose candidates are restricted to properties that can link the two
//! terms. A slot resolves on an exact name match or a single clear fuzzy
//! winner; otherwise mapping stops with a [`DisambiguationRequest`] and can
//! be resumed with the user's pick through [`SuspendedMapping::choose`].
//!
//! Mapping is replayed from the start on every resume with the choices made
//! so far pinned, so the outcome depends only on the tuple, the ontology, the
//! configuration and the choice sequence.

mod pending;
mod similarity;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ontology::{normalize_name, Element, ElementKind, Ontology, Orientation, RelationCandidate};
use crate::semantic::{IntermediateRepresentation, QuestionClass, QuestionStructure};

pub use pending::{PendingError, PendingMappings, PendingTable};
pub use similarity::{jaro_winkler, levenshtein_ratio, similarity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappingConfig {
    /// minimum similarity for a fuzzy candidate
    pub threshold: f64,
    /// top-two score gap below which the user is asked
    pub margin: f64,
    pub max_options: usize,
}

impl Default for MappingConfig {
    fn default() -> Self {
        MappingConfig {
            threshold: 0.75,
            margin: 0.05,
            max_options: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub kind: ElementKind,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<Orientation>,
}

impl Candidate {
    fn term(el: &Element, score: f64) -> Self {
        Candidate { id: el.id.clone(), kind: el.kind, score, orientation: None }
    }

    fn relation(r: &RelationCandidate, score: f64) -> Self {
        Candidate {
            id: r.property.clone(),
            kind: ElementKind::Property,
            score,
            orientation: Some(r.orientation),
        }
    }

    pub fn element(&self) -> Element {
        Element { kind: self.kind, id: self.id.clone() }
    }
}

fn sort_candidates(c: &mut [Candidate]) {
    c.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.id.cmp(&b.id))
            .then_with(|| a.orientation.cmp(&b.orientation))
    });
}

/// Candidates for a term phrase, best first.
///
/// An exact name wins outright. Otherwise a phrase that starts with a concept name followed by more words
/// (`lớp k50 khoa học máy tính`) is first matched, minus the concept name,
/// against that concept's instances. If that finds nothing the whole phrase
/// is matched against every concept and instance.
pub fn map_term(ont: &Ontology, raw: &str, cfg: &MappingConfig) -> Vec<Candidate> {
    let name = normalize_name(raw);
    if let Some(el) = ont.find_element_by_name(&name) {
        if el.kind != ElementKind::Property {
            return vec![Candidate::term(el, 1.0)];
        }
    }
    let words: Vec<&str> = name.split('_').filter(|w| !w.is_empty()).collect();
    for k in (1..words.len()).rev() {
        let head = words[..k].join("_");
        let Some(el) = ont.find_element_by_name(&head) else { continue };
        if el.kind != ElementKind::Concept {
            continue;
        }
        let rest = words[k..].join("_");
        let pool: Vec<&str> = ont.instances_of(&el.id).map(|v| v.iter().map(String::as_str).collect()).unwrap_or_default();
        let found = match_names(ont, &rest, cfg, |e| e.kind == ElementKind::Instance && pool.contains(&e.id.as_str()));
        if !found.is_empty() {
            return found;
        }
        break;
    }
    match_names(ont, &name, cfg, |e| e.kind != ElementKind::Property)
}

fn match_names(ont: &Ontology, name: &str, cfg: &MappingConfig, keep: impl Fn(&Element) -> bool) -> Vec<Candidate> {
    if let Some(el) = ont.find_element_by_name(name) {
        if keep(el) {
            return vec![Candidate::term(el, 1.0)];
        }
    }
    let mut best: BTreeMap<&Element, f64> = BTreeMap::new();
    for (n, el) in ont.names() {
        if !keep(el) {
            continue;
        }
        let s = similarity(name, n);
        if s >= cfg.threshold {
            let e = best.entry(el).or_insert(s);
            *e = e.max(s);
        }
    }
    let mut out: Vec<Candidate> = best.into_iter().map(|(el, s)| Candidate::term(el, s)).collect();
    sort_candidates(&mut out);
    out
}

/// Ranks the properties in `pool` against a relation phrase. An exact name
/// match is returned alone, preferring the forward orientation; with no
/// phrase every candidate scores 0.
pub fn map_relation(ont: &Ontology, raw: Option<&str>, pool: &[RelationCandidate]) -> Vec<Candidate> {
    let Some(raw) = raw else {
        let mut out: Vec<Candidate> = pool.iter().map(|r| Candidate::relation(r, 0.0)).collect();
        sort_candidates(&mut out);
        return out;
    };
    let name = normalize_name(raw);
    let names_of = |id: &str| -> Vec<String> {
        let p = ont.property(id).expect("pool holds known properties");
        std::iter::once(p.id.clone())
            .chain(p.aliases.iter().map(|a| normalize_name(a)))
            .collect()
    };
    let exact: Vec<Candidate> = pool
        .iter()
        .filter(|r| names_of(&r.property).contains(&name))
        .map(|r| Candidate::relation(r, 1.0))
        .collect();
    if !exact.is_empty() {
        // `X thuộc Y` reads forward; the inverse reading is only used when
        // it is the sole exact hit.
        let forward: Vec<Candidate> = exact
            .iter()
            .filter(|c| c.orientation == Some(Orientation::Forward))
            .cloned()
            .collect();
        return if forward.is_empty() { exact } else { forward };
    }
    let mut out: Vec<Candidate> = pool
        .iter()
        .map(|r| {
            let s = names_of(&r.property).iter().map(|n| similarity(&name, n)).fold(0.0, f64::max);
            Candidate::relation(r, s)
        })
        .collect();
    sort_candidates(&mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Term1,
    Relation,
    Term2,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::Term1 => "term1",
            Slot::Relation => "relation",
            Slot::Term2 => "term2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRef {
    pub tuple: usize,
    pub slot: Slot,
    /// phrase being mapped, absent for an unstated relation
    pub raw: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisambiguationRequest {
    pub slot: SlotRef,
    /// at least two, best first
    pub options: Vec<Candidate>,
    /// set by whoever holds the suspended mapping
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingFailure {
    pub tuple: Option<usize>,
    pub slot: Option<Slot>,
    pub reason: String,
}

impl fmt::Display for MappingFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.tuple, self.slot) {
            (Some(t), Some(s)) => write!(f, "tuple {} {}: {}", t + 1, s, self.reason),
            _ => f.write_str(&self.reason),
        }
    }
}

/// A query tuple with its slots resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OntoTuple {
    pub structure: QuestionStructure,
    pub qclass: QuestionClass,
    /// always a concept
    pub term1: String,
    /// set when term1 named an instance; the tuple is then about it alone
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    pub relation: Option<RelationCandidate>,
    pub term2: Option<Element>,
}

impl fmt::Display for OntoTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t1 = self.subject.as_deref().unwrap_or(&self.term1);
        let rel = match &self.relation {
            Some(r) if r.orientation == Orientation::Inverse => format!("{}⁻¹", r.property),
            Some(r) => r.property.clone(),
            None => "?".into(),
        };
        let t2 = self.term2.as_ref().map(|e| e.id.as_str()).unwrap_or("?");
        write!(f, "({t1}, {rel}, {t2})")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MappingStep {
    Resolved(Vec<OntoTuple>),
    Suspended(SuspendedMapping),
    Failed(MappingFailure),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum ChoiceKey {
    /// same phrase, same resolution everywhere in one question
    Term(String),
    Relation(usize),
}

/// A mapping stopped at an ambiguous slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SuspendedMapping {
    ir: IntermediateRepresentation,
    config: MappingConfig,
    choices: BTreeMap<ChoiceKey, Candidate>,
    pending: ChoiceKey,
    request: DisambiguationRequest,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("choice {index} is out of range ({len} options)")]
pub struct ChoiceOutOfRange {
    pub index: usize,
    pub len: usize,
}

impl SuspendedMapping {
    pub fn request(&self) -> &DisambiguationRequest {
        &self.request
    }

    pub fn ir(&self) -> &IntermediateRepresentation {
        &self.ir
    }

    pub(crate) fn set_token(&mut self, token: &str) {
        self.request.token = Some(token.to_string());
    }

    /// Pins option `index` and resumes. `self` is untouched on error.
    pub fn choose(&self, ont: &Ontology, index: usize) -> Result<MappingStep, ChoiceOutOfRange> {
        let Some(c) = self.request.options.get(index) else {
            return Err(ChoiceOutOfRange { index, len: self.request.options.len() });
        };
        let mut choices = self.choices.clone();
        choices.insert(self.pending.clone(), c.clone());
        let mut step = run(ont, &self.ir, &self.config, choices);
        if let (MappingStep::Suspended(next), Some(t)) = (&mut step, &self.request.token) {
            next.request.token = Some(t.clone());
        }
        Ok(step)
    }
}

/// Maps every tuple of `ir`.
pub fn map_tuple(ont: &Ontology, ir: &IntermediateRepresentation, cfg: &MappingConfig) -> MappingStep {
    run(ont, ir, cfg, BTreeMap::new())
}

enum Pick {
    One(Candidate),
    Ask(Vec<Candidate>),
    None,
}

fn pick_term(cands: Vec<Candidate>, cfg: &MappingConfig) -> Pick {
    match cands.len() {
        0 => Pick::None,
        1 => Pick::One(cands.into_iter().next().unwrap()),
        _ => {
            let (a, b) = (cands[0].score, cands[1].score);
            if a - b < cfg.margin || a < cfg.threshold {
                Pick::Ask(cands)
            } else {
                Pick::One(cands.into_iter().next().unwrap())
            }
        }
    }
}

fn pick_relation(cands: Vec<Candidate>) -> Pick {
    let exact = cands.len() == 1 || (cands.first().is_some_and(|c| c.score == 1.0) && cands.get(1).is_none_or(|c| c.score < 1.0));
    match cands.len() {
        0 => Pick::None,
        _ if exact => Pick::One(cands.into_iter().next().unwrap()),
        _ => Pick::Ask(cands),
    }
}

fn run(
    ont: &Ontology,
    ir: &IntermediateRepresentation,
    cfg: &MappingConfig,
    choices: BTreeMap<ChoiceKey, Candidate>,
) -> MappingStep {
    let fail = |tuple: Option<usize>, slot: Option<Slot>, reason: String| MappingStep::Failed(MappingFailure { tuple, slot, reason });
    if !ir.structure.is_processable() {
        return fail(None, None, format!("structure {} is not supported", ir.structure));
    }
    let ask = |key: ChoiceKey, slot: SlotRef, mut options: Vec<Candidate>, choices: &BTreeMap<ChoiceKey, Candidate>| {
        options.truncate(cfg.max_options.max(2));
        MappingStep::Suspended(SuspendedMapping {
            ir: ir.clone(),
            config: *cfg,
            choices: choices.clone(),
            pending: key,
            request: DisambiguationRequest { slot, options, token: None },
        })
    };

    let mut out = Vec::new();
    for (ti, t) in ir.tuples.iter().enumerate() {
        // the error side is the step to return as is
        #[allow(clippy::result_large_err)]
        let term = |slot: Slot, raw: &str| -> Result<Candidate, MappingStep> {
            let key = ChoiceKey::Term(normalize_name(raw));
            if let Some(c) = choices.get(&key) {
                return Ok(c.clone());
            }
            match pick_term(map_term(ont, raw, cfg), cfg) {
                Pick::One(c) => Ok(c),
                Pick::Ask(opts) => Err(ask(key, SlotRef { tuple: ti, slot, raw: Some(raw.into()) }, opts, &choices)),
                Pick::None => Err(fail(Some(ti), Some(slot), format!("no ontology element matches `{raw}`"))),
            }
        };

        let term2 = match &t.term2 {
            Some(raw) => match term(Slot::Term2, raw) {
                Ok(c) => Some(c.element()),
                Err(step) => return step,
            },
            None => None,
        };
        let Some(raw1) = &t.term1 else {
            return fail(Some(ti), Some(Slot::Term1), "missing term1".into());
        };
        let t1 = match term(Slot::Term1, raw1) {
            Ok(c) => c,
            Err(step) => return step,
        };
        let (concept, subject) = match t1.kind {
            ElementKind::Concept => (t1.id.clone(), None),
            ElementKind::Instance => (ont.concept_of(&t1.id).unwrap().to_string(), Some(t1.id.clone())),
            ElementKind::Property => return fail(Some(ti), Some(Slot::Term1), format!("`{raw1}` names a property")),
        };

        let needs_relation = t.structure != QuestionStructure::Definition && (t.relation.is_some() || term2.is_some());
        let relation = if needs_relation {
            let key = ChoiceKey::Relation(ti);
            let c = match choices.get(&key) {
                Some(c) => c.clone(),
                None => {
                    let el = Element::concept(&concept);
                    let pool = match &term2 {
                        Some(t2) => ont.relations_between(&el, t2),
                        None => ont.relations_of(&el),
                    };
                    match pick_relation(map_relation(ont, t.relation.as_deref(), &pool)) {
                        Pick::One(c) => c,
                        Pick::Ask(opts) => {
                            return ask(key, SlotRef { tuple: ti, slot: Slot::Relation, raw: t.relation.clone() }, opts, &choices)
                        }
                        Pick::None => {
                            let what = t.relation.as_deref().unwrap_or("(unstated)");
                            return fail(Some(ti), Some(Slot::Relation), format!("no property links the terms for relation `{what}`"));
                        }
                    }
                }
            };
            Some(RelationCandidate {
                property: c.id,
                orientation: c.orientation.unwrap_or(Orientation::Forward),
            })
        } else {
            None
        };

        out.push(OntoTuple {
            structure: t.structure,
            qclass: t.qclass,
            term1: concept,
            subject,
            relation,
            term2,
        });
    }
    MappingStep::Resolved(out)
}
