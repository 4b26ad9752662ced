//! Evaluating resolved tuples and rendering the answer.

use std::collections::{HashMap, HashSet};

use serde::{Serialize, Serializer};

use crate::mapping::OntoTuple;
use crate::ontology::{ElementKind, Object, Ontology, Orientation};
use crate::preprocess::LoadError;
use crate::semantic::{QueryTuple, QuestionClass, QuestionStructure};

/// Individuals satisfying a tuple, in ontology assertion order, plus the
/// values found at the far end of the relation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AnswerSet {
    pub individuals: Vec<String>,
    pub values: Vec<Object>,
}

impl AnswerSet {
    pub fn from_individuals(individuals: Vec<String>) -> Self {
        AnswerSet { individuals, values: Vec::new() }
    }

    fn push(&mut self, id: &str) {
        if !self.individuals.iter().any(|x| x == id) {
            self.individuals.push(id.to_string());
        }
    }

    fn push_value(&mut self, v: &Object) {
        if !self.values.contains(v) {
            self.values.push(v.clone());
        }
    }
}

pub fn evaluate_tuple(ont: &Ontology, t: &OntoTuple) -> AnswerSet {
    let pool: Vec<&str> = match &t.subject {
        Some(s) => vec![s.as_str()],
        None => ont
            .instances_of(&t.term1)
            .map(|v| v.iter().map(String::as_str).collect())
            .unwrap_or_default(),
    };
    let in_pool: HashSet<&str> = pool.iter().copied().collect();
    let mut out = AnswerSet::default();
    let Some(rel) = &t.relation else {
        for x in pool {
            out.push(x);
        }
        return out;
    };
    let p = rel.property.as_str();
    match (&t.term2, rel.orientation) {
        (None, Orientation::Forward) => {
            for x in pool {
                for o in ont.objects(x, p) {
                    out.push(x);
                    out.push_value(o);
                }
            }
        }
        (None, Orientation::Inverse) => {
            for x in pool {
                for s in ont.subjects(p, x) {
                    out.push(x);
                    out.push_value(&Object::Instance(s.clone()));
                }
            }
        }
        (Some(el), orientation) if el.kind == ElementKind::Instance => {
            let hits: Vec<&str> = match orientation {
                Orientation::Forward => ont.subjects(p, &el.id).iter().map(String::as_str).collect(),
                Orientation::Inverse => ont.objects(&el.id, p).iter().filter_map(Object::as_instance).collect(),
            };
            for x in hits {
                if in_pool.contains(x) {
                    out.push(x);
                }
            }
        }
        (Some(el), orientation) => {
            let targets: HashSet<&str> = ont
                .instances_of(&el.id)
                .map(|v| v.iter().map(String::as_str).collect())
                .unwrap_or_default();
            for a in ont.assertions().iter().filter(|a| a.property == p) {
                let Some(o) = a.object.as_instance() else { continue };
                let (x, target) = match orientation {
                    Orientation::Forward => (a.subject.as_str(), o),
                    Orientation::Inverse => (o, a.subject.as_str()),
                };
                if in_pool.contains(x) && targets.contains(target) {
                    out.push(x);
                    out.push_value(&Object::Instance(target.to_string()));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CombineError {
    #[error("{structure} takes exactly one result set, got {got}")]
    Arity { structure: QuestionStructure, got: usize },
    #[error("nothing to combine")]
    Empty,
}

/// And intersects, Or unites; order follows the first set.
pub fn combine(structure: QuestionStructure, sets: &[AnswerSet]) -> Result<AnswerSet, CombineError> {
    let Some(first) = sets.first() else {
        return Err(CombineError::Empty);
    };
    match structure {
        QuestionStructure::And => {
            let mut out = AnswerSet::default();
            for x in &first.individuals {
                if sets[1..].iter().all(|s| s.individuals.contains(x)) {
                    out.push(x);
                }
            }
            for v in sets.iter().flat_map(|s| &s.values) {
                out.push_value(v);
            }
            Ok(out)
        }
        QuestionStructure::Or => {
            let mut out = AnswerSet::default();
            for s in sets {
                for x in &s.individuals {
                    out.push(x);
                }
                for v in &s.values {
                    out.push_value(v);
                }
            }
            Ok(out)
        }
        _ if sets.len() == 1 => Ok(first.clone()),
        _ => Err(CombineError::Arity { structure, got: sets.len() }),
    }
}

/// Per-category answer templates: `key<TAB>template` with `{name}`
/// placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Templates {
    map: HashMap<String, String>,
}

impl Templates {
    pub fn load(source: &str) -> Result<Self, LoadError> {
        let mut map = HashMap::new();
        for (i, line) in source.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('\t').ok_or(LoadError::Malformed { line: i + 1 })?;
            map.insert(k.trim().to_string(), v.to_string());
        }
        Ok(Templates { map })
    }

    pub fn get<'a>(&'a self, key: &'a str) -> &'a str {
        self.map.get(key).map(String::as_str).unwrap_or(key)
    }

    pub fn fill(&self, key: &str, vars: &[(&str, &str)]) -> String {
        let mut s = self.get(key).to_string();
        for (k, v) in vars {
            s = s.replace(&format!("{{{k}}}"), v);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fact {
    pub property: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Count { count: usize, individuals: Vec<String> },
    Individuals(Vec<String>),
    Boolean(bool),
    Values(Vec<String>),
    Description { subject: String, facts: Vec<Fact> },
    Unsupported,
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Count { .. } => "count",
            Payload::Individuals(_) => "individuals",
            Payload::Boolean(_) => "boolean",
            Payload::Values(_) => "values",
            Payload::Description { .. } => "description",
            Payload::Unsupported => "unsupported",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TupleTrace {
    pub onto_tuple: String,
    pub matched: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub qclass: QuestionClass,
    pub structure: QuestionStructure,
    pub payload: Payload,
    pub rendered_text: String,
    pub trace: Vec<TupleTrace>,
    /// convenience copy of the count payload
    pub count: Option<usize>,
}

impl Answer {
    pub fn individuals(&self) -> &[String] {
        match &self.payload {
            Payload::Count { individuals, .. } | Payload::Individuals(individuals) => individuals,
            _ => &[],
        }
    }
}

#[derive(Serialize)]
struct AnswerJson<'a> {
    qclass: QuestionClass,
    structure: QuestionStructure,
    payload_kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    individuals: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    boolean: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subject: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    facts: Option<&'a [Fact]>,
    rendered_text: &'a str,
    trace: &'a [TupleTrace],
}

impl Serialize for Answer {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut j = AnswerJson {
            qclass: self.qclass,
            structure: self.structure,
            payload_kind: self.payload.kind(),
            count: None,
            individuals: None,
            values: None,
            boolean: None,
            subject: None,
            facts: None,
            rendered_text: &self.rendered_text,
            trace: &self.trace,
        };
        match &self.payload {
            Payload::Count { count, individuals } => {
                j.count = Some(*count);
                j.individuals = Some(individuals);
            }
            Payload::Individuals(v) => j.individuals = Some(v),
            Payload::Boolean(b) => j.boolean = Some(*b),
            Payload::Values(v) => j.values = Some(v),
            Payload::Description { subject, facts } => {
                j.subject = Some(subject);
                j.facts = Some(facts);
            }
            Payload::Unsupported => {}
        }
        j.serialize(ser)
    }
}

/// The phrase a count is about: term1 followed by each relation and term2.
fn count_phrase(structure: QuestionStructure, tuples: &[QueryTuple]) -> String {
    let joiner = if structure == QuestionStructure::Or { " hoặc " } else { " và " };
    let head = tuples.first().and_then(|t| t.term1.clone()).unwrap_or_default();
    let parts: Vec<String> = tuples
        .iter()
        .map(|t| {
            [t.relation.as_deref(), t.term2.as_deref()]
                .into_iter()
                .flatten()
                .collect::<Vec<_>>()
                .join(" ")
        })
        .filter(|p| !p.is_empty())
        .collect();
    if parts.is_empty() {
        head
    } else {
        format!("{head} {}", parts.join(joiner))
    }
}

fn lines(header: Option<String>, items: &[String], templates: &Templates) -> String {
    let mut out: Vec<String> = header.into_iter().collect();
    if items.is_empty() && out.is_empty() {
        return templates.get("empty").to_string();
    }
    out.extend(items.iter().cloned());
    out.join("\n")
}

fn describe(ont: &Ontology, t: &OntoTuple) -> (String, Vec<Fact>) {
    match &t.subject {
        Some(s) => {
            let mut facts = vec![Fact { property: "là".into(), value: t.term1.clone() }];
            facts.extend(ont.assertions_about(s).map(|a| Fact {
                property: a.property.clone(),
                value: a.object.as_str().to_string(),
            }));
            (s.clone(), facts)
        }
        None => {
            let facts = ont
                .instances_of(&t.term1)
                .unwrap_or_default()
                .iter()
                .map(|i| Fact { property: "có_cá_thể".into(), value: i.clone() })
                .collect();
            (t.term1.clone(), facts)
        }
    }
}

/// Chooses the payload for the question class and renders it.
pub fn render_answer(
    ont: &Ontology,
    templates: &Templates,
    structure: QuestionStructure,
    query: &[QueryTuple],
    onto: &[OntoTuple],
    result: &AnswerSet,
) -> Answer {
    let qclass = query.first().map(|t| t.qclass).unwrap_or(QuestionClass::Entity);
    let payload = if structure == QuestionStructure::Definition {
        match onto.first() {
            Some(t) => {
                let (subject, facts) = describe(ont, t);
                Payload::Description { subject, facts }
            }
            None => Payload::Unsupported,
        }
    } else {
        // When term1 is a named individual the question is about the other
        // end: `X có học vị là gì`, `X học lớp nào`.
        let asks_far_end = onto.iter().any(|t| {
            t.relation.is_some()
                && (t.term2.is_none() || (t.subject.is_some() && t.term2.as_ref().is_some_and(|e| e.kind == ElementKind::Concept)))
        });
        let found: Vec<String> = if asks_far_end {
            result.values.iter().map(|v| v.as_str().to_string()).collect()
        } else {
            result.individuals.clone()
        };
        match qclass {
            QuestionClass::Many | QuestionClass::ManyClass => Payload::Count {
                count: found.len(),
                individuals: found,
            },
            QuestionClass::Entity | QuestionClass::List | QuestionClass::Who if !asks_far_end => Payload::Individuals(found),
            QuestionClass::YesNo => Payload::Boolean(!result.individuals.is_empty()),
            QuestionClass::HowWhy => Payload::Unsupported,
            _ => Payload::Values(found),
        }
    };
    let rendered_text = match &payload {
        Payload::Count { count, individuals } => {
            let phrase = count_phrase(structure, query);
            let header = templates.fill("count", &[("phrase", &phrase), ("count", &count.to_string())]);
            lines(Some(header), individuals, templates)
        }
        Payload::Individuals(v) | Payload::Values(v) => lines(None, v, templates),
        Payload::Boolean(b) => templates.get(if *b { "yes" } else { "no" }).to_string(),
        Payload::Description { subject, facts } => {
            let items: Vec<String> = facts.iter().map(|f| format!("{}: {}", f.property, f.value)).collect();
            lines(Some(templates.fill("description", &[("subject", subject)])), &items, templates)
        }
        Payload::Unsupported => templates.get("unsupported").to_string(),
    };
    let count = match &payload {
        Payload::Count { count, .. } => Some(*count),
        _ => None,
    };
    let trace = onto
        .iter()
        .map(|t| TupleTrace {
            onto_tuple: t.to_string(),
            matched: evaluate_tuple(ont, t).individuals.len(),
        })
        .collect();
    Answer {
        qclass,
        structure,
        payload,
        rendered_text,
        trace,
        count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{Element, RelationCandidate};
    use crate::resources;

    fn ont() -> Ontology {
        Ontology::from_json(resources::ONTOLOGY).unwrap()
    }

    fn tuple(term1: &str, p: &str, o: Orientation, term2: Element) -> OntoTuple {
        OntoTuple {
            structure: QuestionStructure::Normal,
            qclass: QuestionClass::Entity,
            term1: term1.into(),
            subject: None,
            relation: Some(RelationCandidate { property: p.into(), orientation: o }),
            term2: Some(term2),
        }
    }

    const FIG5: [&str; 7] = [
        "nguyễn_văn_huy",
        "nguyễn_quốc_đạt",
        "nguyễn_quốc_đại",
        "nguyễn_bá_đạt",
        "nguyễn_trần_ngọc_linh",
        "trần_bình_giang",
        "phạm_đức_đăng",
    ];

    #[test]
    fn students_of_a_class() {
        let o = ont();
        let r = evaluate_tuple(&o, &tuple("sinh_viên", "học", Orientation::Forward, Element::instance("k50_khoa_học_máy_tính")));
        assert_eq!(r.individuals, FIG5);
        let inv = evaluate_tuple(
            &o,
            &tuple("sinh_viên", "có_sinh_viên_là", Orientation::Inverse, Element::instance("k50_khoa_học_máy_tính")),
        );
        assert_eq!(inv.individuals, FIG5);
    }

    #[test]
    fn and_of_class_and_hometown() {
        let o = ont();
        let a = evaluate_tuple(&o, &tuple("sinh_viên", "học", Orientation::Forward, Element::instance("k50_khoa_học_máy_tính")));
        let b = evaluate_tuple(&o, &tuple("sinh_viên", "có_quê_ở", Orientation::Forward, Element::instance("hà_nội")));
        assert_eq!(b.individuals.len(), 3);
        let both = combine(QuestionStructure::And, &[a, b]).unwrap();
        assert_eq!(both.individuals, ["nguyễn_quốc_đạt", "nguyễn_quốc_đại", "nguyễn_bá_đạt"]);
    }

    #[test]
    fn relation_without_assertions_is_empty() {
        let r = evaluate_tuple(&ont(), &tuple("sinh_viên", "có_lớp_trưởng_là", Orientation::Forward, Element::instance("nguyễn_văn_thanh")));
        assert!(r.individuals.is_empty());
    }

    #[test]
    fn combine_laws() {
        let s = |v: &[&str]| AnswerSet::from_individuals(v.iter().map(|x| x.to_string()).collect());
        assert_eq!(combine(QuestionStructure::Or, &[s(&["a"]), s(&["b"])]).unwrap(), s(&["a", "b"]));
        assert_eq!(combine(QuestionStructure::And, &[s(&["a"]), s(&[])]).unwrap(), s(&[]));
        assert!(matches!(
            combine(QuestionStructure::Normal, &[s(&["a"]), s(&["b"])]),
            Err(CombineError::Arity { .. })
        ));
        assert_eq!(combine(QuestionStructure::Normal, &[]), Err(CombineError::Empty));
    }

    #[test]
    fn count_rendering() {
        let o = ont();
        let t = Templates::load(resources::TEMPLATES).unwrap();
        let onto = tuple("sinh_viên", "học", Orientation::Forward, Element::instance("k50_khoa_học_máy_tính"));
        let q = QueryTuple {
            structure: QuestionStructure::Normal,
            qclass: QuestionClass::ManyClass,
            term1: Some("sinh viên".into()),
            relation: Some("học".into()),
            term2: Some("lớp k50 khoa học máy tính".into()),
            term3: None,
        };
        let r = evaluate_tuple(&o, &onto);
        let a = render_answer(&o, &t, QuestionStructure::Normal, &[q], &[onto], &r);
        let mut lines = a.rendered_text.lines();
        assert_eq!(lines.next(), Some("Số lượng sinh viên học lớp k50 khoa học máy tính bằng: 7"));
        assert_eq!(lines.collect::<Vec<_>>(), FIG5);
        assert_eq!(a.count, Some(7));
        let j = serde_json::to_value(&a).unwrap();
        assert_eq!(j["payload_kind"], "count");
        assert_eq!(j["individuals"].as_array().unwrap().len(), 7);
    }

    #[test]
    fn yes_no_rendering() {
        let o = ont();
        let t = Templates::load(resources::TEMPLATES).unwrap();
        let q = QueryTuple {
            structure: QuestionStructure::Normal,
            qclass: QuestionClass::YesNo,
            term1: Some("x".into()),
            relation: None,
            term2: None,
            term3: None,
        };
        let a = render_answer(&o, &t, QuestionStructure::Normal, &[q], &[], &AnswerSet::default());
        assert_eq!(a.rendered_text, "Sai");
        assert_eq!(a.payload, Payload::Boolean(false));
    }
}
