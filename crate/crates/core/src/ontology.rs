//! A read-only ontology: a concept tree, typed properties, instances and
//! assertions, with the lookup indexes the mapper and answer extractor need.
//!
//! # File format
//!
//! UTF-8 JSON with four arrays (unknown keys such as `notes` or
//! `reconstructed` are ignored):
//!
//! ```json
//! {
//!   "concepts":   [{"id": "thing", "parent": null}, {"id": "person", "parent": "thing", "aliases": ["ai"]}],
//!   "properties": [{"id": "có_quê_ở", "domain": "person", "range": "quê", "inverse": "là_quê_của"}],
//!   "instances":  [{"id": "hà_nội", "concept": "quê"}],
//!   "assertions": [{"s": "nguyễn_văn_huy", "p": "có_quê_ở", "o": "hà_tây"},
//!                  {"s": "trần_văn_an", "p": "có_tên_là", "o": "Trần Văn An", "literal": true}]
//! }
//! ```
//!
//! Exactly one concept has a null parent; it is the root and is not counted
//! in [`Summary::concepts`]. A property with a null `range` takes literal
//! objects only. Inverse pairs must name each other, and every assertion over
//! one half of a pair is mirrored on load.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Concept,
    Property,
    Instance,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementKind::Concept => "concept",
            ElementKind::Property => "property",
            ElementKind::Instance => "instance",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    pub kind: ElementKind,
    pub id: String,
}

impl Element {
    pub fn concept(id: &str) -> Self {
        Element { kind: ElementKind::Concept, id: id.into() }
    }

    pub fn instance(id: &str) -> Self {
        Element { kind: ElementKind::Instance, id: id.into() }
    }

    pub fn property(id: &str) -> Self {
        Element { kind: ElementKind::Property, id: id.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationCandidate {
    pub property: String,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: String,
    pub parent: Option<String>,
    #[serde(default)]
    pub aliases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Property {
    pub id: String,
    pub domain: String,
    pub range: Option<String>,
    #[serde(default)]
    pub inverse: Option<String>,
    #[serde(default)]
    pub aliases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub id: String,
    pub concept: String,
    #[serde(default)]
    pub aliases: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Object {
    Instance(String),
    Literal(String),
}

impl Object {
    pub fn as_str(&self) -> &str {
        match self {
            Object::Instance(s) | Object::Literal(s) => s,
        }
    }

    pub fn as_instance(&self) -> Option<&str> {
        match self {
            Object::Instance(s) => Some(s),
            Object::Literal(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assertion {
    pub subject: String,
    pub property: String,
    pub object: Object,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OntologyError {
    #[error("malformed ontology file: {0}")]
    Format(String),
    #[error("no root concept (a concept with a null parent)")]
    NoRoot,
    #[error("more than one root concept: {0} and {1}")]
    MultipleRoots(String, String),
    #[error("name `{0}` is used by more than one element")]
    DuplicateName(String),
    #[error("{entry} refers to unknown {kind} `{reference}`")]
    Dangling {
        entry: String,
        kind: ElementKind,
        reference: String,
    },
    #[error("concept `{0}` is part of a cycle")]
    Cycle(String),
    #[error("assertion {subject} {property} {object}: {reason}")]
    DomainRange {
        subject: String,
        property: String,
        object: String,
        reason: String,
    },
    #[error("property `{0}` names an inverse that does not name it back")]
    AsymmetricInverse(String),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
}

#[derive(Deserialize)]
struct File {
    concepts: Vec<Concept>,
    #[serde(default)]
    properties: Vec<Property>,
    #[serde(default)]
    instances: Vec<Instance>,
    #[serde(default)]
    assertions: Vec<RawAssertion>,
}

#[derive(Deserialize)]
struct RawAssertion {
    s: String,
    p: String,
    o: String,
    #[serde(default)]
    literal: bool,
}

/// Element counts. The root concept is not included in `concepts`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub concepts: usize,
    pub properties: usize,
    pub instances: usize,
    pub assertions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConceptNode {
    pub id: String,
    pub instances: usize,
    pub children: Vec<ConceptNode>,
}

#[derive(Debug, Clone)]
pub struct Ontology {
    root: String,
    concepts: Vec<Concept>,
    properties: Vec<Property>,
    instances: Vec<Instance>,
    assertions: Vec<Assertion>,
    concept_idx: HashMap<String, usize>,
    property_idx: HashMap<String, usize>,
    instance_idx: HashMap<String, usize>,
    children: HashMap<String, Vec<String>>,
    names: BTreeMap<String, Element>,
    by_subject: HashMap<(String, String), Vec<Object>>,
    by_object: HashMap<(String, String), Vec<String>>,
    /// transitive, in instance declaration order
    members: HashMap<String, Vec<String>>,
}

/// Normalizes an element name: NFC, lowercase, trimmed, inner whitespace as `_`.
pub fn normalize_name(raw: &str) -> String {
    text::fold(raw).split_whitespace().collect::<Vec<_>>().join("_")
}

impl Ontology {
    pub fn from_json(source: &str) -> Result<Self, OntologyError> {
        let file: File = serde_json::from_str(source).map_err(|e| OntologyError::Format(e.to_string()))?;
        Self::build(file.concepts, file.properties, file.instances, file.assertions)
    }

    /// Builds an ontology from parts; literal objects are given as
    /// `(subject, property, object, is_literal)`.
    pub fn from_parts(
        concepts: Vec<Concept>,
        properties: Vec<Property>,
        instances: Vec<Instance>,
        assertions: Vec<(String, String, String, bool)>,
    ) -> Result<Self, OntologyError> {
        let raw = assertions
            .into_iter()
            .map(|(s, p, o, literal)| RawAssertion { s, p, o, literal })
            .collect();
        Self::build(concepts, properties, instances, raw)
    }

    fn build(
        concepts: Vec<Concept>,
        properties: Vec<Property>,
        instances: Vec<Instance>,
        raw: Vec<RawAssertion>,
    ) -> Result<Self, OntologyError> {
        let mut names: BTreeMap<String, Element> = BTreeMap::new();
        let mut claim = |name: &str, el: Element| -> Result<(), OntologyError> {
            let n = normalize_name(name);
            if names.insert(n.clone(), el).is_some() {
                return Err(OntologyError::DuplicateName(n));
            }
            Ok(())
        };
        let mut concept_idx = HashMap::new();
        for (i, c) in concepts.iter().enumerate() {
            concept_idx.insert(c.id.clone(), i);
            claim(&c.id, Element::concept(&c.id))?;
            for a in &c.aliases {
                claim(a, Element::concept(&c.id))?;
            }
        }
        let mut property_idx = HashMap::new();
        for (i, p) in properties.iter().enumerate() {
            property_idx.insert(p.id.clone(), i);
            claim(&p.id, Element::property(&p.id))?;
            for a in &p.aliases {
                claim(a, Element::property(&p.id))?;
            }
        }
        let mut instance_idx = HashMap::new();
        for (i, inst) in instances.iter().enumerate() {
            instance_idx.insert(inst.id.clone(), i);
            claim(&inst.id, Element::instance(&inst.id))?;
            for a in &inst.aliases {
                claim(a, Element::instance(&inst.id))?;
            }
        }

        let mut root: Option<String> = None;
        let mut children: HashMap<String, Vec<String>> = HashMap::new();
        for c in &concepts {
            match &c.parent {
                None => {
                    if let Some(r) = &root {
                        return Err(OntologyError::MultipleRoots(r.clone(), c.id.clone()));
                    }
                    root = Some(c.id.clone());
                }
                Some(p) => {
                    if !concept_idx.contains_key(p) {
                        return Err(dangling(&c.id, ElementKind::Concept, p));
                    }
                    children.entry(p.clone()).or_default().push(c.id.clone());
                }
            }
        }
        let root = root.ok_or(OntologyError::NoRoot)?;
        for c in &concepts {
            let mut cur = c;
            let mut steps = 0;
            while let Some(p) = &cur.parent {
                steps += 1;
                if steps > concepts.len() {
                    return Err(OntologyError::Cycle(c.id.clone()));
                }
                cur = &concepts[concept_idx[p]];
            }
        }

        for p in &properties {
            let label = format!("property {}", p.id);
            if !concept_idx.contains_key(&p.domain) {
                return Err(dangling(&label, ElementKind::Concept, &p.domain));
            }
            if let Some(r) = &p.range {
                if !concept_idx.contains_key(r) {
                    return Err(dangling(&label, ElementKind::Concept, r));
                }
            }
            if let Some(inv) = &p.inverse {
                let Some(&q) = property_idx.get(inv) else {
                    return Err(dangling(&label, ElementKind::Property, inv));
                };
                if properties[q].inverse.as_deref() != Some(p.id.as_str()) {
                    return Err(OntologyError::AsymmetricInverse(p.id.clone()));
                }
            }
        }
        for i in &instances {
            if !concept_idx.contains_key(&i.concept) {
                return Err(dangling(&format!("instance {}", i.id), ElementKind::Concept, &i.concept));
            }
        }

        let mut ont = Ontology {
            root,
            concepts,
            properties,
            instances,
            assertions: Vec::new(),
            concept_idx,
            property_idx,
            instance_idx,
            children,
            names,
            by_subject: HashMap::new(),
            by_object: HashMap::new(),
            members: HashMap::new(),
        };

        let mut assertions = Vec::with_capacity(raw.len());
        for r in raw {
            let a = ont.check_assertion(r)?;
            assertions.push(a);
        }
        // Mirror assertions over inverse pairs, keeping first-seen order.
        let mut seen: HashSet<Assertion> = assertions.iter().cloned().collect();
        let mut mirrored = Vec::new();
        for a in &assertions {
            let p = &ont.properties[ont.property_idx[&a.property]];
            if let (Some(inv), Object::Instance(o)) = (&p.inverse, &a.object) {
                let m = Assertion {
                    subject: o.clone(),
                    property: inv.clone(),
                    object: Object::Instance(a.subject.clone()),
                };
                if seen.insert(m.clone()) {
                    mirrored.push(m);
                }
            }
        }
        assertions.extend(mirrored);
        for a in &assertions {
            ont.by_subject
                .entry((a.subject.clone(), a.property.clone()))
                .or_default()
                .push(a.object.clone());
            if let Object::Instance(o) = &a.object {
                ont.by_object
                    .entry((a.property.clone(), o.clone()))
                    .or_default()
                    .push(a.subject.clone());
            }
        }
        ont.assertions = assertions;

        let mut members: HashMap<String, Vec<String>> = HashMap::new();
        for inst in &ont.instances {
            for c in ont.ancestors_or_self(&inst.concept) {
                members.entry(c.to_string()).or_default().push(inst.id.clone());
            }
        }
        ont.members = members;
        Ok(ont)
    }

    fn check_assertion(&self, r: RawAssertion) -> Result<Assertion, OntologyError> {
        let label = format!("assertion ({}, {}, {})", r.s, r.p, r.o);
        let Some(&si) = self.instance_idx.get(&r.s) else {
            return Err(dangling(&label, ElementKind::Instance, &r.s));
        };
        let Some(&pi) = self.property_idx.get(&r.p) else {
            return Err(dangling(&label, ElementKind::Property, &r.p));
        };
        let p = &self.properties[pi];
        let violation = |reason: String| OntologyError::DomainRange {
            subject: r.s.clone(),
            property: r.p.clone(),
            object: r.o.clone(),
            reason,
        };
        let sc = &self.instances[si].concept;
        if !self.is_descendant_or_self(sc, &p.domain) {
            return Err(violation(format!("subject is a {sc}, domain is {}", p.domain)));
        }
        let object = match (&p.range, r.literal) {
            (None, true) => Object::Literal(r.o.clone()),
            (None, false) => return Err(violation("property takes literal values".into())),
            (Some(_), true) => return Err(violation("property takes instances, not literals".into())),
            (Some(range), false) => {
                let Some(&oi) = self.instance_idx.get(&r.o) else {
                    return Err(dangling(&label, ElementKind::Instance, &r.o));
                };
                let oc = &self.instances[oi].concept;
                if !self.is_descendant_or_self(oc, range) {
                    return Err(violation(format!("object is a {oc}, range is {range}")));
                }
                Object::Instance(r.o.clone())
            }
        };
        Ok(Assertion {
            subject: r.s,
            property: r.p,
            object,
        })
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn summary(&self) -> Summary {
        Summary {
            concepts: self.concepts.len() - 1,
            properties: self.properties.len(),
            instances: self.instances.len(),
            assertions: self.assertions.len(),
        }
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn properties(&self) -> &[Property] {
        &self.properties
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    /// All assertions, declared ones first, then mirrored inverses.
    pub fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concept_idx.get(id).map(|&i| &self.concepts[i])
    }

    pub fn property(&self, id: &str) -> Option<&Property> {
        self.property_idx.get(id).map(|&i| &self.properties[i])
    }

    pub fn instance(&self, id: &str) -> Option<&Instance> {
        self.instance_idx.get(id).map(|&i| &self.instances[i])
    }

    pub fn concept_of(&self, instance: &str) -> Option<&str> {
        self.instance(instance).map(|i| i.concept.as_str())
    }

    /// Exact lookup over ids and aliases of every element.
    pub fn find_element_by_name(&self, name: &str) -> Option<&Element> {
        self.names.get(&normalize_name(name))
    }

    /// Every (normalized name, element) pair, sorted by name.
    pub fn names(&self) -> impl Iterator<Item = (&str, &Element)> {
        self.names.iter().map(|(n, e)| (n.as_str(), e))
    }

    pub fn children(&self, concept: &str) -> &[String] {
        self.children.get(concept).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `c` itself, then its parent, up to the root.
    pub fn ancestors_or_self<'a>(&'a self, concept: &'a str) -> Vec<&'a str> {
        let mut out = vec![concept];
        let mut cur = self.concept(concept);
        while let Some(p) = cur.and_then(|c| c.parent.as_deref()) {
            out.push(p);
            cur = self.concept(p);
        }
        out
    }

    pub fn is_descendant_or_self(&self, concept: &str, ancestor: &str) -> bool {
        self.ancestors_or_self(concept).contains(&ancestor)
    }

    /// Instances of `concept` and all its descendants, in declaration order.
    pub fn instances_of(&self, concept: &str) -> Result<&[String], OntologyError> {
        if !self.concept_idx.contains_key(concept) {
            return Err(OntologyError::UnknownConcept(concept.to_string()));
        }
        Ok(self.members.get(concept).map(Vec::as_slice).unwrap_or(&[]))
    }

    /// Objects `o` with `(subject, property, o)` asserted.
    pub fn objects(&self, subject: &str, property: &str) -> &[Object] {
        self.by_subject
            .get(&(subject.to_string(), property.to_string()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Subjects `s` with `(s, property, object)` asserted, object an instance.
    pub fn subjects(&self, property: &str, object: &str) -> &[String] {
        self.by_object
            .get(&(property.to_string(), object.to_string()))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Assertions whose subject is `instance`.
    pub fn assertions_about<'a>(&'a self, instance: &'a str) -> impl Iterator<Item = &'a Assertion> + 'a {
        self.assertions.iter().filter(move |a| a.subject == instance)
    }

    /// Whether a term element can stand where `slot` is expected. Concepts
    /// fit anywhere along the same branch of the tree; instances must belong
    /// to `slot`.
    fn fits(&self, el: &Element, slot: &str) -> bool {
        match el.kind {
            ElementKind::Concept => {
                self.is_descendant_or_self(&el.id, slot) || self.is_descendant_or_self(slot, &el.id)
            }
            ElementKind::Instance => self
                .concept_of(&el.id)
                .is_some_and(|c| self.is_descendant_or_self(c, slot)),
            ElementKind::Property => false,
        }
    }

    /// For an instance endpoint, whether it actually takes part in `p` at the
    /// given end. Concepts always do.
    fn touches(&self, el: &Element, p: &str, as_subject: bool) -> bool {
        if el.kind != ElementKind::Instance {
            return true;
        }
        if as_subject {
            !self.objects(&el.id, p).is_empty()
        } else {
            !self.subjects(p, &el.id).is_empty()
        }
    }

    /// Properties that can link `a` to `b`, in either direction. `Forward`
    /// means `a` is on the domain side.
    pub fn relations_between(&self, a: &Element, b: &Element) -> Vec<RelationCandidate> {
        let mut out = Vec::new();
        for p in &self.properties {
            let Some(range) = &p.range else { continue };
            if self.fits(a, &p.domain) && self.fits(b, range) && self.touches(a, &p.id, true) && self.touches(b, &p.id, false) {
                out.push(RelationCandidate { property: p.id.clone(), orientation: Orientation::Forward });
            }
            if self.fits(a, range) && self.fits(b, &p.domain) && self.touches(a, &p.id, false) && self.touches(b, &p.id, true) {
                out.push(RelationCandidate { property: p.id.clone(), orientation: Orientation::Inverse });
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Properties `a` can take part in, for questions that ask for the value
    /// at the other end.
    pub fn relations_of(&self, a: &Element) -> Vec<RelationCandidate> {
        let mut out = Vec::new();
        for p in &self.properties {
            if self.fits(a, &p.domain) && self.touches(a, &p.id, true) {
                out.push(RelationCandidate { property: p.id.clone(), orientation: Orientation::Forward });
            }
            if let Some(range) = &p.range {
                if self.fits(a, range) && self.touches(a, &p.id, false) {
                    out.push(RelationCandidate { property: p.id.clone(), orientation: Orientation::Inverse });
                }
            }
        }
        out.sort();
        out
    }

    pub fn concept_tree(&self) -> ConceptNode {
        self.node(&self.root)
    }

    fn node(&self, id: &str) -> ConceptNode {
        ConceptNode {
            id: id.to_string(),
            instances: self.instances.iter().filter(|i| i.concept == id).count(),
            children: self.children(id).iter().map(|c| self.node(c)).collect(),
        }
    }
}

fn dangling(entry: &str, kind: ElementKind, reference: &str) -> OntologyError {
    OntologyError::Dangling {
        entry: entry.to_string(),
        kind,
        reference: reference.to_string(),
    }
}
