//! Independent oracles and generators shared by the property tests and the
//! acceptance target. Nothing here calls the code it checks.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestError, TestRunner};

use vnqa::annotation::{apply_rules, Action, AnnotationSet, Constraint, Features, Quantifier, Rule, RuleElement, Span};
use vnqa::answer::{combine, evaluate_tuple, AnswerSet};
use vnqa::mapping::{levenshtein_ratio, similarity, OntoTuple};
use vnqa::ontology::{Concept, Element, ElementKind, Instance, Object, Ontology, Orientation, Property, RelationCandidate};
use vnqa::semantic::{QuestionClass, QuestionStructure};

pub const CATEGORIES: [&str; 3] = ["A", "B", "C"];
pub const TOKEN: &str = "Tok";
pub const OUT: &str = "Out";

/// Runs a property with `cases` cases and a fixed seed. `Err` carries the
/// minimal failing input.
pub fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases,
        failure_persistence: None,
        rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| match e {
        TestError::Fail(why, input) => format!("{why} for {input:?}"),
        TestError::Abort(why) => format!("aborted: {why}"),
    })
}

// ---- pattern engine ----

/// One rule as (quantifier, allowed categories) per element.
pub type RuleSpec = Vec<(Quantifier, Vec<usize>)>;

#[derive(Debug, Clone)]
pub struct PatternCase {
    pub tokens: Vec<usize>,
    pub rules: Vec<RuleSpec>,
}

fn quantifier() -> impl Strategy<Value = Quantifier> {
    prop_oneof![Just(Quantifier::One), Just(Quantifier::Optional), Just(Quantifier::OneOrMore)]
}

fn rule_spec() -> impl Strategy<Value = RuleSpec> {
    prop::collection::vec((quantifier(), prop::collection::btree_set(0..3usize, 1..=2)), 1..=5).prop_map(|els| {
        let mut els: RuleSpec = els.into_iter().map(|(q, alts)| (q, alts.into_iter().collect())).collect();
        if els.iter().all(|(q, _)| *q == Quantifier::Optional) {
            els[0].0 = Quantifier::One;
        }
        els
    })
}

/// Token sequences of up to 10 tokens and one or two rules of up to 5
/// elements, all at the same priority.
pub fn pattern_case() -> impl Strategy<Value = PatternCase> {
    (prop::collection::vec(0..3usize, 0..=10), prop::collection::vec(rule_spec(), 1..=2))
        .prop_map(|(tokens, rules)| PatternCase { tokens, rules })
}

/// Text `t0 t1 ...` with one `Tok` annotation per word; returns the set and
/// the char span of every token.
pub fn token_set(tokens: &[usize]) -> (AnnotationSet, Vec<Span>) {
    let words: Vec<String> = (0..tokens.len()).map(|i| format!("t{i}")).collect();
    let mut set = AnnotationSet::new(&words.join(" "));
    let mut spans = Vec::new();
    let mut pos = 0;
    for (w, &c) in words.iter().zip(tokens) {
        let span = Span::new(pos, pos + w.chars().count());
        let mut f = Features::new();
        f.insert("category".into(), CATEGORIES[c].into());
        set.add(TOKEN, span, f);
        spans.push(span);
        pos = span.end + 1;
    }
    (set, spans)
}

pub fn build_rules(specs: &[RuleSpec]) -> Vec<Rule> {
    specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let elements = spec
                .iter()
                .map(|(q, alts)| {
                    RuleElement::new(*q, alts.iter().map(|&c| Constraint::kind(TOKEN).with("category", CATEGORIES[c])).collect())
                })
                .collect();
            Rule::new(&format!("r{i}"), 1, elements, Action { kind: OUT.into(), features: Vec::new() }).unwrap()
        })
        .collect()
}

/// Every way of splitting `len` tokens into one count per element that the
/// quantifiers allow.
fn count_vectors(spec: &RuleSpec, len: usize) -> Vec<Vec<usize>> {
    let mut all = vec![Vec::new()];
    for (q, _) in spec {
        let range: Vec<usize> = match q {
            Quantifier::One => vec![1],
            Quantifier::Optional => vec![0, 1],
            Quantifier::OneOrMore => (1..=len).collect(),
        };
        all = all
            .into_iter()
            .flat_map(|v| {
                range.iter().map(move |&n| {
                    let mut v = v.clone();
                    v.push(n);
                    v
                })
            })
            .collect();
    }
    all.retain(|v| v.iter().sum::<usize>() == len);
    all
}

fn spec_matches(spec: &RuleSpec, seq: &[usize]) -> bool {
    count_vectors(spec, seq.len()).iter().any(|counts| {
        let mut at = 0;
        counts.iter().zip(spec).all(|(&n, (_, alts))| {
            let ok = seq[at..at + n].iter().all(|c| alts.contains(c));
            at += n;
            ok
        })
    })
}

/// Leftmost-longest over the token sequence: at each start the longest match
/// of any rule wins, ties to the earlier rule, and scanning resumes after it.
/// Returns (rule, first token, end token).
pub fn brute_force_matches(tokens: &[usize], rules: &[RuleSpec]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut best: Option<(usize, usize)> = None;
        for (ri, spec) in rules.iter().enumerate() {
            if let Some(j) = (i + 1..=tokens.len()).rev().find(|&j| spec_matches(spec, &tokens[i..j])) {
                if best.is_none_or(|(_, e)| j > e) {
                    best = Some((ri, j));
                }
            }
        }
        match best {
            Some((ri, j)) => {
                out.push((ri, i, j));
                i = j;
            }
            None => i += 1,
        }
    }
    out
}

/// What the engine emits for the case, in the oracle's terms.
pub fn engine_matches(case: &PatternCase) -> Vec<(usize, usize, usize)> {
    let (set, spans) = token_set(&case.tokens);
    let out = apply_rules(&build_rules(&case.rules), &set);
    let index = |pos: usize, f: fn(&Span) -> usize| spans.iter().position(|s| f(s) == pos).expect("match on token bounds");
    let mut found: Vec<(usize, usize, usize)> = out
        .of_kind(OUT)
        .map(|a| {
            let rule: usize = a.feature("rule").unwrap()[1..].parse().unwrap();
            (rule, index(a.span.start, |s| s.start), index(a.span.end, |s| s.end) + 1)
        })
        .collect();
    found.sort_by_key(|m| m.1);
    found
}

pub fn pattern_oracle_property(case: PatternCase) -> Result<(), TestCaseError> {
    let want = brute_force_matches(&case.tokens, &case.rules);
    let got = engine_matches(&case);
    prop_assert_eq!(got, want);
    Ok(())
}

// ---- similarity ----

/// Textbook dynamic-programming edit distance over chars.
pub fn dp_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

pub fn dp_ratio(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        1.0
    } else {
        1.0 - dp_levenshtein(a, b) as f64 / longest as f64
    }
}

/// Short strings over a small alphabet with Vietnamese letters, so that
/// collisions and near-misses are common.
pub fn short_string() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!['a', 'ă', 'â', 'đ', 'd', 'ạ', 't', 'n', '_']), 0..=8)
        .prop_map(|v| v.into_iter().collect())
}

pub fn similarity_property((a, b): (String, String)) -> Result<(), TestCaseError> {
    let s = similarity(&a, &b);
    prop_assert!((0.0..=1.0).contains(&s));
    prop_assert_eq!(s.to_bits(), similarity(&b, &a).to_bits());
    prop_assert_eq!(similarity(&a, &a), 1.0);
    prop_assert_eq!(s == 1.0, a == b);
    prop_assert_eq!(levenshtein_ratio(&a, &b), dp_ratio(&a, &b));
    Ok(())
}

// ---- ontology ----

#[derive(Debug, Clone)]
pub struct OntologyCase {
    /// parent index of concept i + 1; concept 0 is the root
    pub parents: Vec<usize>,
    pub instance_concepts: Vec<usize>,
    /// (subject, property, object) indexes; property 2 takes literals
    pub assertions: Vec<(usize, usize, usize)>,
}

pub fn ontology_case() -> impl Strategy<Value = OntologyCase> {
    (1..8usize, 1..12usize).prop_flat_map(|(nc, ni)| {
        let parents = (1..=nc).map(|i| 0..i).collect::<Vec<_>>();
        let concepts = prop::collection::vec(0..=nc, ni);
        let assertions = prop::collection::btree_set((0..ni, 0..3usize, 0..ni), 0..25);
        (parents, concepts, assertions).prop_map(|(parents, instance_concepts, a)| OntologyCase {
            parents,
            instance_concepts,
            assertions: a.into_iter().collect(),
        })
    })
}

/// Builds the case: `p0` any-to-any, `p1` with inverse `p1_inv`, `p2` to
/// literals.
pub fn build_ontology(c: &OntologyCase) -> Ontology {
    let mut concepts = vec![Concept { id: "c0".into(), parent: None, aliases: vec![] }];
    for (i, p) in c.parents.iter().enumerate() {
        concepts.push(Concept { id: format!("c{}", i + 1), parent: Some(format!("c{p}")), aliases: vec![] });
    }
    let prop = |id: &str, range: Option<&str>, inverse: Option<&str>| Property {
        id: id.into(),
        domain: "c0".into(),
        range: range.map(str::to_string),
        inverse: inverse.map(str::to_string),
        aliases: vec![],
    };
    let properties = vec![
        prop("p0", Some("c0"), None),
        prop("p1", Some("c0"), Some("p1_inv")),
        prop("p1_inv", Some("c0"), Some("p1")),
        prop("p2", None, None),
    ];
    let instances = c
        .instance_concepts
        .iter()
        .enumerate()
        .map(|(i, k)| Instance { id: format!("i{i}"), concept: format!("c{k}"), aliases: vec![] })
        .collect();
    let assertions = c
        .assertions
        .iter()
        .map(|&(s, p, o)| match p {
            2 => (format!("i{s}"), "p2".to_string(), format!("value {o}"), true),
            _ => (format!("i{s}"), format!("p{p}"), format!("i{o}"), false),
        })
        .collect();
    Ontology::from_parts(concepts, properties, instances, assertions).expect("generated ontology is valid")
}

/// Walks parent links from `concept` upward.
pub fn scan_is_under(ont: &Ontology, concept: &str, ancestor: &str) -> bool {
    let mut cur = Some(concept.to_string());
    while let Some(c) = cur {
        if c == ancestor {
            return true;
        }
        cur = ont.concepts().iter().find(|k| k.id == c).and_then(|k| k.parent.clone());
    }
    false
}

pub fn scan_instances_of(ont: &Ontology, concept: &str) -> Vec<String> {
    ont.instances().iter().filter(|i| scan_is_under(ont, &i.concept, concept)).map(|i| i.id.clone()).collect()
}

pub fn ontology_index_property(case: OntologyCase) -> Result<(), TestCaseError> {
    let ont = build_ontology(&case);
    for c in ont.concepts() {
        prop_assert_eq!(ont.instances_of(&c.id).unwrap().to_vec(), scan_instances_of(&ont, &c.id));
    }
    for i in ont.instances() {
        for p in ont.properties() {
            let scan: Vec<Object> = ont
                .assertions()
                .iter()
                .filter(|a| a.subject == i.id && a.property == p.id)
                .map(|a| a.object.clone())
                .collect();
            prop_assert_eq!(ont.objects(&i.id, &p.id).to_vec(), scan);
            let scan: Vec<String> = ont
                .assertions()
                .iter()
                .filter(|a| a.property == p.id && a.object == Object::Instance(i.id.clone()))
                .map(|a| a.subject.clone())
                .collect();
            prop_assert_eq!(ont.subjects(&p.id, &i.id).to_vec(), scan);
        }
    }
    // inverse assertions are mirrored both ways
    for a in ont.assertions().iter().filter(|a| a.property == "p1") {
        let o = a.object.as_instance().unwrap();
        prop_assert!(ont.objects(o, "p1_inv").contains(&Object::Instance(a.subject.clone())));
    }
    Ok(())
}

/// Tuples over the bundled ontology: any concept, relation and orientation,
/// optional named subject, and a term2 that may be absent, a concept or an
/// instance.
pub fn fixture_tuple(ont: &Ontology) -> impl Strategy<Value = OntoTuple> {
    let concepts: Vec<String> = ont.concepts().iter().map(|c| c.id.clone()).collect();
    let props: Vec<String> = ont.properties().iter().map(|p| p.id.clone()).collect();
    let instances: Vec<String> = ont.instances().iter().map(|i| i.id.clone()).collect();
    let term2 = prop_oneof![
        Just(None),
        prop::sample::select(concepts.clone()).prop_map(|c| Some(Element::concept(&c))),
        prop::sample::select(instances.clone()).prop_map(|i| Some(Element::instance(&i))),
    ];
    let relation = prop::option::weighted(
        0.9,
        (prop::sample::select(props), prop_oneof![Just(Orientation::Forward), Just(Orientation::Inverse)])
            .prop_map(|(property, orientation)| RelationCandidate { property, orientation }),
    );
    let subject = prop::option::weighted(0.3, prop::sample::select(instances));
    let owner: std::collections::HashMap<String, String> =
        ont.instances().iter().map(|i| (i.id.clone(), i.concept.clone())).collect();
    (prop::sample::select(concepts), subject, relation, term2).prop_map(move |(term1, subject, relation, term2)| OntoTuple {
        structure: QuestionStructure::Normal,
        qclass: QuestionClass::Entity,
        // a named subject stands in for its own concept, as after mapping
        term1: subject.as_ref().map(|s| owner[s].clone()).unwrap_or(term1),
        subject,
        relation,
        term2,
    })
}

/// The individuals a tuple should yield, by a pass over every assertion.
pub fn scan_evaluate(ont: &Ontology, t: &OntoTuple) -> BTreeSet<String> {
    let pool: Vec<String> = match &t.subject {
        Some(s) => vec![s.clone()],
        None => scan_instances_of(ont, &t.term1),
    };
    let Some(rel) = &t.relation else {
        return pool.into_iter().collect();
    };
    let concept_of = |i: &str| ont.instances().iter().find(|x| x.id == i).map(|x| x.concept.clone());
    let fits = |target: &str| match &t.term2 {
        None => true,
        Some(e) if e.kind == ElementKind::Instance => e.id == target,
        Some(e) => concept_of(target).is_some_and(|c| scan_is_under(ont, &c, &e.id)),
    };
    let mut out = BTreeSet::new();
    for a in ont.assertions().iter().filter(|a| a.property == rel.property) {
        let (x, target) = match (rel.orientation, &a.object) {
            (Orientation::Forward, Object::Instance(o)) => (a.subject.clone(), o.clone()),
            (Orientation::Forward, Object::Literal(v)) => {
                // a literal only satisfies a tuple with no term2
                if t.term2.is_some() {
                    continue;
                }
                (a.subject.clone(), v.clone())
            }
            (Orientation::Inverse, Object::Instance(o)) => (o.clone(), a.subject.clone()),
            (Orientation::Inverse, Object::Literal(_)) => continue,
        };
        if pool.contains(&x) && (t.term2.is_none() || fits(&target)) {
            out.insert(x);
        }
    }
    out
}

pub fn evaluate_scan_property(ont: &Ontology, t: OntoTuple) -> Result<(), TestCaseError> {
    let got = evaluate_tuple(ont, &t);
    let set: BTreeSet<String> = got.individuals.iter().cloned().collect();
    prop_assert_eq!(set.len(), got.individuals.len(), "no duplicates");
    prop_assert_eq!(&set, &scan_evaluate(ont, &t));
    let universe: HashSet<String> = scan_instances_of(ont, &t.term1).into_iter().collect();
    prop_assert!(set.iter().all(|x| universe.contains(x)), "answers lie within term1");
    Ok(())
}

// ---- combine ----

pub fn answer_sets() -> impl Strategy<Value = Vec<AnswerSet>> {
    let one = prop::collection::btree_set(0..12usize, 0..8).prop_map(|s| {
        AnswerSet::from_individuals(s.into_iter().map(|i| format!("x{i}")).collect())
    });
    prop::collection::vec(one, 1..5)
}

pub fn combine_property(sets: Vec<AnswerSet>) -> Result<(), TestCaseError> {
    let as_set = |s: &AnswerSet| s.individuals.iter().cloned().collect::<BTreeSet<_>>();
    let and = as_set(&combine(QuestionStructure::And, &sets).unwrap());
    let or = as_set(&combine(QuestionStructure::Or, &sets).unwrap());
    for s in &sets {
        prop_assert!(and.is_subset(&as_set(s)));
        prop_assert!(or.is_superset(&as_set(s)));
    }
    prop_assert!(and.is_subset(&or));
    let inter = sets.iter().skip(1).fold(as_set(&sets[0]), |acc, s| acc.intersection(&as_set(s)).cloned().collect());
    let union: BTreeSet<String> = sets.iter().flat_map(as_set).collect();
    prop_assert_eq!(and, inter);
    prop_assert_eq!(or, union);
    let single = combine(QuestionStructure::And, &sets[..1]).unwrap();
    prop_assert_eq!(&single, &sets[0]);
    Ok(())
}

// ---- pipeline ----

/// Everything observable about a question, as JSON text: the full trace and
/// the answer or error, with every choice taken as option 0.
pub fn pipeline_fingerprint(service: &vnqa::service::Service, question: &str) -> String {
    let mut r = service.ask(question).expect("corpus questions are valid requests");
    let mut steps = Vec::new();
    while r.status == vnqa::service::Status::NeedsDisambiguation {
        steps.push(serde_json::to_value(&r.disambiguation).unwrap());
        let id = r.session_id.clone().unwrap();
        r = service.resolve(&id, 0).unwrap();
    }
    let v = serde_json::json!({
        "status": r.status,
        "answer": r.answer,
        "error": r.error,
        "trace": r.trace,
        "asked": steps.iter().map(|s| {
            let mut s = s.clone();
            s.as_object_mut().unwrap().remove("token");
            s
        }).collect::<Vec<_>>(),
    });
    serde_json::to_string(&v).unwrap()
}

pub fn corpus_questions() -> Vec<String> {
    vnqa::resources::CORPUS
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split('\t').next().unwrap().to_string())
        .collect()
}

pub fn fresh_service() -> vnqa::service::Service {
    vnqa::service::Service::new(vnqa::Engine::builtin().unwrap(), std::time::Duration::from_secs(600), 1024)
}

/// Counts of what an answer JSON lists, for assertions in tests.
pub fn names(v: &serde_json::Value, field: &str) -> BTreeSet<String> {
    v[field].as_array().map(|a| a.iter().map(|x| x.as_str().unwrap().to_string()).collect()).unwrap_or_default()
}
