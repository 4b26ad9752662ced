//! The worked examples end to end through the library.

mod common;

use std::collections::BTreeSet;

use vnqa::annotation::kinds;
use vnqa::semantic::{QueryTuple, QuestionClass, QuestionStructure};
use vnqa::Engine;

const FIG5: [&str; 7] = [
    "nguyễn_văn_huy",
    "nguyễn_quốc_đạt",
    "nguyễn_quốc_đại",
    "nguyễn_bá_đạt",
    "nguyễn_trần_ngọc_linh",
    "trần_bình_giang",
    "phạm_đức_đăng",
];

fn tuple(qclass: QuestionClass, t1: &str, rel: &str, t2: &str) -> QueryTuple {
    QueryTuple {
        structure: QuestionStructure::Normal,
        qclass,
        term1: Some(t1.into()),
        relation: Some(rel.into()),
        term2: Some(t2.into()),
        term3: None,
    }
}

fn set(v: &[String]) -> BTreeSet<&str> {
    v.iter().map(String::as_str).collect()
}

#[test]
fn counting_question() {
    let e = Engine::builtin().unwrap();
    let r = e.ask_auto("có bao nhiêu sinh viên học lớp k50 khoa học máy tính?").unwrap();
    assert_eq!(r.analysis.ir.structure, QuestionStructure::Normal);
    assert_eq!(
        r.analysis.ir.tuples,
        [tuple(QuestionClass::ManyClass, "sinh viên", "học", "lớp k50 khoa học máy tính")]
    );
    assert_eq!(r.onto_tuples[0].to_string(), "(sinh_viên, học, k50_khoa_học_máy_tính)");
    assert_eq!(r.answer.count, Some(7));
    assert_eq!(set(r.answer.individuals()), FIG5.into_iter().collect());
    assert!(r.answer.rendered_text.starts_with("Số lượng sinh viên học lớp k50 khoa học máy tính bằng: 7"));
    assert!(r.interactions.is_empty());
}

#[test]
fn and_question() {
    let e = Engine::builtin().unwrap();
    let r = e.ask_auto("sinh viên nào học lớp k50 khoa học máy tính và có quê ở Hà Nội?").unwrap();
    assert_eq!(r.analysis.ir.structure, QuestionStructure::And);
    let printed: Vec<String> = r.onto_tuples.iter().map(|t| t.to_string()).collect();
    assert_eq!(printed, ["(sinh_viên, học, k50_khoa_học_máy_tính)", "(sinh_viên, có_quê_ở, hà_nội)"]);
    assert_eq!(set(r.answer.individuals()), BTreeSet::from(["nguyễn_quốc_đạt", "nguyễn_quốc_đại", "nguyễn_bá_đạt"]));
    assert_eq!(r.answer.qclass, QuestionClass::Entity);
}

#[test]
fn relation_phrase_extraction() {
    let e = Engine::builtin().unwrap();
    let set = e.annotate("ai là sinh viên của lớp khoa học máy tính?").unwrap();
    let rel: Vec<&str> = set.of_kind(kinds::RELATION).map(|a| set.covered_text(a.span)).collect();
    let nps: Vec<&str> = set.of_kind(kinds::NOUN_PHRASE).map(|a| set.covered_text(a.span)).collect();
    assert_eq!(rel, ["là sinh viên của"]);
    assert!(nps.contains(&"lớp khoa học máy tính"), "{nps:?}");
}

#[test]
fn composite_list_question() {
    let e = Engine::builtin().unwrap();
    let a = e.analyse("Danh sách tất cả các sinh viên có quê ở Hà Tây mà học lớp khoa học máy tính?").unwrap();
    assert_eq!(a.ir.structure, QuestionStructure::And);
    assert_eq!(
        a.ir.tuples,
        [
            tuple(QuestionClass::List, "sinh viên", "có quê ở", "Hà Tây"),
            tuple(QuestionClass::List, "sinh viên", "học", "lớp khoa học máy tính"),
        ]
    );
}

#[test]
fn who_question_asks_then_answers() {
    let e = Engine::builtin().unwrap();
    let r = e.ask_auto("ai là sinh viên của lớp khoa học máy tính?").unwrap();
    assert_eq!(r.interactions.len(), 1);
    assert!(r.interactions[0].options.len() >= 2);
    assert_eq!(set(r.answer.individuals()), FIG5.into_iter().collect());
}

#[test]
fn golden_questions_in_the_corpus() {
    // 4/4 IR-correct, at least 3/4 answered without interaction
    let e = Engine::builtin().unwrap();
    assert_eq!(common::corpus_questions().len(), 30);
    let corpus: String = vnqa::resources::CORPUS
        .lines()
        .filter(|l| !l.starts_with('#'))
        .take(4)
        .map(|l| format!("{l}\n"))
        .collect();
    let r = vnqa::service::run_eval(&e, &corpus, &vnqa::service::EvalMode::Auto);
    assert_eq!(r.totals.ir_correct, 4);
    assert!(r.totals.no_interaction >= 3);
    assert_eq!(r.totals.answered, 4);
}
