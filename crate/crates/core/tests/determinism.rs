//! Same question, same bytes; and the IR in a trace is enough to get the
//! answer back.

mod common;

use common::*;
use vnqa::mapping::MappingStep;
use vnqa::semantic::IntermediateRepresentation;
use vnqa::service::Status;

#[test]
fn two_runs_give_identical_traces() {
    let (a, b) = (fresh_service(), fresh_service());
    for q in corpus_questions() {
        assert_eq!(pipeline_fingerprint(&a, &q), pipeline_fingerprint(&b, &q), "{q}");
        // and again on the same instance
        assert_eq!(pipeline_fingerprint(&a, &q), pipeline_fingerprint(&b, &q), "{q}");
    }
}

#[test]
fn trace_ir_round_trips() {
    let svc = fresh_service();
    let engine = svc.engine();
    let mut answered = 0;
    for q in corpus_questions() {
        let mut r = svc.ask(&q).unwrap();
        while r.status == Status::NeedsDisambiguation {
            r = svc.resolve(r.session_id.as_deref().unwrap(), 0).unwrap();
        }
        if r.status != Status::Answered {
            continue;
        }
        answered += 1;
        let json = serde_json::to_string(&r.trace.ir).unwrap();
        let ir: IntermediateRepresentation = serde_json::from_str(&json).unwrap();
        let mut step = engine.map(&ir);
        let onto = loop {
            match step {
                MappingStep::Resolved(t) => break t,
                MappingStep::Suspended(s) => step = engine.resume(&s, 0).unwrap(),
                MappingStep::Failed(f) => panic!("{q}: {f}"),
            }
        };
        let again = engine.extract(&ir, &onto).unwrap();
        assert_eq!(serde_json::to_value(&again).unwrap(), serde_json::to_value(r.answer.as_ref().unwrap()).unwrap(), "{q}");
        assert_eq!(r.trace.onto_tuples, onto.iter().map(|t| t.to_string()).collect::<Vec<_>>());
    }
    assert!(answered >= 20);
}
