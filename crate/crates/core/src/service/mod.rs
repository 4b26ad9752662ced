//! Sessions around the [`Engine`], the HTTP API, and batch evaluation.
//!
//! A question that needs a choice from the user leaves a session behind; the
//! session id is what `/api/resolve` takes back. Sessions idle for longer than
//! the configured TTL are rejected, and the table is bounded with LRU
//! eviction.

pub mod config;
pub mod eval;
pub mod http;

use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::answer::Answer;
use crate::mapping::{DisambiguationRequest, MappingStep, PendingError, PendingTable, SuspendedMapping};
use crate::pipeline::{Engine, EngineError, Stage, Trace, MAX_QUESTION_CHARS};
use crate::text;

pub use config::{Config, ConfigError};
pub use eval::{run_eval, EvalMode, EvalRecord, EvalReport, EvalTotals, FailureStage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Answered,
    NeedsDisambiguation,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub stage: Stage,
    pub message: String,
}

/// Body of every `/api/ask` and `/api/resolve` reply.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Response {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer: Option<Answer>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disambiguation: Option<DisambiguationRequest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorBody>,
    pub trace: Trace,
}

impl Response {
    fn failed(e: &EngineError, trace: Trace) -> Self {
        Response {
            status: Status::Error,
            session_id: None,
            answer: None,
            disambiguation: None,
            error: Some(ErrorBody { stage: e.stage(), message: e.to_string() }),
            trace,
        }
    }
}

/// A request the service refuses before running anything.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RequestError {
    #[error("the question is empty")]
    EmptyQuestion,
    #[error("the question is longer than {MAX_QUESTION_CHARS} characters")]
    QuestionTooLong,
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("session `{0}` has expired")]
    SessionExpired(String),
    #[error("session `{0}` has no pending choice")]
    NoPendingChoice(String),
    #[error("choice {index} is out of range ({len} options)")]
    BadChoice { index: usize, len: usize },
}

impl From<PendingError> for RequestError {
    fn from(e: PendingError) -> Self {
        match e {
            PendingError::Unknown(t) => RequestError::UnknownSession(t),
            PendingError::Expired(t) => RequestError::SessionExpired(t),
            PendingError::IndexOutOfRange { index, len } => RequestError::BadChoice { index, len },
        }
    }
}

#[derive(Debug, Clone)]
struct Session {
    pending: Option<SuspendedMapping>,
    trace: Trace,
}

/// The engine plus the session table. Share it behind an `Arc`.
#[derive(Debug)]
pub struct Service {
    engine: Engine,
    sessions: Mutex<PendingTable<Session>>,
}

impl Service {
    pub fn new(engine: Engine, ttl: Duration, capacity: usize) -> Self {
        Service {
            engine,
            sessions: Mutex::new(PendingTable::new(ttl, capacity)),
        }
    }

    pub fn from_config(c: &Config) -> anyhow::Result<Self> {
        let engine = Engine::from_sources(&c.sources()?, c.mapping()?)?;
        Ok(Service::new(engine, c.session_ttl()?, c.session_capacity()?))
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    pub fn ask(&self, question: &str) -> Result<Response, RequestError> {
        self.ask_at(question, Instant::now())
    }

    pub fn ask_at(&self, question: &str, now: Instant) -> Result<Response, RequestError> {
        let q = text::clean_question(question);
        if q.is_empty() {
            return Err(RequestError::EmptyQuestion);
        }
        if q.chars().count() > MAX_QUESTION_CHARS {
            return Err(RequestError::QuestionTooLong);
        }
        let mut trace = match self.engine.annotate(&q) {
            Ok(set) => Trace::from_annotations(&set),
            Err(e) => return Ok(Response::failed(&e, Trace::default())),
        };
        let analysis = match self.engine.analyse(&q) {
            Ok(a) => a,
            Err(e) => return Ok(Response::failed(&e, trace)),
        };
        trace.ir = Some(analysis.ir.clone());
        let step = self.engine.map(&analysis.ir);
        let session = Session { pending: None, trace };
        Ok(self.settle(None, session, step, now))
    }

    pub fn resolve(&self, session_id: &str, choice: usize) -> Result<Response, RequestError> {
        self.resolve_at(session_id, choice, Instant::now())
    }

    pub fn resolve_at(&self, session_id: &str, choice: usize, now: Instant) -> Result<Response, RequestError> {
        // Copy the session out so the lock is not held while mapping.
        let session = self.sessions.lock().unwrap().with_at(session_id, now, |s| s.clone())?;
        let Some(pending) = &session.pending else {
            return Err(RequestError::NoPendingChoice(session_id.to_string()));
        };
        let step = self
            .engine
            .resume(pending, choice)
            .map_err(|e| RequestError::BadChoice { index: e.index, len: e.len })?;
        Ok(self.settle(Some(session_id), session, step, now))
    }

    /// Turns a mapping step into a reply, storing the session if the step
    /// still needs a choice and clearing its pending choice otherwise.
    fn settle(&self, id: Option<&str>, mut session: Session, step: MappingStep, now: Instant) -> Response {
        let mut table = self.sessions.lock().unwrap();
        match step {
            MappingStep::Suspended(mut s) => {
                let id = match id {
                    Some(id) => id.to_string(),
                    None => table.insert_at(session.clone(), now),
                };
                s.set_token(&id);
                session.pending = Some(s.clone());
                table.put_at(&id, session.clone(), now);
                Response {
                    status: Status::NeedsDisambiguation,
                    session_id: Some(id),
                    answer: None,
                    disambiguation: Some(s.request().clone()),
                    error: None,
                    trace: session.trace,
                }
            }
            MappingStep::Failed(f) => {
                let resp = Response::failed(&EngineError::Mapping(f), session.trace.clone());
                if let Some(id) = id {
                    session.pending = None;
                    table.put_at(id, session, now);
                }
                resp
            }
            MappingStep::Resolved(onto) => {
                drop(table);
                let ir = session.trace.ir.clone().expect("mapped questions have an IR");
                session.trace.onto_tuples = onto.iter().map(|t| t.to_string()).collect();
                let resp = match self.engine.extract(&ir, &onto) {
                    Ok(answer) => Response {
                        status: Status::Answered,
                        session_id: id.map(str::to_string),
                        answer: Some(answer),
                        disambiguation: None,
                        error: None,
                        trace: session.trace.clone(),
                    },
                    Err(e) => Response::failed(&e, session.trace.clone()),
                };
                if let Some(id) = id {
                    session.pending = None;
                    self.sessions.lock().unwrap().put_at(id, session, now);
                }
                resp
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn service() -> Service {
        Service::new(Engine::builtin().unwrap(), Duration::from_secs(600), 16)
    }

    const WHO: &str = "ai là sinh viên của lớp khoa học máy tính?";
    const TWICE: &str = "ai là sinh viên của lớp khoa học máy tính hoặc là sinh viên của lớp k50 hệ thống thông tin?";

    #[test]
    fn ask_answers_directly() {
        let s = service();
        let r = s.ask("có bao nhiêu sinh viên học lớp k50 khoa học máy tính?").unwrap();
        assert_eq!(r.status, Status::Answered);
        assert_eq!(r.answer.unwrap().count, Some(7));
        assert_eq!(r.session_id, None);
        assert_eq!(s.session_count(), 0);
        assert_eq!(r.trace.onto_tuples, ["(sinh_viên, học, k50_khoa_học_máy_tính)"]);
    }

    #[test]
    fn ambiguous_question_round_trip() {
        let s = service();
        let r = s.ask(WHO).unwrap();
        assert_eq!(r.status, Status::NeedsDisambiguation);
        let id = r.session_id.unwrap();
        let req = r.disambiguation.unwrap();
        assert!(req.options.len() >= 2);
        assert_eq!(req.token.as_deref(), Some(id.as_str()));
        assert_eq!(id.len(), 32);

        assert_eq!(s.resolve(&id, 99).unwrap_err(), RequestError::BadChoice { index: 99, len: req.options.len() });
        let done = s.resolve(&id, 0).unwrap();
        assert_eq!(done.status, Status::Answered);
        assert_eq!(done.answer.unwrap().individuals().len(), 7);
        assert_eq!(s.resolve(&id, 0).unwrap_err(), RequestError::NoPendingChoice(id));
    }

    #[test]
    fn second_ambiguity_keeps_the_session() {
        let s = service();
        let r = s.ask(TWICE).unwrap();
        let id = r.session_id.unwrap();
        let again = s.resolve(&id, 0).unwrap();
        assert_eq!(again.status, Status::NeedsDisambiguation);
        assert_eq!(again.session_id.as_deref(), Some(id.as_str()));
        assert_eq!(again.disambiguation.unwrap().slot.tuple, 1);
        assert_eq!(s.resolve(&id, 0).unwrap().status, Status::Answered);
    }

    #[test]
    fn sessions_expire() {
        let s = service();
        let t0 = Instant::now();
        let id = s.ask_at(WHO, t0).unwrap().session_id.unwrap();
        let late = t0 + Duration::from_secs(601);
        assert_eq!(s.resolve_at(&id, 0, late).unwrap_err(), RequestError::SessionExpired(id.clone()));
        assert_eq!(s.resolve_at(&id, 0, late).unwrap_err(), RequestError::UnknownSession(id));
    }

    #[test]
    fn request_and_pipeline_errors() {
        let s = service();
        assert_eq!(s.ask("   ").unwrap_err(), RequestError::EmptyQuestion);
        assert_eq!(s.ask(&"a".repeat(600)).unwrap_err(), RequestError::QuestionTooLong);
        let r = s.ask("sinh viên nào có quê ở Zzzz Qqqq?").unwrap();
        assert_eq!(r.status, Status::Error);
        assert_eq!(r.error.unwrap().stage, Stage::Mapping);
        assert!(r.trace.ir.is_some());
        let r = s.ask("bao nhiêu").unwrap();
        assert_eq!(r.error.unwrap().stage, Stage::Analysis);
    }
}
