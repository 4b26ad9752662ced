//! Batch evaluation over a question corpus.
//!
//! Corpus lines are `question<TAB>expected IR<TAB>expected answer`, both
//! expectations optional JSON; blank lines and `#` comments are skipped. The
//! expected IR is compared slot by slot after folding case and diacritic
//! composition. The expected answer is an object whose fields are compared
//! with the same fields of the answer JSON, arrays as sets.
//!
//! Every question lands in exactly one row:
//!
//! | row              | meaning                                             |
//! |------------------|-----------------------------------------------------|
//! | analysis error   | analysis failed or produced the wrong IR            |
//! | no interaction   | answered without asking                             |
//! | with interaction | answered after one or more choices                  |
//! | mapping error    | a slot could not be mapped or a choice was missing  |
//! | extraction error | extraction failed, unsupported, or wrong answer     |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use serde_json::Value;

use crate::answer::Payload;
use crate::mapping::MappingStep;
use crate::pipeline::Engine;
use crate::semantic::IntermediateRepresentation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalMode {
    /// take the top option whenever asked
    Auto,
    /// choice indices per question, in the order they are asked
    Scripted(BTreeMap<String, Vec<usize>>),
}

impl EvalMode {
    /// Parses a choices file: `question<TAB>i,j,...` per line.
    pub fn scripted(text: &str) -> Result<Self, String> {
        let mut m = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (q, c) = line.split_once('\t').ok_or_else(|| format!("line {}: expected question<TAB>choices", n + 1))?;
            let picks = c
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| format!("line {}: {e}", n + 1))?;
            m.insert(q.trim().to_string(), picks);
        }
        Ok(EvalMode::Scripted(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureStage {
    Analysis,
    Mapping,
    Extraction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub question: String,
    /// `None` when no IR was expected or none was produced
    pub ir_ok: Option<bool>,
    pub answered: bool,
    pub interactions: usize,
    pub failure: Option<FailureStage>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EvalTotals {
    pub total: usize,
    pub no_interaction: usize,
    pub with_interaction: usize,
    pub answered: usize,
    pub analysis_error: usize,
    pub mapping_error: usize,
    pub extraction_error: usize,
    pub unsuccessful: usize,
    /// questions with an expected IR
    pub ir_checked: usize,
    pub ir_correct: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct EvalReport {
    pub records: Vec<EvalRecord>,
    pub totals: EvalTotals,
}

fn pct(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        100.0 * n as f64 / d as f64
    }
}

impl EvalReport {
    pub fn answered_pct(&self) -> f64 {
        pct(self.totals.answered, self.totals.total)
    }

    pub fn ir_correct_pct(&self) -> f64 {
        pct(self.totals.ir_correct, self.totals.ir_checked)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.totals;
        let row = |f: &mut fmt::Formatter<'_>, label: &str, n: usize| {
            writeln!(f, "{label:<40}{n:>6}{:>8.0}%", pct(n, t.total))
        };
        writeln!(f, "Questions successfully answered")?;
        row(f, "No interaction with users", t.no_interaction)?;
        row(f, "With interactions with users", t.with_interaction)?;
        row(f, "Number questions successfully answered", t.answered)?;
        writeln!(f)?;
        writeln!(f, "Questions with unsuccessful answers")?;
        row(f, "Question analysis errors", t.analysis_error)?;
        row(f, "Ontology mapping errors", t.mapping_error)?;
        row(f, "Answer extraction errors", t.extraction_error)?;
        row(f, "Number unsuccessfully answered questions", t.unsuccessful)?;
        writeln!(f)?;
        writeln!(
            f,
            "{:<40}{:>6}{:>8.0}%  (of {} checked)",
            "IR correct",
            t.ir_correct,
            self.ir_correct_pct(),
            t.ir_checked
        )?;
        writeln!(f, "{:<40}{:>6}", "Total", t.total)
    }
}

struct Line {
    question: String,
    ir: Option<IntermediateRepresentation>,
    answer: Option<serde_json::Map<String, Value>>,
}

fn parse_line(line: &str) -> Result<Line, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() > 3 {
        return Err(format!("expected at most 3 columns, found {}", cols.len()));
    }
    let question = cols[0].trim().to_string();
    if question.is_empty() {
        return Err("empty question".into());
    }
    let col = |i: usize| cols.get(i).map(|s| s.trim()).filter(|s| !s.is_empty());
    let ir = col(1)
        .map(|s| {
            let mut v: Value = serde_json::from_str(s).map_err(|e| format!("expected IR: {e}"))?;
            // the text field is optional in the corpus
            if let Some(o) = v.as_object_mut() {
                o.entry("text").or_insert(Value::String(String::new()));
            }
            serde_json::from_value::<IntermediateRepresentation>(v).map_err(|e| format!("expected IR: {e}"))
        })
        .transpose()?;
    let answer = col(2)
        .map(|s| match serde_json::from_str::<Value>(s) {
            Ok(Value::Object(o)) => Ok(o),
            Ok(_) => Err("expected answer: not an object".to_string()),
            Err(e) => Err(format!("expected answer: {e}")),
        })
        .transpose()?;
    Ok(Line { question, ir, answer })
}

fn same_json(expected: &Value, got: &Value) -> bool {
    match (expected, got) {
        (Value::Array(a), Value::Array(b)) => {
            let set = |v: &Vec<Value>| v.iter().map(|x| x.to_string()).collect::<BTreeSet<_>>();
            set(a) == set(b)
        }
        _ => expected == got,
    }
}

/// Runs every corpus question through `engine`.
pub fn run_eval(engine: &Engine, corpus: &str, mode: &EvalMode) -> EvalReport {
    let mut report = EvalReport::default();
    for line in corpus.lines() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let rec = match parse_line(line) {
            Ok(l) => eval_one(engine, &l, mode),
            Err(note) => EvalRecord {
                question: line.split('\t').next().unwrap_or_default().to_string(),
                ir_ok: None,
                answered: false,
                interactions: 0,
                failure: Some(FailureStage::Analysis),
                note: format!("malformed line: {note}"),
            },
        };
        let t = &mut report.totals;
        t.total += 1;
        if let Some(ok) = rec.ir_ok {
            t.ir_checked += 1;
            t.ir_correct += ok as usize;
        }
        match rec.failure {
            None if rec.interactions == 0 => t.no_interaction += 1,
            None => t.with_interaction += 1,
            Some(FailureStage::Analysis) => t.analysis_error += 1,
            Some(FailureStage::Mapping) => t.mapping_error += 1,
            Some(FailureStage::Extraction) => t.extraction_error += 1,
        }
        report.records.push(rec);
    }
    let t = &mut report.totals;
    t.answered = t.no_interaction + t.with_interaction;
    t.unsuccessful = t.analysis_error + t.mapping_error + t.extraction_error;
    report
}

fn eval_one(engine: &Engine, line: &Line, mode: &EvalMode) -> EvalRecord {
    let mut rec = EvalRecord {
        question: line.question.clone(),
        ir_ok: None,
        answered: false,
        interactions: 0,
        failure: None,
        note: String::new(),
    };
    let fail = |mut rec: EvalRecord, stage, note: String| {
        rec.failure = Some(stage);
        rec.note = note;
        rec
    };
    let analysis = match engine.analyse(&line.question) {
        Ok(a) => a,
        Err(e) => {
            if line.ir.is_some() {
                rec.ir_ok = Some(false);
            }
            return fail(rec, FailureStage::Analysis, e.to_string());
        }
    };
    if let Some(want) = &line.ir {
        let ok = want.same_query(&analysis.ir);
        rec.ir_ok = Some(ok);
        if !ok {
            let got: Vec<String> = analysis.ir.tuples.iter().map(|t| t.to_string()).collect();
            return fail(rec, FailureStage::Analysis, format!("IR was {} {}", analysis.ir.structure, got.join(" ")));
        }
    }

    let script: Option<&[usize]> = match mode {
        EvalMode::Auto => None,
        EvalMode::Scripted(m) => Some(m.get(&line.question).map(Vec::as_slice).unwrap_or(&[])),
    };
    let mut step = engine.map(&analysis.ir);
    let onto = loop {
        match step {
            MappingStep::Resolved(t) => break t,
            MappingStep::Failed(f) => return fail(rec, FailureStage::Mapping, f.to_string()),
            MappingStep::Suspended(s) => {
                let pick = match script {
                    None => 0,
                    Some(s) if rec.interactions < s.len() => s[rec.interactions],
                    Some(_) => return fail(rec, FailureStage::Mapping, "no scripted choice for a disambiguation request".into()),
                };
                rec.interactions += 1;
                step = match engine.resume(&s, pick) {
                    Ok(next) => next,
                    Err(e) => return fail(rec, FailureStage::Mapping, e.to_string()),
                };
            }
        }
    };

    let answer = match engine.extract(&analysis.ir, &onto) {
        Ok(a) => a,
        Err(e) => return fail(rec, FailureStage::Extraction, e.to_string()),
    };
    if matches!(answer.payload, Payload::Unsupported) {
        return fail(rec, FailureStage::Extraction, "unsupported question class".into());
    }
    if let Some(want) = &line.answer {
        let got = serde_json::to_value(&answer).expect("answer serializes");
        for (k, v) in want {
            if !got.get(k).is_some_and(|g| same_json(v, g)) {
                return fail(rec, FailureStage::Extraction, format!("`{k}` differs from the expected answer"));
            }
        }
    }
    rec.answered = true;
    rec
}
