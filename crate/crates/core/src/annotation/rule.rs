//! Rule model and the rules-file reader.
//!
//! A rules file is a sequence of blocks:
//!
//! ```text
//! # comment
//! rule <name> <priority>
//!   unless <Kind>                       (optional, any number)
//!   <quantifier> <alt> | <alt> ... [@capture]
//!   ...
//!   emit <Kind> [feature=value ...]
//! ```
//!
//! `<quantifier>` is `1` (exactly one), `?` (optional) or `+` (one or more).
//! An `<alt>` is `Kind` or `Kind.feature=value`, with further `.feature=value`
//! pairs allowed. The pseudo-feature `string` compares against the covered
//! text, case-insensitively. In `emit`, a value of `@name` copies the covered
//! text of the elements captured under `name`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::text;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("rule source line {line}: {message}")]
pub struct RuleError {
    pub line: usize,
    pub message: String,
}

impl RuleError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        RuleError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    One,
    Optional,
    OneOrMore,
}

impl Quantifier {
    pub fn symbol(self) -> &'static str {
        match self {
            Quantifier::One => "1",
            Quantifier::Optional => "?",
            Quantifier::OneOrMore => "+",
        }
    }
}

/// Matches one annotation of `kind` whose features equal every required value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub kind: String,
    pub features: BTreeMap<String, String>,
}

impl Constraint {
    pub fn kind(kind: &str) -> Self {
        Constraint {
            kind: kind.to_string(),
            features: BTreeMap::new(),
        }
    }

    pub fn with(mut self, feature: &str, value: &str) -> Self {
        let value = if feature == "string" {
            text::fold(value)
        } else {
            value.to_string()
        };
        self.features.insert(feature.to_string(), value);
        self
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.kind)?;
        for (k, v) in &self.features {
            write!(f, ".{k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleElement {
    pub alternatives: Vec<Constraint>,
    pub quantifier: Quantifier,
    pub capture: Option<String>,
}

impl RuleElement {
    pub fn new(quantifier: Quantifier, alternatives: Vec<Constraint>) -> Self {
        RuleElement {
            alternatives,
            quantifier,
            capture: None,
        }
    }

    pub fn captured(mut self, name: &str) -> Self {
        self.capture = Some(name.to_string());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureValue {
    Literal(String),
    Capture(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub kind: String,
    pub features: Vec<(String, FeatureValue)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub priority: i32,
    pub elements: Vec<RuleElement>,
    /// Matches overlapping an annotation of any of these kinds are dropped.
    pub unless: Vec<String>,
    pub action: Action,
}

impl Rule {
    /// Validates the element list: non-empty, non-empty alternatives, and at
    /// least one element that is not optional.
    pub fn new(
        name: &str,
        priority: i32,
        elements: Vec<RuleElement>,
        action: Action,
    ) -> Result<Self, RuleError> {
        if elements.is_empty() {
            return Err(RuleError::new(0, format!("rule `{name}` has no elements")));
        }
        if let Some(i) = elements.iter().position(|e| e.alternatives.is_empty()) {
            return Err(RuleError::new(0, format!("rule `{name}` element {i} has no alternatives")));
        }
        if elements.iter().all(|e| e.quantifier == Quantifier::Optional) {
            return Err(RuleError::new(0, format!("rule `{name}` has only optional elements")));
        }
        Ok(Rule {
            name: name.to_string(),
            priority,
            elements,
            unless: Vec::new(),
            action,
        })
    }

    pub fn unless(mut self, kind: &str) -> Self {
        self.unless.push(kind.to_string());
        self
    }
}

/// Compiles a single rule block.
pub fn compile_rule(source: &str) -> Result<Rule, RuleError> {
    let mut rules = parse_rules(source)?;
    match rules.len() {
        1 => Ok(rules.remove(0)),
        0 => Err(RuleError::new(1, "no rule found")),
        n => Err(RuleError::new(1, format!("expected one rule, found {n}"))),
    }
}

/// Parses every rule block in a rules file, in file order.
pub fn parse_rules(source: &str) -> Result<Vec<Rule>, RuleError> {
    let mut rules = Vec::new();
    let mut current: Option<Draft> = None;

    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = split_head(line);
        match head {
            "rule" => {
                if let Some(d) = &current {
                    return Err(RuleError::new(
                        line_no,
                        format!("rule `{}` (line {}) has no emit line", d.name, d.line),
                    ));
                }
                current = Some(Draft::header(rest, line_no)?);
            }
            "unless" => {
                let d = current
                    .as_mut()
                    .ok_or_else(|| RuleError::new(line_no, "`unless` outside a rule"))?;
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(RuleError::new(line_no, "`unless` takes exactly one kind"));
                }
                d.unless.push(rest.to_string());
            }
            "emit" => {
                let d = current
                    .take()
                    .ok_or_else(|| RuleError::new(line_no, "`emit` outside a rule"))?;
                let action = parse_action(rest, line_no)?;
                for (_, v) in &action.features {
                    if let FeatureValue::Capture(c) = v {
                        if !d.elements.iter().any(|e| e.capture.as_deref() == Some(c)) {
                            return Err(RuleError::new(line_no, format!("unknown capture `@{c}`")));
                        }
                    }
                }
                let line = d.line;
                let mut rule = Rule::new(&d.name, d.priority, d.elements, action)
                    .map_err(|e| RuleError::new(line, e.message))?;
                rule.unless = d.unless;
                rules.push(rule);
            }
            q => {
                let d = current
                    .as_mut()
                    .ok_or_else(|| RuleError::new(line_no, format!("unexpected `{q}` outside a rule")))?;
                d.elements.push(parse_element(q, rest, line_no)?);
            }
        }
    }
    if let Some(d) = current {
        return Err(RuleError::new(
            d.line,
            format!("rule `{}` has no emit line", d.name),
        ));
    }
    Ok(rules)
}

struct Draft {
    name: String,
    priority: i32,
    line: usize,
    elements: Vec<RuleElement>,
    unless: Vec<String>,
}

impl Draft {
    fn header(rest: &str, line: usize) -> Result<Self, RuleError> {
        let parts: Vec<&str> = rest.split_whitespace().collect();
        let [name, priority] = parts[..] else {
            return Err(RuleError::new(line, "expected `rule <name> <priority>`"));
        };
        let priority = priority
            .parse()
            .map_err(|_| RuleError::new(line, format!("bad priority `{priority}`")))?;
        Ok(Draft {
            name: name.to_string(),
            priority,
            line,
            elements: Vec::new(),
            unless: Vec::new(),
        })
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn split_head(line: &str) -> (&str, &str) {
    match line.find(char::is_whitespace) {
        Some(i) => (&line[..i], line[i..].trim()),
        None => (line, ""),
    }
}

fn parse_element(quant: &str, rest: &str, line: usize) -> Result<RuleElement, RuleError> {
    let quantifier = match quant {
        "1" => Quantifier::One,
        "?" => Quantifier::Optional,
        "+" => Quantifier::OneOrMore,
        other => return Err(RuleError::new(line, format!("unknown quantifier `{other}`"))),
    };
    let (body, capture) = match rest.rfind('@') {
        Some(i) => {
            let name = rest[i + 1..].trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(RuleError::new(line, "bad capture name"));
            }
            (&rest[..i], Some(name.to_string()))
        }
        None => (rest, None),
    };
    let alternatives = body
        .split('|')
        .map(|alt| parse_constraint(alt.trim(), line))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RuleElement {
        alternatives,
        quantifier,
        capture,
    })
}

fn parse_constraint(alt: &str, line: usize) -> Result<Constraint, RuleError> {
    if alt.is_empty() {
        return Err(RuleError::new(line, "empty alternative"));
    }
    let mut parts = alt.split('.');
    let kind = parts.next().unwrap();
    if kind.is_empty() || !kind.chars().all(|c| c.is_alphanumeric() || c == '_') {
        return Err(RuleError::new(line, format!("bad annotation kind `{kind}`")));
    }
    let mut c = Constraint::kind(kind);
    for pair in parts {
        let Some((f, v)) = pair.split_once('=') else {
            return Err(RuleError::new(line, format!("expected feature=value, got `{pair}`")));
        };
        if f.is_empty() || v.is_empty() {
            return Err(RuleError::new(line, format!("expected feature=value, got `{pair}`")));
        }
        c = c.with(f, v);
    }
    Ok(c)
}

fn parse_action(rest: &str, line: usize) -> Result<Action, RuleError> {
    let mut words = rest.split_whitespace();
    let kind = words
        .next()
        .ok_or_else(|| RuleError::new(line, "`emit` needs an output kind"))?;
    let mut features = Vec::new();
    for w in words {
        let Some((f, v)) = w.split_once('=') else {
            return Err(RuleError::new(line, format!("expected feature=value, got `{w}`")));
        };
        let value = match v.strip_prefix('@') {
            Some(cap) => FeatureValue::Capture(cap.to_string()),
            None => FeatureValue::Literal(v.to_string()),
        };
        features.push((f.to_string(), value));
    }
    Ok(Action {
        kind: kind.to_string(),
        features,
    })
}
