//! Leftmost-longest matching of rules over an annotation lattice.
//!
//! An element consumes one annotation starting at the current position; the
//! next position is the first non-space character after that annotation. Any
//! annotation of a matching kind may be consumed, so overlapping layers
//! (tokens, noun phrases, question words) are all visible to one rule.

use std::collections::{BTreeMap, HashMap};

use super::rule::{Constraint, FeatureValue, Quantifier, Rule};
use super::set::{Annotation, AnnotationSet, Features, Span};
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub span: Span,
    /// (element index, annotation id) for every consumed annotation, in order.
    pub consumed: Vec<(usize, usize)>,
    /// Union span of the annotations consumed by each named capture.
    pub captures: BTreeMap<String, Span>,
}

/// All matches of one rule, scanning left to right.
///
/// At each start position the longest match is taken; scanning resumes at the
/// first position at or after its end. Annotations fully covered by an
/// existing annotation of the rule's output kind are invisible to the rule.
pub fn find_matches(rule: &Rule, set: &AnnotationSet) -> Vec<Match> {
    let lattice = Lattice::new(set, std::slice::from_ref(rule));
    let mut out = Vec::new();
    let mut pos = 0;
    for &start in &lattice.starts {
        if start < pos {
            continue;
        }
        if let Some(m) = lattice.longest_at(rule, 0, start) {
            pos = m.span.end;
            out.push(m);
        }
    }
    out
}

/// Applies rules grouped by priority, lowest number first.
///
/// Rules sharing a priority scan together: at each position the longest match
/// among them wins, with ties going to the rule listed first. Each group sees
/// the annotations produced by earlier groups.
pub fn apply_rules(rules: &[Rule], set: &AnnotationSet) -> AnnotationSet {
    let mut out = set.clone();
    let mut order: Vec<usize> = (0..rules.len()).collect();
    order.sort_by_key(|&i| (rules[i].priority, i));

    let mut i = 0;
    while i < order.len() {
        let prio = rules[order[i]].priority;
        let group: Vec<&Rule> = order[i..]
            .iter()
            .take_while(|&&r| rules[r].priority == prio)
            .map(|&r| &rules[r])
            .collect();
        i += group.len();
        apply_group(&group, &mut out);
    }
    out
}

fn apply_group(group: &[&Rule], set: &mut AnnotationSet) {
    let owned: Vec<Rule> = group.iter().map(|r| (*r).clone()).collect();
    let emitted: Vec<(usize, Match)> = {
        let lattice = Lattice::new(set, &owned);
        let mut emitted = Vec::new();
        let mut pos = 0;
        for &start in &lattice.starts {
            if start < pos {
                continue;
            }
            let best = owned
                .iter()
                .enumerate()
                .filter_map(|(ri, r)| lattice.longest_at(r, ri, start).map(|m| (ri, m)))
                .fold(None::<(usize, Match)>, |acc, (ri, m)| match acc {
                    Some((_, ref b)) if b.span.end >= m.span.end => acc,
                    _ => Some((ri, m)),
                });
            if let Some((ri, m)) = best {
                pos = m.span.end;
                emitted.push((ri, m));
            }
        }
        emitted
    };
    for (ri, m) in emitted {
        let rule = &owned[ri];
        let mut features = Features::new();
        for (name, value) in &rule.action.features {
            let v = match value {
                FeatureValue::Literal(s) => Some(s.clone()),
                FeatureValue::Capture(c) => m.captures.get(c).map(|sp| set.covered_text(*sp).to_string()),
            };
            if let Some(v) = v {
                features.insert(name.clone(), v);
            }
        }
        features.insert("rule".to_string(), rule.name.clone());
        set.add(&rule.action.kind, m.span, features);
    }
}

pub(crate) fn satisfies(c: &Constraint, ann: &Annotation, set: &AnnotationSet) -> bool {
    if ann.kind != c.kind {
        return false;
    }
    c.features.iter().all(|(f, v)| {
        if f == "string" {
            text::fold(set.covered_text(ann.span)) == *v
        } else {
            ann.feature(f) == Some(v.as_str())
        }
    })
}

struct Lattice<'a> {
    set: &'a AnnotationSet,
    /// Distinct start offsets, ascending.
    starts: Vec<usize>,
    /// Annotation indexes (into set order) per start offset; per rule index the
    /// indexes hidden by coverage are filtered at lookup time.
    by_start: HashMap<usize, Vec<usize>>,
    /// hidden[rule][annotation index]
    hidden: Vec<Vec<bool>>,
}

/// Furthest end reached (if any annotation was consumed) and the path taken.
type Completion = (Option<usize>, Vec<(usize, usize)>);
type Memo = HashMap<(usize, usize, bool), Option<Completion>>;

impl<'a> Lattice<'a> {
    fn new(set: &'a AnnotationSet, rules: &[Rule]) -> Self {
        let anns = set.as_slice();
        let mut by_start: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut starts = Vec::new();
        for (i, a) in anns.iter().enumerate() {
            if starts.last() != Some(&a.span.start) {
                starts.push(a.span.start);
            }
            by_start.entry(a.span.start).or_default().push(i);
        }
        let hidden = rules
            .iter()
            .map(|r| {
                anns.iter()
                    .map(|a| set.is_covered_by(a.span, &r.action.kind))
                    .collect()
            })
            .collect();
        Lattice {
            set,
            starts,
            by_start,
            hidden,
        }
    }

    fn longest_at(&self, rule: &Rule, rule_idx: usize, start: usize) -> Option<Match> {
        let mut memo = Memo::new();
        let (end, path) = self.search(rule, rule_idx, 0, start, false, &mut memo)?;
        let end = end?;
        let anns = self.set.as_slice();
        let span = Span::new(start, end);
        if !rule.unless.is_empty()
            && anns
                .iter()
                .any(|a| rule.unless.contains(&a.kind) && a.span.overlaps(&span))
        {
            return None;
        }
        let mut captures: BTreeMap<String, Span> = BTreeMap::new();
        let consumed = path
            .iter()
            .map(|&(ei, ai)| {
                let a = &anns[ai];
                if let Some(name) = &rule.elements[ei].capture {
                    captures
                        .entry(name.clone())
                        .and_modify(|s| {
                            s.start = s.start.min(a.span.start);
                            s.end = s.end.max(a.span.end);
                        })
                        .or_insert(a.span);
                }
                (ei, a.id)
            })
            .collect();
        Some(Match {
            span,
            consumed,
            captures,
        })
    }

    /// Best completion from element `ei` at `pos`. Returns the furthest end
    /// reached by the suffix (None if it consumed nothing) and its path.
    /// Among equally long completions, consuming is preferred over skipping
    /// and longer annotations over shorter ones.
    fn search(
        &self,
        rule: &Rule,
        rule_idx: usize,
        ei: usize,
        pos: usize,
        matched_current: bool,
        memo: &mut Memo,
    ) -> Option<Completion> {
        if ei == rule.elements.len() {
            return Some((None, Vec::new()));
        }
        let key = (ei, pos, matched_current);
        if let Some(v) = memo.get(&key) {
            return v.clone();
        }
        let el = &rule.elements[ei];
        let mut best: Option<Completion> = None;
        let consider = |cand: Completion, best: &mut Option<Completion>| {
            let better = match best {
                None => true,
                Some((b, _)) => cand.0 > *b,
            };
            if better {
                *best = Some(cand);
            }
        };

        let anns = self.set.as_slice();
        if let Some(cands) = self.by_start.get(&pos) {
            for &ai in cands {
                if self.hidden[rule_idx][ai] {
                    continue;
                }
                let a = &anns[ai];
                if !el.alternatives.iter().any(|c| satisfies(c, a, self.set)) {
                    continue;
                }
                let next_pos = self.set.skip_space(a.span.end);
                let (nei, nm) = match el.quantifier {
                    Quantifier::OneOrMore => (ei, true),
                    _ => (ei + 1, false),
                };
                if let Some((end, path)) = self.search(rule, rule_idx, nei, next_pos, nm, memo) {
                    let end = Some(end.map_or(a.span.end, |e| e.max(a.span.end)));
                    let mut full = Vec::with_capacity(path.len() + 1);
                    full.push((ei, ai));
                    full.extend(path);
                    consider((end, full), &mut best);
                }
            }
        }
        let can_skip = match el.quantifier {
            Quantifier::Optional => true,
            Quantifier::OneOrMore => matched_current,
            Quantifier::One => false,
        };
        if can_skip {
            if let Some(cand) = self.search(rule, rule_idx, ei + 1, pos, false, memo) {
                consider(cand, &mut best);
            }
        }
        memo.insert(key, best.clone());
        best
    }
}
