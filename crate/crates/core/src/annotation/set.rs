use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::text;

/// Half-open interval of character (Unicode scalar) offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start < end, "empty span {start}..{end}");
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

pub type Features = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: usize,
    pub kind: String,
    pub span: Span,
    pub features: Features,
}

impl Annotation {
    pub fn feature(&self, name: &str) -> Option<&str> {
        self.features.get(name).map(String::as_str)
    }

    fn order_key(&self) -> (usize, std::cmp::Reverse<usize>, usize) {
        (self.span.start, std::cmp::Reverse(self.span.end), self.id)
    }
}

/// Annotations over one question, kept in (start asc, end desc, id asc) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationSet {
    text: String,
    /// byte offset of every char, plus the total length as a sentinel
    char_bytes: Vec<usize>,
    annotations: Vec<Annotation>,
    next_id: usize,
}

impl AnnotationSet {
    /// The text is NFC-normalized; all spans index the normalized string.
    pub fn new(text: &str) -> Self {
        let text = text::nfc(text);
        let mut char_bytes: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        char_bytes.push(text.len());
        AnnotationSet {
            text,
            char_bytes,
            annotations: Vec::new(),
            next_id: 0,
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Length in characters.
    pub fn char_len(&self) -> usize {
        self.char_bytes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.annotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annotations.is_empty()
    }

    pub fn covered_text(&self, span: Span) -> &str {
        &self.text[self.char_bytes[span.start]..self.char_bytes[span.end]]
    }

    /// Adds an annotation and returns its id.
    ///
    /// Panics if the span is empty or out of bounds.
    pub fn add(&mut self, kind: &str, span: Span, features: Features) -> usize {
        assert!(
            span.start < span.end && span.end <= self.char_len(),
            "span {span} outside text of {} chars",
            self.char_len()
        );
        let id = self.next_id;
        self.next_id += 1;
        let ann = Annotation {
            id,
            kind: kind.to_string(),
            span,
            features,
        };
        let key = ann.order_key();
        let at = self.annotations.partition_point(|a| a.order_key() < key);
        self.annotations.insert(at, ann);
        id
    }

    pub fn get(&self, id: usize) -> Option<&Annotation> {
        self.annotations.iter().find(|a| a.id == id)
    }

    pub fn set_feature(&mut self, id: usize, name: &str, value: &str) -> bool {
        match self.annotations.iter_mut().find(|a| a.id == id) {
            Some(a) => {
                a.features.insert(name.to_string(), value.to_string());
                true
            }
            None => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Annotation> {
        self.annotations.iter()
    }

    pub fn as_slice(&self) -> &[Annotation] {
        &self.annotations
    }

    pub fn of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Annotation> + 'a {
        self.annotations.iter().filter(move |a| a.kind == kind)
    }

    /// First non-whitespace character offset at or after `pos`.
    pub fn skip_space(&self, pos: usize) -> usize {
        let mut p = pos;
        while p < self.char_len() {
            let c = self.text[self.char_bytes[p]..].chars().next().unwrap();
            if !c.is_whitespace() {
                break;
            }
            p += 1;
        }
        p
    }

    /// True when some annotation of `kind` fully covers `span`.
    pub fn is_covered_by(&self, span: Span, kind: &str) -> bool {
        self.annotations
            .iter()
            .take_while(|a| a.span.start <= span.start)
            .any(|a| a.kind == kind && a.span.contains(&span))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_start_then_longest_then_id() {
        let mut set = AnnotationSet::new("ab cd ef");
        let c = set.add("T", Span::new(3, 5), Features::new());
        let a = set.add("T", Span::new(0, 2), Features::new());
        let long = set.add("NP", Span::new(0, 5), Features::new());
        let dup = set.add("X", Span::new(0, 2), Features::new());
        let ids: Vec<_> = set.iter().map(|x| x.id).collect();
        assert_eq!(ids, vec![long, a, dup, c]);
    }

    #[test]
    fn covered_text_uses_char_offsets() {
        let mut set = AnnotationSet::new("lớp học");
        let id = set.add("T", Span::new(4, 7), Features::new());
        assert_eq!(set.covered_text(set.get(id).unwrap().span), "học");
        assert_eq!(set.char_len(), 7);
    }

    #[test]
    #[should_panic]
    fn span_past_end_panics() {
        let mut set = AnnotationSet::new("ab");
        set.add("T", Span { start: 1, end: 3 }, Features::new());
    }

    #[test]
    fn coverage_check() {
        let mut set = AnnotationSet::new("a b c");
        set.add("NP", Span::new(0, 3), Features::new());
        assert!(set.is_covered_by(Span::new(2, 3), "NP"));
        assert!(!set.is_covered_by(Span::new(2, 5), "NP"));
        assert!(!set.is_covered_by(Span::new(0, 1), "Other"));
        assert_eq!(set.skip_space(1), 2);
    }
}
