//! Word segmentation and question-phrase marking.
//!
//! Segmentation is greedy longest match over syllables (whitespace-separated
//! units) against a tagged lexicon. Syllables the lexicon does not know become
//! `Other`, except runs of capitalized syllables, which merge into one proper
//! noun (`Np`). Punctuation characters are single `Other` tokens.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{kinds, AnnotationSet, Features, Span};
use crate::text;

/// Part-of-speech tags. The noun and adjective tags follow the noun-phrase
/// grammar; `Vb` (verb) and `Pp` (preposition) are local additions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PosTag {
    /// quantity pronoun
    Pn,
    /// unit / concrete noun
    Nu,
    /// numeral noun
    Nn,
    /// classifier noun
    Nt,
    /// countable noun
    Nc,
    /// collective noun
    Ng,
    /// abstract noun
    Na,
    /// proper noun
    Np,
    /// quality adjective
    Aa,
    /// quantity adjective
    An,
    Vb,
    Pp,
    Other,
}

impl PosTag {
    pub const ALL: [PosTag; 13] = [
        PosTag::Pn,
        PosTag::Nu,
        PosTag::Nn,
        PosTag::Nt,
        PosTag::Nc,
        PosTag::Ng,
        PosTag::Na,
        PosTag::Np,
        PosTag::Aa,
        PosTag::An,
        PosTag::Vb,
        PosTag::Pp,
        PosTag::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Pn => "Pn",
            PosTag::Nu => "Nu",
            PosTag::Nn => "Nn",
            PosTag::Nt => "Nt",
            PosTag::Nc => "Nc",
            PosTag::Ng => "Ng",
            PosTag::Na => "Na",
            PosTag::Np => "Np",
            PosTag::Aa => "Aa",
            PosTag::An => "An",
            PosTag::Vb => "Vb",
            PosTag::Pp => "Pp",
            PosTag::Other => "Other",
        }
    }

    /// Tags that can head a noun phrase.
    pub fn is_noun_core(self) -> bool {
        matches!(self, PosTag::Nc | PosTag::Ng | PosTag::Na | PosTag::Np)
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PosTag {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        PosTag::ALL.iter().copied().find(|t| t.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoadError {
    #[error("line {line}: unknown category `{value}`")]
    UnknownCategory { line: usize, value: String },
    #[error("line {line}: expected `<text>\\t<tag>`")]
    Malformed { line: usize },
    #[error("line {line}: empty entry")]
    Empty { line: usize },
}

/// Iterates `(line number, first column, second column)` of a two-column TSV,
/// skipping blanks and `#` comments.
fn tsv_pairs(source: &str) -> impl Iterator<Item = Result<(usize, &str, &str), LoadError>> {
    source.lines().enumerate().filter_map(|(i, raw)| {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            return None;
        }
        Some(match raw.split_once('\t') {
            Some((a, b)) if !a.trim().is_empty() => Ok((line, a.trim(), b.trim())),
            Some(_) => Err(LoadError::Empty { line }),
            None => Err(LoadError::Malformed { line }),
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    /// NFC, lowercase, single spaces between syllables.
    pub surface: String,
    pub category: PosTag,
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<String, PosTag>,
    max_syllables: usize,
}

impl Lexicon {
    /// Reads `surface<TAB>category` lines. Later duplicates replace earlier ones.
    pub fn load(source: &str) -> Result<Self, LoadError> {
        let mut lex = Lexicon::default();
        for row in tsv_pairs(source) {
            let (line, surface, tag) = row?;
            let category = tag.parse().map_err(|_| LoadError::UnknownCategory {
                line,
                value: tag.to_string(),
            })?;
            lex.insert(surface, category);
        }
        Ok(lex)
    }

    pub fn insert(&mut self, surface: &str, category: PosTag) {
        let key = text::fold_words(surface);
        if key.is_empty() {
            return;
        }
        self.max_syllables = self.max_syllables.max(key.split(' ').count());
        self.entries.insert(key, category);
    }

    pub fn get(&self, surface: &str) -> Option<PosTag> {
        self.entries.get(&text::fold_words(surface)).copied()
    }

    pub fn entry(&self, surface: &str) -> Option<LexiconEntry> {
        let surface = text::fold_words(surface);
        self.entries.get(&surface).map(|&category| LexiconEntry { surface, category })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_syllables(&self) -> usize {
        self.max_syllables
    }
}

struct Unit {
    span: Span,
    folded: String,
    is_word: bool,
    capitalized: bool,
}

fn units(set: &AnnotationSet) -> Vec<Unit> {
    let mut out = Vec::new();
    let chars: Vec<char> = set.text().chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if text::is_word_char(c) {
            while i < chars.len() && text::is_word_char(chars[i]) {
                i += 1;
            }
        } else {
            i += 1;
        }
        let s: String = chars[start..i].iter().collect();
        out.push(Unit {
            span: Span::new(start, i),
            folded: text::fold(&s),
            is_word: text::is_word_char(c),
            capitalized: c.is_uppercase(),
        });
    }
    out
}

fn token_features(category: PosTag, covered: &str) -> Features {
    let mut f = Features::new();
    f.insert("category".into(), category.as_str().into());
    f.insert("string".into(), covered.into());
    f
}

/// Segments `text` into `TokenVn` annotations.
pub fn segment(text: &str, lexicon: &Lexicon) -> AnnotationSet {
    let mut set = AnnotationSet::new(text);
    let units = units(&set);
    let max = lexicon.max_syllables().max(1);
    let mut tokens: Vec<(Span, PosTag)> = Vec::new();
    let mut i = 0;
    while i < units.len() {
        if !units[i].is_word {
            tokens.push((units[i].span, PosTag::Other));
            i += 1;
            continue;
        }
        let mut found = None;
        let limit = max.min(units.len() - i);
        for len in (1..=limit).rev() {
            let window = &units[i..i + len];
            if !window.iter().all(|u| u.is_word) {
                continue;
            }
            let key = window.iter().map(|u| u.folded.as_str()).collect::<Vec<_>>().join(" ");
            if let Some(tag) = lexicon.entries.get(&key) {
                found = Some((len, *tag));
                break;
            }
        }
        match found {
            Some((len, tag)) => {
                tokens.push((Span::new(units[i].span.start, units[i + len - 1].span.end), tag));
                i += len;
            }
            None if units[i].capitalized => {
                // merge the run of unknown capitalized syllables
                let mut j = i + 1;
                while j < units.len()
                    && units[j].is_word
                    && units[j].capitalized
                    && !starts_known_word(&units[j..], lexicon, max)
                {
                    j += 1;
                }
                tokens.push((Span::new(units[i].span.start, units[j - 1].span.end), PosTag::Np));
                i = j;
            }
            None => {
                tokens.push((units[i].span, PosTag::Other));
                i += 1;
            }
        }
    }
    for (span, tag) in tokens {
        let covered = set.covered_text(span).to_string();
        set.add(kinds::TOKEN, span, token_features(tag, &covered));
    }
    set
}

fn starts_known_word(units: &[Unit], lexicon: &Lexicon, max: usize) -> bool {
    (1..=max.min(units.len())).any(|len| {
        let w = &units[..len];
        w.iter().all(|u| u.is_word)
            && lexicon
                .entries
                .contains_key(&w.iter().map(|u| u.folded.as_str()).collect::<Vec<_>>().join(" "))
    })
}

/// Semantic category carried by a question phrase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QuestionCategory {
    HowWhy,
    YesNo,
    What,
    When,
    Where,
    Many,
    Who,
    EntityMark,
    ListMark,
}

impl QuestionCategory {
    pub const ALL: [QuestionCategory; 9] = [
        QuestionCategory::HowWhy,
        QuestionCategory::YesNo,
        QuestionCategory::What,
        QuestionCategory::When,
        QuestionCategory::Where,
        QuestionCategory::Many,
        QuestionCategory::Who,
        QuestionCategory::EntityMark,
        QuestionCategory::ListMark,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuestionCategory::HowWhy => "HowWhy",
            QuestionCategory::YesNo => "YesNo",
            QuestionCategory::What => "What",
            QuestionCategory::When => "When",
            QuestionCategory::Where => "Where",
            QuestionCategory::Many => "Many",
            QuestionCategory::Who => "Who",
            QuestionCategory::EntityMark => "EntityMark",
            QuestionCategory::ListMark => "ListMark",
        }
    }
}

impl FromStr for QuestionCategory {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        QuestionCategory::ALL.iter().copied().find(|c| c.as_str() == s).ok_or(())
    }
}

impl fmt::Display for QuestionCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Question phrases (`phrase<TAB>category`), matched over whole tokens.
#[derive(Debug, Clone, Default)]
pub struct QuestionPhraseTable {
    phrases: HashMap<Vec<String>, QuestionCategory>,
    max_syllables: usize,
}

impl QuestionPhraseTable {
    pub fn load(source: &str) -> Result<Self, LoadError> {
        let mut table = QuestionPhraseTable::default();
        for row in tsv_pairs(source) {
            let (line, phrase, cat) = row?;
            let cat = cat.parse().map_err(|_| LoadError::UnknownCategory {
                line,
                value: cat.to_string(),
            })?;
            table.insert(phrase, cat);
        }
        Ok(table)
    }

    pub fn insert(&mut self, phrase: &str, category: QuestionCategory) {
        let key: Vec<String> = text::fold_words(phrase).split(' ').map(str::to_string).collect();
        if key.iter().all(|s| s.is_empty()) {
            return;
        }
        self.max_syllables = self.max_syllables.max(key.len());
        self.phrases.insert(key, category);
    }

    pub fn get(&self, phrase: &str) -> Option<QuestionCategory> {
        let key: Vec<String> = text::fold_words(phrase).split(' ').map(str::to_string).collect();
        self.phrases.get(&key).copied()
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }
}

/// Covers each longest run of whole tokens that spells a table phrase with a
/// `QuestionWord` annotation carrying `qcat`. Tokens are left in place.
pub fn mark_question_words(set: &AnnotationSet, table: &QuestionPhraseTable) -> AnnotationSet {
    let mut out = set.clone();
    let tokens: Vec<(Span, Vec<String>)> = set
        .of_kind(kinds::TOKEN)
        .map(|t| {
            let syl = text::fold_words(set.covered_text(t.span))
                .split(' ')
                .map(str::to_string)
                .collect();
            (t.span, syl)
        })
        .collect();
    let mut i = 0;
    while i < tokens.len() {
        let mut acc: Vec<String> = Vec::new();
        let mut best = None;
        for (j, (_, syl)) in tokens.iter().enumerate().skip(i) {
            acc.extend(syl.iter().cloned());
            if acc.len() > table.max_syllables {
                break;
            }
            if let Some(cat) = table.phrases.get(&acc) {
                best = Some((j, *cat));
            }
        }
        match best {
            Some((j, cat)) => {
                let span = Span::new(tokens[i].0.start, tokens[j].0.end);
                let mut f = Features::new();
                f.insert("qcat".into(), cat.as_str().into());
                f.insert("string".into(), set.covered_text(span).into());
                out.add(kinds::QUESTION_WORD, span, f);
                i = j + 1;
            }
            None => i += 1,
        }
    }
    out
}
