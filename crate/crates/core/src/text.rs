//! Text normalization shared by every stage.
//!
//! Vietnamese is diacritic-distinctive, so nothing here strips marks: all
//! comparisons go through NFC + lowercase only.

use unicode_normalization::UnicodeNormalization;

/// NFC-normalize and lowercase.
pub fn fold(s: &str) -> String {
    s.nfc().collect::<String>().to_lowercase()
}

/// NFC-normalize only (case preserved).
pub fn nfc(s: &str) -> String {
    s.nfc().collect()
}

/// Folded, with runs of whitespace collapsed to single spaces.
pub fn fold_words(s: &str) -> String {
    fold(s).split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Prepare a raw question for analysis: NFC, whitespace collapsed, and trailing
/// sentence punctuation removed.
pub fn clean_question(raw: &str) -> String {
    let collapsed = nfc(raw).split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed
        .trim_end_matches(|c: char| matches!(c, '?' | '.' | '!' | '…' | ';' | ':' | ',') || c.is_whitespace())
        .to_string()
}

pub(crate) fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}
