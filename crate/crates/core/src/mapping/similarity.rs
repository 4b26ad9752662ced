//! String similarity for matching question phrases to element names.

/// `1 - distance / max(|a|, |b|)` over Unicode scalar values; two empty
/// strings are identical.
pub fn levenshtein_ratio(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - strsim::levenshtein(a, b) as f64 / longest as f64
}

pub fn jaro_winkler(a: &str, b: &str) -> f64 {
    strsim::jaro_winkler(a, b)
}

/// `max(levenshtein_ratio, jaro_winkler)`, in `[0, 1]`, exactly symmetric and
/// 1.0 only for equal strings. Inputs are expected to be normalized names.
pub fn similarity(a: &str, b: &str) -> f64 {
    if a == b {
        return 1.0;
    }
    // Jaro-Winkler's prefix bonus is not bit-for-bit symmetric in every
    // implementation; scoring in a fixed order makes it so.
    let (x, y) = if a <= b { (a, b) } else { (b, a) };
    let s = levenshtein_ratio(x, y).max(jaro_winkler(x, y));
    s.clamp(0.0, 1.0).min(1.0 - f64::EPSILON)
}
