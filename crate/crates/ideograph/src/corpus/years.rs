//! Year parsing from plain text.
//!
//! A number counts as a year when it is preceded by a month name, a
//! preposition of time, "and", "the", or "early"/"mid"/"late", or when
//! it is followed by BC, BCE, or MYA. Centuries are converted to their
//! first year ("19th Century" -> 1800). BC/BCE years and centuries are
//! negated; MYA values are negated and scaled by one million.
//!
//! Plain trigger-preceded years must have 3 or 4 digits; suffixed forms
//! accept 1 to 4 digits ("44 BC"). Parses later than the dump year are
//! discarded as list noise.

use super::MAX_PARSE_YEAR;

const MONTHS: [&str; 12] = [
    "january",
    "february",
    "march",
    "april",
    "may",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
];

const TIME_WORDS: [&str; 19] = [
    "in", "on", "at", "by", "from", "until", "till", "since", "before", "after", "during",
    "around", "circa", "about", "and", "the", "early", "mid", "late",
];

fn is_trigger(word: &str) -> bool {
    MONTHS.contains(&word) || TIME_WORDS.contains(&word)
}

fn digits_value(token: &str) -> Option<i64> {
    if token.is_empty() || token.len() > 4 || !token.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

/// Century ordinal: "19th" -> 19.
fn century_ordinal(token: &str) -> Option<i64> {
    let lower = token.to_ascii_lowercase();
    let digits = lower
        .strip_suffix("st")
        .or_else(|| lower.strip_suffix("nd"))
        .or_else(|| lower.strip_suffix("rd"))
        .or_else(|| lower.strip_suffix("th"))?;
    if digits.is_empty() || digits.len() > 2 || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

enum Suffix {
    Bc,
    Mya,
}

fn suffix_kind(word: &str) -> Option<Suffix> {
    match word.to_ascii_lowercase().as_str() {
        "bc" | "bce" => Some(Suffix::Bc),
        "mya" => Some(Suffix::Mya),
        _ => None,
    }
}

/// Extract every year mentioned in `text`, in text order.
pub fn parse_years(text: &str) -> Vec<i64> {
    let tokens: Vec<&str> = text
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .collect();
    let mut years = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let tok = tokens[i];
        let next = tokens.get(i + 1).copied();

        // centuries: "<N>th century [BC|BCE]"
        if let (Some(ord), Some(n)) = (century_ordinal(tok), next) {
            if n.eq_ignore_ascii_case("century") && ord >= 1 {
                let mut year = (ord - 1) * 100;
                let mut consumed = 2;
                if let Some(Suffix::Bc) = tokens.get(i + 2).copied().and_then(suffix_kind) {
                    year = -year;
                    consumed = 3;
                }
                if year <= MAX_PARSE_YEAR {
                    years.push(year);
                }
                i += consumed;
                continue;
            }
        }

        // glued suffix forms like "1600BC"
        if let Some((year, len)) = glued_suffix(tok) {
            years.push(year);
            i += len;
            continue;
        }

        if let Some(value) = digits_value(tok) {
            // suffix rules qualify a number on their own
            if let Some(kind) = next.and_then(suffix_kind) {
                let year = match kind {
                    Suffix::Bc => -value,
                    Suffix::Mya => -value * 1_000_000,
                };
                years.push(year);
                i += 2;
                continue;
            }
            // plain years need a leading trigger word and 3-4 digits
            if tok.len() >= 3 {
                let prev_is_trigger = i > 0 && is_trigger(&tokens[i - 1].to_ascii_lowercase());
                if prev_is_trigger && value <= MAX_PARSE_YEAR {
                    years.push(value);
                }
            }
        }
        i += 1;
    }
    years
}

/// "1600BC" or "66MYA" written without a space; returns (year, tokens consumed).
fn glued_suffix(token: &str) -> Option<(i64, usize)> {
    let lower = token.to_ascii_lowercase();
    for (suffix, kind) in [
        ("bce", Suffix::Bc),
        ("bc", Suffix::Bc),
        ("mya", Suffix::Mya),
    ] {
        if let Some(digits) = lower.strip_suffix(suffix) {
            if let Some(value) = digits_value(digits) {
                let year = match kind {
                    Suffix::Bc => -value,
                    Suffix::Mya => -value * 1_000_000,
                };
                return Some((year, 1));
            }
        }
    }
    None
}
