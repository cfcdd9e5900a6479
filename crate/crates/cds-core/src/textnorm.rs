//! Deterministic normalization and tokenization of raw post text, plus the
//! corpus-level exclusion filters. Posts and lexicon schemata are pushed
//! through the same pipeline so they share one token space.

use std::borrow::Cow;
use std::sync::OnceLock;

use chrono::{DateTime, Utc};
use regex::Regex;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// Why a post was dropped from matching and counting.
///
/// Excluded posts are retained with their reason for audit; they are never
/// matched or counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExclusionReason {
    Retweet,
    NonEnglish,
    /// Raw text contains the substring "diagnos" or "depress" (case-insensitive).
    KeywordDiagnosDepress,
}

impl ExclusionReason {
    pub const ALL: [ExclusionReason; 3] = [
        ExclusionReason::Retweet,
        ExclusionReason::NonEnglish,
        ExclusionReason::KeywordDiagnosDepress,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ExclusionReason::Retweet => "retweet",
            ExclusionReason::NonEnglish => "non-english",
            ExclusionReason::KeywordDiagnosDepress => "keyword-diagnos-depress",
        }
    }
}

/// One text item with its author, timestamp and filter state.
#[derive(Debug, Clone, PartialEq)]
pub struct Post {
    pub post_id: String,
    pub user_id: String,
    pub created_at: DateTime<Utc>,
    pub raw_text: String,
    pub lang: String,
    pub is_retweet: bool,
    /// Filled by normalization; `None` until then and for excluded posts.
    pub tokens: Option<Vec<String>>,
    pub excluded: Option<ExclusionReason>,
}

impl Post {
    pub fn is_retained(&self) -> bool {
        self.excluded.is_none()
    }
}

fn contraction_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        // Irregular forms first so "won't" is not rewritten as "wo not".
        Regex::new(r"(?i)\b(won't|can't|shan't)\b|(n't|'m|'re|'ve|'ll|'d|'s)\b").unwrap()
    })
}

/// Expand contractions with a fixed mapping, case-insensitively, left to
/// right, leaving everything else untouched. Curly apostrophes (U+2019) are
/// mapped to ASCII first. The output contains none of the mapped forms, so
/// the expansion is idempotent.
pub fn expand_contractions(text: &str) -> Cow<'_, str> {
    if !text.contains('\'') && !text.contains('\u{2019}') {
        return Cow::Borrowed(text);
    }
    let ascii: Cow<str> = if text.contains('\u{2019}') {
        Cow::Owned(text.replace('\u{2019}', "'"))
    } else {
        Cow::Borrowed(text)
    };
    let expanded = contraction_regex().replace_all(&ascii, |caps: &regex::Captures| {
        if let Some(word) = caps.get(1) {
            match word.as_str().to_ascii_lowercase().as_str() {
                "won't" => "will not",
                "can't" => "can not",
                _ => "shall not",
            }
            .to_string()
        } else {
            let suffix = caps.get(2).unwrap().as_str().to_ascii_lowercase();
            match suffix.as_str() {
                "n't" => " not",
                "'m" => " am",
                "'re" => " are",
                "'ve" => " have",
                "'ll" => " will",
                "'d" => " would",
                "'s" => " is",
                _ => unreachable!(),
            }
            .to_string()
        }
    });
    Cow::Owned(expanded.into_owned())
}

fn is_url(word: &str) -> bool {
    let w = word.as_bytes();
    let starts = |p: &str| {
        w.len() >= p.len() && w[..p.len()].eq_ignore_ascii_case(p.as_bytes())
    };
    starts("http://") || starts("https://") || starts("www.")
}

/// Tokenize contraction-expanded text: NFKC-normalize, case-fold, drop URLs
/// and @-mentions, strip '#' from hashtags, split on anything that is not an
/// alphanumeric character. Emoji and other symbols fall out as separators.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        if is_url(word) || word.starts_with('@') {
            continue;
        }
        let word = word.trim_start_matches('#');
        let mut cur = String::new();
        for ch in word.nfkc() {
            if ch.is_alphanumeric() {
                for lc in ch.to_lowercase() {
                    cur.push(lc);
                }
            } else if !cur.is_empty() {
                tokens.push(std::mem::take(&mut cur));
            }
        }
        if !cur.is_empty() {
            tokens.push(cur);
        }
    }
    tokens
}

/// Full normalization pipeline: contraction expansion followed by tokenization.
pub fn normalize(text: &str) -> Vec<String> {
    tokenize(&expand_contractions(text))
}

/// Mark exclusions in place. Priority when several apply: retweet, then
/// language, then keyword. Nothing is dropped; `|input| == |output|`.
pub fn apply_exclusions(posts: &mut [Post]) {
    for post in posts.iter_mut() {
        post.excluded = exclusion_for(post);
    }
}

fn exclusion_for(post: &Post) -> Option<ExclusionReason> {
    if post.is_retweet {
        return Some(ExclusionReason::Retweet);
    }
    if !post.lang.eq_ignore_ascii_case("en") {
        return Some(ExclusionReason::NonEnglish);
    }
    // Substring containment on the raw text, so "antidepressant" is excluded too.
    let lower = post.raw_text.to_lowercase();
    if lower.contains("diagnos") || lower.contains("depress") {
        return Some(ExclusionReason::KeywordDiagnosDepress);
    }
    None
}

/// True iff the token stream of `text` contains the standalone token "i",
/// later a token with prefix "diagnos", later a token with prefix "depres",
/// as an ordered subsequence with arbitrary insertions.
pub fn detect_diagnosis_statement(text: &str) -> bool {
    let mut stage = 0u8;
    for token in normalize(text) {
        match stage {
            0 if token == "i" => stage = 1,
            1 if token.starts_with("diagnos") => stage = 2,
            2 if token.starts_with("depres") => return true,
            _ => {}
        }
    }
    false
}
