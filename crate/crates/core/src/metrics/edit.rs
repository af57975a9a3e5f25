use serde::{Deserialize, Serialize};

use super::sigtest::Additive;
use super::MetricsError;
use crate::lang::Lang;

/// Edit operations against a reference, summable over a corpus.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditStats {
    pub errors: u64,
    pub ref_len: u64,
}

impl EditStats {
    pub fn rate(&self) -> f64 {
        if self.ref_len == 0 {
            f64::NAN
        } else {
            self.errors as f64 / self.ref_len as f64
        }
    }
}

impl Additive for EditStats {
    fn add_assign(&mut self, other: &Self) {
        self.errors += other.errors;
        self.ref_len += other.ref_len;
    }
}

/// Minimal number of substitutions, deletions and insertions turning `a`
/// into `b`.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let next = (diag + usize::from(x != y)).min(row[j] + 1).min(row[j + 1] + 1);
            diag = row[j + 1];
            row[j + 1] = next;
        }
    }
    row[b.len()]
}

pub fn edit_stats<T: PartialEq>(reference: &[T], hyp: &[T]) -> EditStats {
    EditStats {
        errors: edit_distance(reference, hyp) as u64,
        ref_len: reference.len() as u64,
    }
}

/// Word error rate over token sequences.
pub fn wer<T: AsRef<str>>(ref_tokens: &[T], hyp_tokens: &[T]) -> Result<f64, MetricsError> {
    if ref_tokens.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let r: Vec<&str> = ref_tokens.iter().map(AsRef::as_ref).collect();
    let h: Vec<&str> = hyp_tokens.iter().map(AsRef::as_ref).collect();
    Ok(edit_stats(&r, &h).rate())
}

/// Character error rate. Every character counts, including spaces.
pub fn cer(reference: &str, hyp: &str) -> Result<f64, MetricsError> {
    let r: Vec<char> = reference.chars().collect();
    if r.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    let h: Vec<char> = hyp.chars().collect();
    Ok(edit_stats(&r, &h).rate())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorUnit {
    Word,
    Char,
}

impl ErrorUnit {
    /// Words for English, characters for Japanese.
    pub fn for_lang(lang: Lang) -> ErrorUnit {
        match lang {
            Lang::En => ErrorUnit::Word,
            Lang::Ja => ErrorUnit::Char,
        }
    }
}

/// Lowercased words with punctuation removed, for recognizer scoring.
/// Apostrophes inside words survive ("it's").
pub fn normalize_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.chars()
                .filter(|c| c.is_alphanumeric() || *c == '\'')
                .collect::<String>()
                .trim_matches('\'')
                .to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

fn normalize_chars(text: &str) -> Vec<char> {
    text.chars().filter(|c| c.is_alphanumeric()).collect()
}

/// Corpus-level recognizer error rate: errors summed over all utterances
/// divided by the summed reference length. English is scored on normalized
/// words, Japanese on characters with whitespace and punctuation removed.
pub fn asr_error_rate<R: AsRef<str>, H: AsRef<str>>(
    refs: &[R],
    hyps: &[H],
    lang: Lang,
) -> Result<(ErrorUnit, EditStats), MetricsError> {
    if refs.len() != hyps.len() {
        return Err(MetricsError::LengthMismatch {
            what: "error rate",
            left: hyps.len(),
            right: refs.len(),
        });
    }
    let unit = ErrorUnit::for_lang(lang);
    let mut total = EditStats::default();
    for (r, h) in refs.iter().zip(hyps) {
        let s = match unit {
            ErrorUnit::Word => edit_stats(&normalize_words(r.as_ref()), &normalize_words(h.as_ref())),
            ErrorUnit::Char => edit_stats(&normalize_chars(r.as_ref()), &normalize_chars(h.as_ref())),
        };
        total.add_assign(&s);
    }
    if total.ref_len == 0 {
        return Err(MetricsError::EmptyReference);
    }
    Ok((unit, total))
}
