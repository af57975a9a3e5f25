//! Context composition for context-aware translation.
//!
//! Three kinds of context are built from the turns preceding the current
//! one, restricted to the `c` most recent turns:
//!
//! * **monolingual**: every previous turn in one language. At inference,
//!   turns spoken in that language contribute their ASR transcript and the
//!   other turns contribute the MT output (into that language) of their
//!   transcript.
//! * **bilingual source**: every previous turn in the language it was spoken,
//!   from ASR transcripts only.
//! * **bilingual target**: the language-flip of the bilingual source, gold
//!   only (training side).
//!
//! Training always uses gold text. Rendered inputs join context segments and
//! the current utterance with a literal separator, `</s>` by default.

mod pairs;

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedDialogue, CorpusError};
use crate::lang::Lang;

pub use pairs::{build_training_pairs, write_training_pairs, PairFiles, TranslationUnit};

pub const DEFAULT_SEPARATOR: &str = "</s>";
pub const DEFAULT_CONTEXT_WIDTH: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum ContextError {
    #[error("dialogue {dialogue}: no {kind} hypothesis for turn {t}{}", lang.map(|l| format!(" into {l}")).unwrap_or_default())]
    MissingHypothesis {
        dialogue: String,
        t: usize,
        kind: &'static str,
        lang: Option<Lang>,
    },
    #[error("context segment for turn {t} contains the separator `{sep}`")]
    SegmentContainsSeparator { t: usize, sep: String },
    #[error("current utterance contains the separator `{0}`")]
    CurrentContainsSeparator(String),
    #[error("current utterance is empty")]
    EmptyCurrent,
    #[error("separator must not be empty")]
    EmptySeparator,
    #[error("dialogue {dialogue} has no turn {t}")]
    TurnOutOfRange { dialogue: String, t: usize },
    #[error("mode {0} needs a translation direction")]
    MissingDirection(ContextMode),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("failed to write {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Where the text of a context entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Gold,
    Asr,
    Mt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextEntry {
    pub t: usize,
    pub language: Lang,
    /// May be empty for hypothesis origins (a recognizer can emit nothing,
    /// and an empty transcript translates to nothing).
    pub text: String,
    pub origin: Origin,
}

/// Previous turns in ascending order of `t`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextWindow {
    entries: Vec<ContextEntry>,
}

impl ContextWindow {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[ContextEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.text.as_str())
    }

    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.t).collect()
    }
}

/// Whether context text comes from gold transcripts (training) or from
/// recognizer and translator outputs (inference).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextPolicy {
    Gold,
    Hypothesis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContextMode {
    None,
    Mono,
    Bilingual,
}

impl ContextMode {
    pub const ALL: [ContextMode; 3] = [ContextMode::None, ContextMode::Mono, ContextMode::Bilingual];

    pub fn name(self) -> &'static str {
        match self {
            ContextMode::None => "none",
            ContextMode::Mono => "mono",
            ContextMode::Bilingual => "bilingual",
        }
    }
}

impl fmt::Display for ContextMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ContextMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(ContextMode::None),
            "mono" | "monolingual" => Ok(ContextMode::Mono),
            "bilingual" | "bi" => Ok(ContextMode::Bilingual),
            _ => Err(format!("unknown context mode `{s}` (expected none, mono or bilingual)")),
        }
    }
}

/// Read access to recognizer and translator outputs of one dialogue.
pub trait HypothesisSource {
    fn asr(&self, t: usize) -> Option<&str>;
    /// Translation of turn `t`'s transcript into `lang`.
    fn mt(&self, t: usize, lang: Lang) -> Option<&str>;
}

/// A source with no hypotheses, for gold-policy composition.
pub struct GoldOnly;

impl HypothesisSource for GoldOnly {
    fn asr(&self, _t: usize) -> Option<&str> {
        None
    }

    fn mt(&self, _t: usize, _lang: Lang) -> Option<&str> {
        None
    }
}

/// Indices of the constrained context of turn `t`: `max(1, t-c) ..= t-1`.
pub fn context_range(c: usize, t: usize) -> RangeInclusive<usize> {
    let start = t.saturating_sub(c).max(1);
    // empty when c == 0 or t <= 1
    start..=t.saturating_sub(1)
}

/// Keeps the entries of `history` that fall in the width-`c` window before `t`.
pub fn constrain(history: impl IntoIterator<Item = ContextEntry>, c: usize, t: usize) -> ContextWindow {
    let range = context_range(c, t);
    let mut entries: Vec<ContextEntry> = history.into_iter().filter(|e| range.contains(&e.t)).collect();
    entries.sort_by_key(|e| e.t);
    entries.dedup_by_key(|e| e.t);
    ContextWindow { entries }
}

fn check_turn(d: &AnnotatedDialogue, t: usize) -> Result<(), ContextError> {
    if t == 0 || t > d.len() {
        return Err(ContextError::TurnOutOfRange {
            dialogue: d.id(),
            t,
        });
    }
    Ok(())
}

fn missing(d: &AnnotatedDialogue, t: usize, kind: &'static str, lang: Option<Lang>) -> ContextError {
    ContextError::MissingHypothesis {
        dialogue: d.id(),
        t,
        kind,
        lang,
    }
}

/// Context of turn `t` rendered entirely in `lang`.
pub fn monolingual_context(
    d: &AnnotatedDialogue,
    t: usize,
    c: usize,
    lang: Lang,
    policy: TextPolicy,
    store: &dyn HypothesisSource,
) -> Result<ContextWindow, ContextError> {
    check_turn(d, t)?;
    let mut entries = Vec::new();
    for tau in context_range(c, t) {
        let turn = &d.turns[tau - 1];
        let entry = match policy {
            TextPolicy::Gold => ContextEntry {
                t: tau,
                language: lang,
                text: turn.gold.get(lang).clone(),
                origin: Origin::Gold,
            },
            TextPolicy::Hypothesis if turn.spoken == lang => ContextEntry {
                t: tau,
                language: lang,
                text: store.asr(tau).ok_or_else(|| missing(d, tau, "asr", None))?.to_string(),
                origin: Origin::Asr,
            },
            TextPolicy::Hypothesis => ContextEntry {
                t: tau,
                language: lang,
                text: store
                    .mt(tau, lang)
                    .ok_or_else(|| missing(d, tau, "mt", Some(lang)))?
                    .to_string(),
                origin: Origin::Mt,
            },
        };
        entries.push(entry);
    }
    Ok(ContextWindow { entries })
}

/// Source-side bilingual context: each previous turn in its spoken language.
/// Never reads translator outputs.
pub fn bilingual_context_source(
    d: &AnnotatedDialogue,
    t: usize,
    c: usize,
    policy: TextPolicy,
    store: &dyn HypothesisSource,
) -> Result<ContextWindow, ContextError> {
    check_turn(d, t)?;
    let mut entries = Vec::new();
    for tau in context_range(c, t) {
        let turn = &d.turns[tau - 1];
        let (text, origin) = match policy {
            TextPolicy::Gold => (turn.spoken_gold().to_string(), Origin::Gold),
            TextPolicy::Hypothesis => (
                store.asr(tau).ok_or_else(|| missing(d, tau, "asr", None))?.to_string(),
                Origin::Asr,
            ),
        };
        entries.push(ContextEntry {
            t: tau,
            language: turn.spoken,
            text,
            origin,
        });
    }
    Ok(ContextWindow { entries })
}

/// Target-side bilingual context: each previous turn's gold text in the
/// language opposite to the one it was spoken in.
pub fn bilingual_context_target(d: &AnnotatedDialogue, t: usize, c: usize) -> Result<ContextWindow, ContextError> {
    check_turn(d, t)?;
    let entries = context_range(c, t)
        .map(|tau| {
            let turn = &d.turns[tau - 1];
            let language = turn.spoken.other();
            ContextEntry {
                t: tau,
                language,
                text: turn.gold.get(language).clone(),
                origin: Origin::Gold,
            }
        })
        .collect();
    Ok(ContextWindow { entries })
}

/// Joins the window's segments and the current utterance:
/// `seg1 SEP seg2 SEP ... segk SEP current`. No separator is added when the
/// window is empty. Language tags are not part of the rendered text.
pub fn render_input(window: &ContextWindow, current: &str, sep: &str) -> Result<String, ContextError> {
    if sep.is_empty() {
        return Err(ContextError::EmptySeparator);
    }
    if current.trim().is_empty() {
        return Err(ContextError::EmptyCurrent);
    }
    if current.contains(sep) {
        return Err(ContextError::CurrentContainsSeparator(sep.to_string()));
    }
    let mut out = String::new();
    for e in window.entries() {
        if e.text.contains(sep) {
            return Err(ContextError::SegmentContainsSeparator {
                t: e.t,
                sep: sep.to_string(),
            });
        }
        out.push_str(&e.text);
        out.push_str(sep);
    }
    out.push_str(current);
    Ok(out)
}

/// Recovers the current utterance from a context-bearing output: the last
/// non-empty separator-delimited segment, trimmed. Returns `None` when the
/// output has no non-empty segment at all.
pub fn extract_current(output: &str, sep: &str) -> Option<String> {
    let last = if sep.is_empty() {
        Some(output.trim())
    } else {
        output.split(sep).map(str::trim).filter(|s| !s.is_empty()).last()
    };
    last.filter(|s| !s.is_empty()).map(str::to_string)
}
