//! Bilingual dialogue corpus: scenarios, cross-language dialogue derivation
//! and corpus statistics.
//!
//! All values are immutable after loading and can be shared freely between
//! worker threads.

mod load;
mod speechbsd;
mod split;
mod stats;
pub mod synthetic;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lang::{Lang, PerLang};

pub use load::{corpus_to_json, load_corpus, parse_corpus, validate_separator};
pub use speechbsd::import_speechbsd;
pub use split::{
    assign_languages, recompose_monolingual, recompose_scenario, split_scenario, AnnotatedDialogue,
    AnnotatedTurn, CrossLanguageDialogue, PartId, RecomposedPair, Turn, Variant,
};
pub use stats::{corpus_stats, wav_duration, CorpusStats, GenderSplit};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("schema violation in scenario {scenario}, field `{field}`: {message}")]
    Schema {
        scenario: String,
        field: String,
        message: String,
    },
    #[error("duplicate scenario id `{0}`")]
    DuplicateScenario(String),
    #[error("scenario {scenario}, utterance {t}: {lang} audio {path}: {message}")]
    Audio {
        scenario: String,
        t: usize,
        lang: Lang,
        path: String,
        message: String,
    },
    #[error("dialogue {dialogue} is inconsistent with its scenario: {message}")]
    InconsistentDialogue { dialogue: String, message: String },
    #[error("dialogue {dialogue}, direction {direction}: missing predictions for turns {missing:?}")]
    MissingPredictions {
        dialogue: String,
        direction: String,
        missing: Vec<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "dev" | "valid" | "validation" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split `{s}` (expected train, dev or test)")),
        }
    }
}

/// A speaker within one scenario, numbered by first appearance (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpeakerId {
    pub label: String,
    pub appearance_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gender {
    M,
    F,
}

impl FromStr for Gender {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "M" | "m" => Ok(Gender::M),
            "F" | "f" => Ok(Gender::F),
            _ => Err(format!("unknown gender `{s}` (expected M or F)")),
        }
    }
}

/// A recording of one utterance in one language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioRef {
    /// Path as written in the corpus file; relative paths resolve against the
    /// corpus file's directory.
    pub path: String,
    /// Seconds. When absent it is read from the WAV header on demand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    pub gender: Gender,
    pub homeplace: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub t: usize,
    pub speaker: SpeakerId,
    /// Gold text in both languages, never empty.
    pub text: PerLang<String>,
    pub audio: PerLang<Option<AudioRef>>,
}

impl Utterance {
    pub fn gold(&self, lang: Lang) -> &str {
        self.text.get(lang)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub tag: String,
    pub title: String,
    pub original_language: Lang,
    pub utterances: Vec<Utterance>,
}

impl Scenario {
    /// Utterance at 1-based position `t`.
    pub fn utterance(&self, t: usize) -> Option<&Utterance> {
        t.checked_sub(1).and_then(|i| self.utterances.get(i))
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn speaker_count(&self) -> usize {
        self.utterances
            .iter()
            .map(|u| u.speaker.appearance_index)
            .max()
            .unwrap_or(0)
    }
}

/// One loaded split.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub split: Split,
    /// Directory that relative audio paths resolve against.
    pub audio_root: PathBuf,
    pub scenarios: Vec<Scenario>,
}

impl Corpus {
    pub fn sentence_count(&self) -> usize {
        self.scenarios.iter().map(Scenario::len).sum()
    }

    pub fn stats(&self) -> Result<CorpusStats, CorpusError> {
        corpus_stats(&self.scenarios, self.split, &self.audio_root)
    }
}
