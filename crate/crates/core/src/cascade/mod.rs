//! Cascaded recognition and translation over cross-language dialogues.
//!
//! Each dialogue is recognized turn by turn, then translated turn by turn
//! with context taken from a per-dialogue [`HypothesisStore`]. Dialogues are
//! independent and run in parallel.

mod experiment;
mod stages;
mod store;

pub use experiment::{
    run_experiment, sweep, sweep_dir_name, BackendIdentities, CorpusInfo, ExperimentResult, Manifest, RunConfig,
};
pub use stages::{
    run_asr_stage, run_dialogue, run_translation_stage, DialogueOutcome, TranslationOutput, TranslationSettings,
};
pub use store::{discipline_violations, Access, AccessKind, HypothesisStore, StoreReader};

use crate::backends::ConfigError;
use crate::context::ContextError;
use crate::corpus::CorpusError;
use crate::metrics::MetricsError;

#[derive(Debug, thiserror::Error)]
pub enum CascadeError {
    #[error("dialogue {dialogue}: {kind} hypothesis for turn {t} written twice")]
    DuplicateWrite { dialogue: String, t: usize, kind: &'static str },
    #[error("dialogue {dialogue}: no {kind} hypothesis for turn {t}")]
    MissingStoreEntry { dialogue: String, t: usize, kind: &'static str },
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Backend(#[from] ConfigError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("failed to write {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}
