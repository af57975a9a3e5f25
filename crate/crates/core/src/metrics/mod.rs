//! Scoring and analysis: corpus BLEU with pluggable tokenizers, WER/CER,
//! paired approximate randomization, zero-pronoun tooling and reports.

mod bleu;
mod edit;
mod report;
mod sigtest;
mod tokenize;
mod zero_pronoun;

pub use bleu::{bleu_corpus, bleu_from_stats, sentence_stats, BleuScore, CorpusBleu, SentenceStats, MAX_ORDER};
pub use edit::{asr_error_rate, cer, edit_distance, edit_stats, normalize_words, wer, EditStats, ErrorUnit};
pub use report::{AsrScore, DirectionScore, EvalReport, NamedSigTest};
pub use sigtest::{paired_approx_randomization, Additive, SigTestResult, DEFAULT_ALPHA, DEFAULT_TRIALS};
pub use tokenize::{tokenize_13a, tokenize_char, Tokenizer};
pub use zero_pronoun::{
    build_sheet, ingest_annotations, read_sheet, render_examples, sample_manual_eval, tokenize_clitics, write_sheet,
    zero_pronoun_candidates, CandidateReport, Judgment, Pronoun, SheetRow, Tally, ZeroPronounRecord,
};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("{what}: {left} hypotheses vs {right} references")]
    LengthMismatch { what: &'static str, left: usize, right: usize },
    #[error("cannot score an empty corpus")]
    EmptyCorpus,
    #[error("reference is empty")]
    EmptyReference,
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("requested a sample of {requested} but only {available} candidates exist")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("line {line}: unknown judgment `{label}` (expected correct, incorrect, not_zero_pronoun or empty)")]
    UnknownJudgment { line: usize, label: String },
    #[error("unknown tokenizer `{0}` (expected 13a, char or none)")]
    UnknownTokenizer(String),
    #[error("annotation sheet: {0}")]
    Sheet(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}
