//! Adapter contracts for speech recognition and machine translation engines.
//!
//! Engines plug in behind [`AsrBackend`] and [`MtBackend`]. Three kinds are
//! provided: deterministic mocks, a subprocess bridge speaking one JSON
//! object per line, and an HTTP bridge posting JSON. Retries and timing are
//! handled once, in [`transcribe`] and [`translate`].

mod batch;
mod command;
mod config;
mod http;
pub mod mock;

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::corpus::AudioRef;
use crate::lang::Lang;

pub use batch::{batch, batch_transcribe, batch_translate, ordered_parallel_map, BatchOutcome};
pub use command::CommandBackend;
pub use config::{build_asr, build_mt, BackendConfig, BackendKind, ConfigError, MockSpec};
pub use http::{HttpBackend, TOKEN_VAR as HTTP_TOKEN_VAR};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsrRequest {
    /// Utterance identifier, echoed in errors (`scenario/variant#t`).
    pub id: String,
    pub audio: Option<AudioRef>,
    /// Resolved location of the recording, if any.
    pub audio_path: Option<PathBuf>,
    pub language: Lang,
    /// Gold transcript. Only mock recognizers look at it.
    pub reference: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsrResult {
    pub text: String,
    pub elapsed_ms: u64,
}

impl AsrResult {
    pub fn is_empty(&self) -> bool {
        self.text.trim().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MtRequest {
    pub id: String,
    pub text: String,
    pub src_tag: String,
    pub tgt_tag: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MtResult {
    pub text: String,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
pub enum BackendErrorKind {
    #[error("timed out after {0} ms")]
    Timeout(u64),
    #[error("backend exited with status {code:?}: {stderr}")]
    ExitStatus { code: Option<i32>, stderr: String },
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("no audio for this utterance")]
    MissingAudio,
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

impl BackendErrorKind {
    fn retryable(&self) -> bool {
        !matches!(self, BackendErrorKind::MissingAudio | BackendErrorKind::InvalidRequest(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{id}: {kind} (after {attempts} attempt(s))")]
pub struct BackendError {
    pub id: String,
    pub kind: BackendErrorKind,
    pub attempts: u32,
}

pub trait AsrBackend: Send + Sync {
    /// Stable description recorded in run manifests.
    fn identity(&self) -> String;

    /// Whether requests must carry audio. Mocks answer from the reference.
    fn needs_audio(&self) -> bool {
        true
    }

    fn max_retries(&self) -> u32 {
        0
    }

    fn transcribe(&self, req: &AsrRequest) -> Result<String, BackendErrorKind>;
}

pub trait MtBackend: Send + Sync {
    fn identity(&self) -> String;

    fn max_retries(&self) -> u32 {
        0
    }

    fn translate(&self, req: &MtRequest) -> Result<String, BackendErrorKind>;
}

fn with_retries(
    id: &str,
    max_retries: u32,
    mut call: impl FnMut() -> Result<String, BackendErrorKind>,
) -> Result<(String, u64), BackendError> {
    let start = Instant::now();
    let mut attempts = 0;
    loop {
        attempts += 1;
        match call() {
            Ok(text) => return Ok((text, start.elapsed().as_millis() as u64)),
            Err(kind) if kind.retryable() && attempts <= max_retries => {
                log::warn!("{id}: attempt {attempts} failed: {kind}; retrying");
            }
            Err(kind) => {
                return Err(BackendError {
                    id: id.to_string(),
                    kind,
                    attempts,
                })
            }
        }
    }
}

/// Runs one recognition request. Empty transcripts are returned as-is and
/// logged.
pub fn transcribe(req: &AsrRequest, backend: &dyn AsrBackend) -> Result<AsrResult, BackendError> {
    if backend.needs_audio() && req.audio.is_none() && req.audio_path.is_none() {
        return Err(BackendError {
            id: req.id.clone(),
            kind: BackendErrorKind::MissingAudio,
            attempts: 0,
        });
    }
    let (text, elapsed_ms) = with_retries(&req.id, backend.max_retries(), || backend.transcribe(req))?;
    let result = AsrResult { text, elapsed_ms };
    if result.is_empty() {
        log::warn!("{}: recognizer returned an empty transcript", req.id);
    }
    Ok(result)
}

/// Runs one translation request after checking the tag pair.
pub fn translate(req: &MtRequest, backend: &dyn MtBackend) -> Result<MtResult, BackendError> {
    if req.src_tag == req.tgt_tag {
        return Err(BackendError {
            id: req.id.clone(),
            kind: BackendErrorKind::InvalidRequest(format!("source and target tag are both `{}`", req.src_tag)),
            attempts: 0,
        });
    }
    let (text, elapsed_ms) = with_retries(&req.id, backend.max_retries(), || backend.translate(req))?;
    Ok(MtResult { text, elapsed_ms })
}
