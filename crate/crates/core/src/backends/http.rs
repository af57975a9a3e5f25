//! HTTP bridge: one JSON POST per request, `{"text": ...}` back.

use std::time::Duration;

use serde_json::{json, Value};

use super::command::parse_text_response;
use super::{AsrBackend, AsrRequest, BackendErrorKind, MtBackend, MtRequest};

/// Environment variable holding an optional bearer token. Credentials are
/// the one setting kept out of config files and manifests.
pub const TOKEN_VAR: &str = "SDTKIT_HTTP_TOKEN";

#[derive(Debug, Clone)]
pub struct HttpBackend {
    endpoint: String,
    timeout_ms: u64,
    max_retries: u32,
    client: reqwest::blocking::Client,
}

impl HttpBackend {
    pub fn new(endpoint: impl Into<String>, timeout_ms: u64, max_retries: u32) -> Result<Self, String> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_millis(timeout_ms))
            .build()
            .map_err(|e| e.to_string())?;
        Ok(HttpBackend {
            endpoint: endpoint.into(),
            timeout_ms,
            max_retries,
            client,
        })
    }

    fn post(&self, body: &Value) -> Result<String, BackendErrorKind> {
        let mut request = self.client.post(&self.endpoint).json(body);
        if let Ok(token) = std::env::var(TOKEN_VAR) {
            request = request.bearer_auth(token);
        }
        let response = request.send().map_err(|e| {
            if e.is_timeout() {
                BackendErrorKind::Timeout(self.timeout_ms)
            } else {
                BackendErrorKind::Transport(e.to_string())
            }
        })?;
        let status = response.status();
        let text = response
            .text()
            .map_err(|e| BackendErrorKind::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(BackendErrorKind::Transport(format!("HTTP {status}: {text:.200}")));
        }
        parse_text_response(&text)
    }
}

impl AsrBackend for HttpBackend {
    fn identity(&self) -> String {
        format!("http:{}", self.endpoint)
    }

    fn max_retries(&self) -> u32 {
        self.max_retries
    }

    fn transcribe(&self, req: &AsrRequest) -> Result<String, BackendErrorKind> {
        let path = req
            .audio_path
            .as_ref()
            .map(|p| p.display().to_string())
            .or_else(|| req.audio.as_ref().map(|a| a.path.clone()));
        self.post(&json!({"id": req.id, "audio_path": path, "language": req.language.code()}))
    }
}

impl MtBackend for HttpBackend {
    fn identity(&self) -> String {
        format!("http:{}", self.endpoint)
    }

    fn max_retries(&self) -> u32 {
        self.max_retries
    }

    fn translate(&self, req: &MtRequest) -> Result<String, BackendErrorKind> {
        self.post(&json!({"id": req.id, "text": req.text, "src": req.src_tag, "tgt": req.tgt_tag}))
    }
}
