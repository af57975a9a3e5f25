//! Subprocess bridge.
//!
//! Each request runs the configured shell command once. The request is
//! written to the child's stdin as one JSON line (`{"id","text","src","tgt"}`
//! for translation, `{"id","audio_path","language"}` for recognition); the
//! first line of stdout must be a JSON object with a `text` field.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};

use super::{AsrBackend, AsrRequest, BackendErrorKind, MtBackend, MtRequest};

#[derive(Debug, Clone)]
pub struct CommandBackend {
    command: String,
    timeout_ms: u64,
    max_retries: u32,
}

impl CommandBackend {
    pub fn new(command: impl Into<String>, timeout_ms: u64, max_retries: u32) -> Self {
        CommandBackend {
            command: command.into(),
            timeout_ms,
            max_retries,
        }
    }

    fn call(&self, request: &Value) -> Result<String, BackendErrorKind> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| BackendErrorKind::Transport(format!("cannot spawn `{}`: {e}", self.command)))?;

        let mut line = request.to_string();
        line.push('\n');
        if let Some(mut stdin) = child.stdin.take() {
            // a child that exits without reading its input is reported below
            let _ = stdin.write_all(line.as_bytes());
        }

        let mut stdout = child.stdout.take().expect("stdout is piped");
        let mut stderr = child.stderr.take().expect("stderr is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            let mut out = String::new();
            let res = stdout.read_to_string(&mut out).map(|_| out);
            let _ = tx.send(res);
        });
        let err_reader = thread::spawn(move || {
            let mut err = String::new();
            let _ = stderr.read_to_string(&mut err);
            err
        });

        let output = match rx.recv_timeout(Duration::from_millis(self.timeout_ms)) {
            Ok(res) => res.map_err(|e| BackendErrorKind::Transport(e.to_string()))?,
            Err(_) => {
                let _ = child.kill();
                let _ = child.wait();
                return Err(BackendErrorKind::Timeout(self.timeout_ms));
            }
        };
        let status = child.wait().map_err(|e| BackendErrorKind::Transport(e.to_string()))?;
        if !status.success() {
            let mut stderr = err_reader.join().unwrap_or_default();
            stderr.truncate(500);
            return Err(BackendErrorKind::ExitStatus {
                code: status.code(),
                stderr: stderr.trim().to_string(),
            });
        }
        let first = output
            .lines()
            .next()
            .ok_or_else(|| BackendErrorKind::Malformed("no response line".into()))?;
        parse_text_response(first)
    }
}

/// Parses `{"text": "..."}`.
pub(crate) fn parse_text_response(body: &str) -> Result<String, BackendErrorKind> {
    let value: Value =
        serde_json::from_str(body).map_err(|e| BackendErrorKind::Malformed(format!("{e}: {body:.200}")))?;
    value
        .get("text")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| BackendErrorKind::Malformed(format!("no string field `text` in {body:.200}")))
}

impl AsrBackend for CommandBackend {
    fn identity(&self) -> String {
        format!("command:{}", self.command)
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
        self.call(&json!({"id": req.id, "audio_path": path, "language": req.language.code()}))
    }
}

impl MtBackend for CommandBackend {
    fn identity(&self) -> String {
        format!("command:{}", self.command)
    }

    fn max_retries(&self) -> u32 {
        self.max_retries
    }

    fn translate(&self, req: &MtRequest) -> Result<String, BackendErrorKind> {
        self.call(&json!({"id": req.id, "text": req.text, "src": req.src_tag, "tgt": req.tgt_tag}))
    }
}
