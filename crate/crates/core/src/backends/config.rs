//! Backend configuration files and command-line shorthands.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::command::CommandBackend;
use super::http::HttpBackend;
use super::mock::{DictionaryMt, DictionaryRule, GoldEchoAsr, IdentityMt, NoisyAsr};
use super::{AsrBackend, MtBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Mock,
    Command,
    Http,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MockSpec {
    GoldEcho,
    Noisy { rate: f64 },
    Identity,
    Dictionary { rules: Vec<DictionaryRule> },
}

fn default_timeout_ms() -> u64 {
    60_000
}

/// Keys of a backend config file (TOML or JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendConfig {
    pub kind: BackendKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mock: Option<MockSpec>,
    /// Shell command for `command` backends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// URL for `http` backends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    #[serde(default)]
    pub max_retries: u32,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read backend config {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid backend config: {0}")]
    Invalid(String),
}

impl BackendConfig {
    pub fn mock(spec: MockSpec) -> Self {
        BackendConfig {
            kind: BackendKind::Mock,
            mock: Some(spec),
            command: None,
            endpoint: None,
            timeout_ms: default_timeout_ms(),
            max_retries: 0,
        }
    }

    /// Accepts a config file path or a shorthand: `gold-echo`, `noisy:RATE`,
    /// `identity`, `dictionary:RULES_FILE`, `command:SHELL_COMMAND`,
    /// `http:URL`.
    pub fn from_arg(arg: &str) -> Result<Self, ConfigError> {
        let path = Path::new(arg);
        if path.is_file() {
            return Self::from_file(path);
        }
        let invalid = |m: String| ConfigError::Invalid(m);
        let (head, rest) = arg.split_once(':').unwrap_or((arg, ""));
        let config = match head {
            "gold-echo" => Self::mock(MockSpec::GoldEcho),
            "identity" => Self::mock(MockSpec::Identity),
            "noisy" => {
                let rate: f64 = rest
                    .parse()
                    .map_err(|_| invalid(format!("noisy rate `{rest}` is not a number")))?;
                Self::mock(MockSpec::Noisy { rate })
            }
            "dictionary" => {
                #[derive(Deserialize)]
                struct Rules {
                    rules: Vec<DictionaryRule>,
                }
                let text = std::fs::read_to_string(rest).map_err(|e| ConfigError::Read {
                    path: rest.to_string(),
                    message: e.to_string(),
                })?;
                let rules: Rules = toml::from_str(&text).map_err(|e| ConfigError::Read {
                    path: rest.to_string(),
                    message: e.to_string(),
                })?;
                Self::mock(MockSpec::Dictionary { rules: rules.rules })
            }
            "command" | "cmd" => BackendConfig {
                kind: BackendKind::Command,
                command: Some(rest.to_string()),
                ..Self::mock(MockSpec::Identity)
            },
            "http" | "https" => BackendConfig {
                kind: BackendKind::Http,
                endpoint: Some(arg.to_string()),
                ..Self::mock(MockSpec::Identity)
            },
            _ => return Err(invalid(format!("`{arg}` is neither a config file nor a known backend shorthand"))),
        };
        let config = BackendConfig {
            mock: if config.kind == BackendKind::Mock { config.mock } else { None },
            ..config
        };
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let read_err = |message: String| ConfigError::Read {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| read_err(e.to_string()))?;
        let config: BackendConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| read_err(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| read_err(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.timeout_ms == 0 {
            return invalid("timeout_ms must be positive");
        }
        match self.kind {
            BackendKind::Mock if self.mock.is_none() => invalid("mock backend without a `mock` spec"),
            BackendKind::Command if self.command.as_deref().is_none_or(|c| c.trim().is_empty()) => {
                invalid("command backend without a `command`")
            }
            BackendKind::Http if self.endpoint.as_deref().is_none_or(|e| e.trim().is_empty()) => {
                invalid("http backend without an `endpoint`")
            }
            _ => {
                if let Some(MockSpec::Noisy { rate }) = self.mock {
                    if !(0.0..=1.0).contains(&rate) {
                        return invalid("noisy rate must lie in [0, 1]");
                    }
                }
                Ok(())
            }
        }
    }
}

/// Builds a recognizer. `seed` feeds seeded mocks.
pub fn build_asr(config: &BackendConfig, seed: u64) -> Result<Arc<dyn AsrBackend>, ConfigError> {
    config.validate()?;
    Ok(match config.kind {
        BackendKind::Mock => match config.mock.as_ref().expect("validated") {
            MockSpec::GoldEcho => Arc::new(GoldEchoAsr),
            MockSpec::Noisy { rate } => Arc::new(NoisyAsr::new(seed, *rate)),
            other => return Err(ConfigError::Invalid(format!("{other:?} is not a recognizer mock"))),
        },
        BackendKind::Command => Arc::new(CommandBackend::new(
            config.command.clone().expect("validated"),
            config.timeout_ms,
            config.max_retries,
        )),
        BackendKind::Http => Arc::new(
            HttpBackend::new(config.endpoint.clone().expect("validated"), config.timeout_ms, config.max_retries)
                .map_err(ConfigError::Invalid)?,
        ),
    })
}

/// Builds a translator. `separator` is the context separator the dictionary
/// mock splits on.
pub fn build_mt(config: &BackendConfig, separator: &str) -> Result<Arc<dyn MtBackend>, ConfigError> {
    config.validate()?;
    Ok(match config.kind {
        BackendKind::Mock => match config.mock.as_ref().expect("validated") {
            MockSpec::Identity => Arc::new(IdentityMt),
            MockSpec::Dictionary { rules } => Arc::new(DictionaryMt::new(rules.clone(), separator)),
            other => return Err(ConfigError::Invalid(format!("{other:?} is not a translator mock"))),
        },
        BackendKind::Command => Arc::new(CommandBackend::new(
            config.command.clone().expect("validated"),
            config.timeout_ms,
            config.max_retries,
        )),
        BackendKind::Http => Arc::new(
            HttpBackend::new(config.endpoint.clone().expect("validated"), config.timeout_ms, config.max_retries)
                .map_err(ConfigError::Invalid)?,
        ),
    })
}
