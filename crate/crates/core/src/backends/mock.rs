//! Deterministic mock engines.
//!
//! Mocks are pure functions of their request and seed: the same input gives
//! byte-identical output regardless of call order or concurrency.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{AsrBackend, AsrRequest, BackendErrorKind, MtBackend, MtRequest};
use crate::context::DEFAULT_SEPARATOR;
use crate::lang::Lang;

fn reference(req: &AsrRequest) -> Result<&str, BackendErrorKind> {
    req.reference
        .as_deref()
        .ok_or_else(|| BackendErrorKind::InvalidRequest("mock recognizer needs the reference text".into()))
}

/// Returns the gold transcript in the requested language.
#[derive(Debug, Clone, Copy, Default)]
pub struct GoldEchoAsr;

impl AsrBackend for GoldEchoAsr {
    fn identity(&self) -> String {
        "mock:gold-echo".into()
    }

    fn needs_audio(&self) -> bool {
        false
    }

    fn transcribe(&self, req: &AsrRequest) -> Result<String, BackendErrorKind> {
        reference(req).map(str::to_string)
    }
}

/// Gold transcript with seeded word (English) or character (Japanese)
/// deletions, substitutions and duplications at `rate` per unit.
#[derive(Debug, Clone, Copy)]
pub struct NoisyAsr {
    seed: u64,
    rate: f64,
}

impl NoisyAsr {
    pub fn new(seed: u64, rate: f64) -> Self {
        NoisyAsr {
            seed,
            rate: rate.clamp(0.0, 1.0),
        }
    }
}

impl AsrBackend for NoisyAsr {
    fn identity(&self) -> String {
        format!("mock:noisy(rate={},seed={})", self.rate, self.seed)
    }

    fn needs_audio(&self) -> bool {
        false
    }

    fn transcribe(&self, req: &AsrRequest) -> Result<String, BackendErrorKind> {
        Ok(corrupt(reference(req)?, req.language, self.rate, self.seed, &req.id))
    }
}

fn keyed_rng(seed: u64, key: &str) -> ChaCha8Rng {
    let digest = Sha256::new().chain_update(seed.to_le_bytes()).chain_update(key.as_bytes()).finalize();
    let mut bytes = [0u8; 32];
    bytes.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(bytes)
}

/// Seeded corruption of `text`. Pure in all of its arguments.
pub fn corrupt(text: &str, language: Lang, rate: f64, seed: u64, key: &str) -> String {
    let units: Vec<String> = match language {
        Lang::En => text.split_whitespace().map(str::to_string).collect(),
        Lang::Ja => text.chars().filter(|c| !c.is_whitespace()).map(String::from).collect(),
    };
    let mut rng = keyed_rng(seed, key);
    let mut out: Vec<String> = Vec::with_capacity(units.len());
    for (i, unit) in units.iter().enumerate() {
        if rng.gen::<f64>() >= rate {
            out.push(unit.clone());
            continue;
        }
        match rng.gen_range(0..3) {
            0 => {}
            1 => {
                // substitute with another unit of the same sentence
                let j = (i + 1 + rng.gen_range(0..units.len().max(1))) % units.len();
                out.push(if j == i { "*".repeat(unit.chars().count()) } else { units[j].clone() });
            }
            _ => {
                out.push(unit.clone());
                out.push(unit.clone());
            }
        }
    }
    match language {
        Lang::En => out.join(" "),
        Lang::Ja => out.concat(),
    }
}

/// Returns its input unchanged.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMt;

impl MtBackend for IdentityMt {
    fn identity(&self) -> String {
        "mock:identity".into()
    }

    fn translate(&self, req: &MtRequest) -> Result<String, BackendErrorKind> {
        Ok(req.text.clone())
    }
}

/// A substring substitution. With `when_context`, the rule only fires when
/// some context segment of the input contains that string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictionaryRule {
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub when_context: Option<String>,
}

/// Rule-based translator for plumbing tests. The input is split on the
/// separator; the rules are applied in order to every segment, anything
/// unmatched passes through, and the segments are joined back.
#[derive(Debug, Clone)]
pub struct DictionaryMt {
    rules: Vec<DictionaryRule>,
    separator: String,
}

impl DictionaryMt {
    pub fn new(rules: Vec<DictionaryRule>, separator: impl Into<String>) -> Self {
        DictionaryMt {
            rules,
            separator: separator.into(),
        }
    }

    pub fn with_default_separator(rules: Vec<DictionaryRule>) -> Self {
        Self::new(rules, DEFAULT_SEPARATOR)
    }
}

impl MtBackend for DictionaryMt {
    fn identity(&self) -> String {
        format!("mock:dictionary({} rules)", self.rules.len())
    }

    fn translate(&self, req: &MtRequest) -> Result<String, BackendErrorKind> {
        let segments: Vec<&str> = req.text.split(self.separator.as_str()).collect();
        let context = &segments[..segments.len() - 1];
        let active: Vec<&DictionaryRule> = self
            .rules
            .iter()
            .filter(|r| match &r.when_context {
                Some(needle) => context.iter().any(|seg| seg.contains(needle.as_str())),
                None => true,
            })
            .collect();
        let translated: Vec<String> = segments
            .iter()
            .map(|seg| {
                active
                    .iter()
                    .fold(seg.to_string(), |acc, r| acc.replace(&r.from, &r.to))
            })
            .collect();
        Ok(translated.join(&self.separator))
    }
}
