use serde::{Deserialize, Serialize};

use super::bleu::BleuScore;
use super::edit::ErrorUnit;
use super::sigtest::SigTestResult;
use super::tokenize::Tokenizer;
use super::zero_pronoun::Tally;
use crate::lang::{Direction, Lang};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionScore {
    pub direction: Direction,
    pub sentences: usize,
    pub tokenizer: Tokenizer,
    pub bleu: BleuScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsrScore {
    pub language: Lang,
    pub unit: ErrorUnit,
    pub errors: u64,
    pub ref_len: u64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedSigTest {
    pub direction: Direction,
    pub system_a: String,
    pub system_b: String,
    pub result: SigTestResult,
}

/// Machine-readable evaluation summary written next to a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub bleu: Vec<DirectionScore>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub asr: Vec<AsrScore>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub significance: Vec<NamedSigTest>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zero_pronoun: Vec<(String, Tally)>,
}

impl EvalReport {
    pub fn bleu_for(&self, direction: Direction) -> Option<&DirectionScore> {
        self.bleu.iter().find(|d| d.direction == direction)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
