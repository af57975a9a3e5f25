//! Cross-language dialogue derivation.
//!
//! Each scenario yields two dialogues. Speakers are numbered by first
//! appearance; in variant A odd-numbered speakers speak Japanese and
//! even-numbered speakers English, variant B is the mirror image. A speaker
//! and the language they speak form a *part*, so a two-speaker scenario has
//! four parts across both variants. A speaker who re-enters after others
//! spoke stays in their original part.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AudioRef, CorpusError, Scenario, SpeakerId};
use crate::lang::{Direction, Lang, PerLang};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    A,
    B,
}

impl Variant {
    pub const BOTH: [Variant; 2] = [Variant::A, Variant::B];

    /// Language of the first speaker (and every odd-numbered speaker).
    pub fn first_language(self) -> Lang {
        match self {
            Variant::A => Lang::Ja,
            Variant::B => Lang::En,
        }
    }

    /// Parity rule: speakers with the same parity share a language.
    pub fn language_of(self, appearance_index: usize) -> Lang {
        if appearance_index % 2 == 1 {
            self.first_language()
        } else {
            self.first_language().other()
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A speaker speaking one language; the unit a single voice actor records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartId {
    pub speaker: usize,
    pub language: Lang,
}

impl fmt::Display for PartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}:{}", self.speaker, self.language)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub t: usize,
    pub spoken: Lang,
    pub part: PartId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossLanguageDialogue {
    pub scenario_id: String,
    pub variant: Variant,
    pub turns: Vec<Turn>,
}

impl CrossLanguageDialogue {
    pub fn id(&self) -> String {
        format!("{}/{}", self.scenario_id, self.variant)
    }

    pub fn turn(&self, t: usize) -> Option<&Turn> {
        t.checked_sub(1).and_then(|i| self.turns.get(i))
    }

    /// Turns spoken in the direction's source language.
    pub fn turns_in(&self, direction: Direction) -> impl Iterator<Item = &Turn> {
        self.turns.iter().filter(move |turn| turn.spoken == direction.src())
    }

    pub fn parts(&self) -> Vec<PartId> {
        let mut parts: Vec<PartId> = self.turns.iter().map(|turn| turn.part).collect();
        parts.sort();
        parts.dedup();
        parts
    }
}

/// Derives both cross-language dialogues of a scenario.
pub fn split_scenario(s: &Scenario) -> (CrossLanguageDialogue, CrossLanguageDialogue) {
    let derive = |variant: Variant| CrossLanguageDialogue {
        scenario_id: s.id.clone(),
        variant,
        turns: s
            .utterances
            .iter()
            .map(|u| {
                let spoken = variant.language_of(u.speaker.appearance_index);
                Turn {
                    t: u.t,
                    spoken,
                    part: PartId {
                        speaker: u.speaker.appearance_index,
                        language: spoken,
                    },
                }
            })
            .collect(),
    };
    (derive(Variant::A), derive(Variant::B))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedTurn {
    pub t: usize,
    pub speaker: SpeakerId,
    pub spoken: Lang,
    pub part: PartId,
    pub gold: PerLang<String>,
    /// Recording in the spoken language, if the corpus has one.
    pub audio: Option<AudioRef>,
}

impl AnnotatedTurn {
    pub fn direction(&self) -> Direction {
        Direction::from_source(self.spoken)
    }

    pub fn spoken_gold(&self) -> &str {
        self.gold.get(self.spoken)
    }
}

/// A cross-language dialogue joined with its scenario's speakers, gold text
/// and audio. This is what context composition and the cascade work on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedDialogue {
    pub scenario_id: String,
    pub variant: Variant,
    pub turns: Vec<AnnotatedTurn>,
}

impl AnnotatedDialogue {
    pub fn id(&self) -> String {
        format!("{}/{}", self.scenario_id, self.variant)
    }

    pub fn turn(&self, t: usize) -> Option<&AnnotatedTurn> {
        t.checked_sub(1).and_then(|i| self.turns.get(i))
    }

    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn turns_in(&self, direction: Direction) -> impl Iterator<Item = &AnnotatedTurn> {
        self.turns.iter().filter(move |turn| turn.spoken == direction.src())
    }
}

/// Checks `d` against `s` and the parity rule, and attaches speakers, gold
/// text and audio to every turn.
pub fn assign_languages(
    d: &CrossLanguageDialogue,
    s: &Scenario,
) -> Result<AnnotatedDialogue, CorpusError> {
    let fail = |message: String| CorpusError::InconsistentDialogue {
        dialogue: d.id(),
        message,
    };
    if d.scenario_id != s.id {
        return Err(fail(format!("derived from scenario {}, not {}", d.scenario_id, s.id)));
    }
    if d.turns.len() != s.utterances.len() {
        return Err(fail(format!(
            "{} turns for {} utterances",
            d.turns.len(),
            s.utterances.len()
        )));
    }
    let mut part_language: HashMap<PartId, Lang> = HashMap::new();
    let mut turns = Vec::with_capacity(d.turns.len());
    for (turn, u) in d.turns.iter().zip(&s.utterances) {
        if turn.t != u.t {
            return Err(fail(format!("turn {} is aligned with utterance {}", turn.t, u.t)));
        }
        let expected = d.variant.language_of(u.speaker.appearance_index);
        if turn.spoken != expected {
            return Err(fail(format!(
                "turn {}: speaker {} must speak {expected} in variant {}, found {}",
                turn.t, u.speaker.appearance_index, d.variant, turn.spoken
            )));
        }
        if turn.part.speaker != u.speaker.appearance_index || turn.part.language != turn.spoken {
            return Err(fail(format!("turn {}: part {} does not match its speaker", turn.t, turn.part)));
        }
        if let Some(prev) = part_language.insert(turn.part, turn.spoken) {
            if prev != turn.spoken {
                return Err(fail(format!("part {} maps to two languages", turn.part)));
            }
        }
        turns.push(AnnotatedTurn {
            t: u.t,
            speaker: u.speaker.clone(),
            spoken: turn.spoken,
            part: turn.part,
            gold: u.text.clone(),
            audio: u.audio.get(turn.spoken).clone(),
        });
    }
    Ok(AnnotatedDialogue {
        scenario_id: d.scenario_id.clone(),
        variant: d.variant,
        turns,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecomposedPair {
    pub scenario_id: String,
    pub variant: Variant,
    pub t: usize,
    pub hypothesis: String,
    pub reference: String,
}

/// Pairs the in-direction predictions of one dialogue with the target-side
/// gold text, in utterance order. Predictions for other turns are ignored.
pub fn recompose_monolingual(
    predictions: &BTreeMap<usize, String>,
    d: &CrossLanguageDialogue,
    s: &Scenario,
    direction: Direction,
) -> Result<Vec<RecomposedPair>, CorpusError> {
    let mut missing = Vec::new();
    let mut pairs = Vec::new();
    for turn in d.turns_in(direction) {
        let Some(u) = s.utterance(turn.t) else {
            return Err(CorpusError::InconsistentDialogue {
                dialogue: d.id(),
                message: format!("turn {} has no utterance", turn.t),
            });
        };
        match predictions.get(&turn.t) {
            Some(hyp) => pairs.push(RecomposedPair {
                scenario_id: s.id.clone(),
                variant: d.variant,
                t: turn.t,
                hypothesis: hyp.clone(),
                reference: u.gold(direction.tgt()).to_string(),
            }),
            None => missing.push(turn.t),
        }
    }
    if !missing.is_empty() {
        return Err(CorpusError::MissingPredictions {
            dialogue: d.id(),
            direction: direction.to_string(),
            missing,
        });
    }
    Ok(pairs)
}

/// Recomposes several dialogues of one scenario (normally variants A and B)
/// into a single sequence ordered by utterance index.
pub fn recompose_scenario(
    s: &Scenario,
    dialogues: &[(&CrossLanguageDialogue, &BTreeMap<usize, String>)],
    direction: Direction,
) -> Result<Vec<RecomposedPair>, CorpusError> {
    let mut merged = Vec::new();
    for (d, predictions) in dialogues {
        merged.extend(recompose_monolingual(predictions, d, s, direction)?);
    }
    merged.sort_by_key(|p| (p.t, p.variant));
    Ok(merged)
}
