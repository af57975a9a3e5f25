use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{AudioRef, Corpus, CorpusError, Gender, Scenario, SpeakerId, Split, Utterance};
use crate::lang::{Lang, PerLang};

// File schema. Everything is optional at the serde level so that validation
// can name the offending scenario and field instead of a byte offset.

#[derive(Debug, Default, Serialize, Deserialize)]
pub(crate) struct RawScenario {
    pub id: Option<String>,
    pub tag: Option<String>,
    pub title: Option<String>,
    pub original_language: Option<String>,
    pub conversation: Option<Vec<RawUtterance>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub(crate) struct RawUtterance {
    pub no: Option<u64>,
    pub speaker: Option<String>,
    pub en_sentence: Option<String>,
    pub ja_sentence: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub en_audio: Option<RawAudio>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ja_audio: Option<RawAudio>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
pub(crate) struct RawAudio {
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    pub gender: Option<String>,
    pub homeplace: Option<String>,
}

/// Loads one split. `path` is either the split file itself or a directory
/// holding `<split>.json`.
pub fn load_corpus(path: &Path, split: Split) -> Result<Corpus, CorpusError> {
    let file = if path.is_dir() {
        path.join(format!("{}.json", split.name()))
    } else {
        path.to_path_buf()
    };
    let text = std::fs::read_to_string(&file).map_err(|source| CorpusError::Io {
        path: file.clone(),
        source,
    })?;
    let scenarios = parse_corpus(&text, &file)?;
    let audio_root = file
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(Corpus {
        split,
        audio_root,
        scenarios,
    })
}

/// Parses and validates a corpus document. `origin` is used in error messages.
pub fn parse_corpus(text: &str, origin: &Path) -> Result<Vec<Scenario>, CorpusError> {
    let raw: Vec<RawScenario> = serde_json::from_str(text).map_err(|source| CorpusError::Parse {
        path: origin.to_path_buf(),
        source,
    })?;
    let mut seen = HashSet::new();
    let mut scenarios = Vec::with_capacity(raw.len());
    for (index, r) in raw.into_iter().enumerate() {
        let scenario = validate_scenario(index, r)?;
        if !seen.insert(scenario.id.clone()) {
            return Err(CorpusError::DuplicateScenario(scenario.id));
        }
        scenarios.push(scenario);
    }
    Ok(scenarios)
}

pub(crate) fn to_raw(scenarios: &[Scenario]) -> Vec<RawScenario> {
    let audio = |a: &Option<AudioRef>| {
        a.as_ref().map(|a| RawAudio {
            path: Some(a.path.clone()),
            duration_s: a.duration_s,
            gender: Some(format!("{:?}", a.gender)),
            homeplace: Some(a.homeplace.clone()),
        })
    };
    scenarios
        .iter()
        .map(|s| RawScenario {
            id: Some(s.id.clone()),
            tag: Some(s.tag.clone()),
            title: Some(s.title.clone()),
            original_language: Some(s.original_language.code().to_string()),
            conversation: Some(
                s.utterances
                    .iter()
                    .map(|u| RawUtterance {
                        no: Some(u.t as u64),
                        speaker: Some(u.speaker.label.clone()),
                        en_sentence: Some(u.text.en.clone()),
                        ja_sentence: Some(u.text.ja.clone()),
                        en_audio: audio(&u.audio.en),
                        ja_audio: audio(&u.audio.ja),
                    })
                    .collect(),
            ),
        })
        .collect()
}

/// Serializes scenarios back to the corpus file schema.
pub fn corpus_to_json(scenarios: &[Scenario]) -> String {
    serde_json::to_string_pretty(&to_raw(scenarios)).expect("corpus schema is always serializable")
}

/// Rejects any gold text containing the context separator; such text would
/// make extraction of the current utterance ambiguous.
pub fn validate_separator(scenarios: &[Scenario], sep: &str) -> Result<(), CorpusError> {
    for s in scenarios {
        for u in &s.utterances {
            for lang in Lang::ALL {
                if u.gold(lang).contains(sep) {
                    return Err(CorpusError::Schema {
                        scenario: s.id.clone(),
                        field: format!("conversation[no={}].{}_sentence", u.t, lang),
                        message: format!("text contains the context separator `{sep}`"),
                    });
                }
            }
        }
    }
    Ok(())
}

fn validate_scenario(index: usize, raw: RawScenario) -> Result<Scenario, CorpusError> {
    let label = raw
        .id
        .clone()
        .filter(|id| !id.trim().is_empty())
        .unwrap_or_else(|| format!("#{index}"));
    let schema = |field: &str, message: &str| CorpusError::Schema {
        scenario: label.clone(),
        field: field.to_string(),
        message: message.to_string(),
    };

    let id = raw
        .id
        .filter(|id| !id.trim().is_empty())
        .ok_or_else(|| schema("id", "missing or empty"))?;
    let original_language = match raw.original_language.as_deref() {
        Some(code) => Lang::from_code(code)
            .ok_or_else(|| schema("original_language", &format!("unknown language `{code}`")))?,
        None => return Err(schema("original_language", "missing")),
    };
    let conversation = raw.conversation.ok_or_else(|| schema("conversation", "missing"))?;
    if conversation.is_empty() {
        return Err(schema("conversation", "a scenario needs at least one utterance"));
    }

    let mut speakers: HashMap<String, usize> = HashMap::new();
    // (speaker, language) -> (gender, homeplace) of the first recording seen
    let mut voices: HashMap<(String, Lang), (Gender, String)> = HashMap::new();
    let mut utterances = Vec::with_capacity(conversation.len());

    for (i, ru) in conversation.into_iter().enumerate() {
        let expected = i + 1;
        let at = |field: &str| match ru.no {
            Some(no) => format!("conversation[no={no}].{field}"),
            None => format!("conversation[{i}].{field}"),
        };
        match ru.no {
            Some(no) if no as usize == expected => {}
            Some(_) => {
                return Err(schema(
                    &at("no"),
                    &format!("expected {expected}; utterance numbers must be contiguous from 1"),
                ))
            }
            None => return Err(schema(&at("no"), "missing")),
        }
        let speaker_label = ru
            .speaker
            .filter(|s| !s.trim().is_empty())
            .ok_or_else(|| schema(&at("speaker"), "missing or empty"))?;
        let gold = |text: Option<String>, lang: Lang| {
            text.filter(|t| !t.trim().is_empty())
                .ok_or_else(|| schema(&at(&format!("{lang}_sentence")), "missing gold text"))
        };
        let ja = gold(ru.ja_sentence, Lang::Ja)?;
        let en = gold(ru.en_sentence, Lang::En)?;

        let next = speakers.len() + 1;
        let appearance_index = *speakers.entry(speaker_label.clone()).or_insert(next);

        let mut audio = PerLang::<Option<AudioRef>>::default();
        for (lang, raw_audio) in [(Lang::Ja, ru.ja_audio), (Lang::En, ru.en_audio)] {
            let Some(ra) = raw_audio else { continue };
            let field = |f: &str| at(&format!("{lang}_audio.{f}"));
            let path = ra
                .path
                .filter(|p| !p.trim().is_empty())
                .ok_or_else(|| schema(&field("path"), "missing or empty"))?;
            if let Some(d) = ra.duration_s {
                if !(d.is_finite() && d > 0.0) {
                    return Err(schema(&field("duration_s"), "must be a positive number of seconds"));
                }
            }
            let gender: Gender = ra
                .gender
                .as_deref()
                .ok_or_else(|| schema(&field("gender"), "missing"))?
                .parse()
                .map_err(|e: String| schema(&field("gender"), &e))?;
            let homeplace = ra.homeplace.unwrap_or_default();
            match voices.get(&(speaker_label.clone(), lang)) {
                Some((g, h)) if *g != gender || *h != homeplace => {
                    return Err(schema(
                        &field("gender"),
                        &format!("speaker `{speaker_label}` has inconsistent {lang} speaker attributes"),
                    ))
                }
                Some(_) => {}
                None => {
                    voices.insert((speaker_label.clone(), lang), (gender, homeplace.clone()));
                }
            }
            *audio.get_mut(lang) = Some(AudioRef {
                path,
                duration_s: ra.duration_s,
                gender,
                homeplace,
            });
        }

        utterances.push(Utterance {
            t: expected,
            speaker: SpeakerId {
                label: speaker_label,
                appearance_index,
            },
            text: PerLang::new(ja, en),
            audio,
        });
    }

    Ok(Scenario {
        id,
        tag: raw.tag.unwrap_or_default(),
        title: raw.title.unwrap_or_default(),
        original_language,
        utterances,
    })
}
