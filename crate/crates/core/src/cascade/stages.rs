use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::store::{Access, HypothesisStore};
use super::CascadeError;
use crate::backends::{transcribe, translate, AsrBackend, AsrRequest, BackendError, MtBackend, MtRequest};
use crate::context::{
    bilingual_context_source, extract_current, monolingual_context, render_input, ContextMode, HypothesisSource,
    TextPolicy,
};
use crate::corpus::AnnotatedDialogue;

/// Translation settings shared by every dialogue of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationSettings {
    pub mode: ContextMode,
    pub c: usize,
    pub separator: String,
}

fn turn_id(d: &AnnotatedDialogue, t: usize) -> String {
    format!("{}#{t}", d.id())
}

/// Recognizes every turn of `d` in its spoken language. Failed turns get an
/// empty transcript and are reported; the stage itself never aborts on a
/// backend error. Occurrences of `separator` in transcripts are replaced by
/// a space so that they cannot corrupt rendered inputs.
pub fn run_asr_stage(
    d: &AnnotatedDialogue,
    backend: &dyn AsrBackend,
    audio_root: &Path,
    separator: &str,
) -> Result<(HypothesisStore, Vec<BackendError>), CascadeError> {
    let mut store = HypothesisStore::new(d.id());
    let mut failures = Vec::new();
    for turn in &d.turns {
        let req = AsrRequest {
            id: turn_id(d, turn.t),
            audio_path: turn.audio.as_ref().map(|a| audio_root.join(&a.path)),
            audio: turn.audio.clone(),
            language: turn.spoken,
            reference: Some(turn.spoken_gold().to_string()),
        };
        let text = match transcribe(&req, backend) {
            Ok(result) => result.text,
            Err(e) => {
                log::error!("{e}");
                failures.push(e);
                String::new()
            }
        };
        let text = if !separator.is_empty() && text.contains(separator) {
            log::warn!("{}: transcript contains the separator; replaced by a space", req.id);
            text.replace(separator, " ")
        } else {
            text
        };
        store.put_asr(turn.t, text)?;
    }
    Ok((store, failures))
}

/// Output of the translation stage for one dialogue.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TranslationOutput {
    /// Final prediction per turn, in the turn's target language.
    pub predictions: BTreeMap<usize, String>,
    /// Text sent to the translator per turn; absent when the transcript was
    /// empty and nothing was sent.
    pub inputs: BTreeMap<usize, String>,
    pub failures: Vec<BackendError>,
}

/// Translates every turn of `d` in ascending order, composing context from
/// `store` according to `settings.mode`:
///
/// * `none`: the transcript alone.
/// * `mono`: context in the source language; turns spoken in the other
///   language contribute their earlier translations.
/// * `bilingual`: context from transcripts in their spoken languages.
///
/// Context-bearing outputs go through [`extract_current`]. Each prediction is
/// written back to the store before the next turn starts. An empty
/// transcript yields an empty prediction without calling the translator.
pub fn run_translation_stage(
    d: &AnnotatedDialogue,
    store: &mut HypothesisStore,
    backend: &dyn MtBackend,
    settings: &TranslationSettings,
) -> Result<TranslationOutput, CascadeError> {
    let mut out = TranslationOutput::default();
    let sep = settings.separator.as_str();
    for turn in &d.turns {
        let t = turn.t;
        let (src, tgt) = (turn.spoken, turn.spoken.other());
        let input = {
            let reader = store.reader(t);
            let current = reader.asr(t).ok_or_else(|| CascadeError::MissingStoreEntry {
                dialogue: d.id(),
                t,
                kind: "asr",
            })?;
            if current.trim().is_empty() {
                None
            } else {
                let current = current.trim();
                Some(match settings.mode {
                    ContextMode::None => current.to_string(),
                    ContextMode::Mono => {
                        let window = monolingual_context(d, t, settings.c, src, TextPolicy::Hypothesis, &reader)?;
                        render_input(&window, current, sep)?
                    }
                    ContextMode::Bilingual => {
                        let window = bilingual_context_source(d, t, settings.c, TextPolicy::Hypothesis, &reader)?;
                        render_input(&window, current, sep)?
                    }
                })
            }
        };
        let prediction = match &input {
            None => String::new(),
            Some(text) => {
                let req = MtRequest {
                    id: turn_id(d, t),
                    text: text.clone(),
                    src_tag: src.mt_tag().to_string(),
                    tgt_tag: tgt.mt_tag().to_string(),
                };
                match translate(&req, backend) {
                    Ok(result) => match settings.mode {
                        ContextMode::None => result.text.trim().to_string(),
                        _ => extract_current(&result.text, sep).unwrap_or_else(|| {
                            log::warn!("{}: no current segment in translator output", req.id);
                            String::new()
                        }),
                    },
                    Err(e) => {
                        log::error!("{e}");
                        out.failures.push(e);
                        String::new()
                    }
                }
            }
        };
        let prediction = prediction.replace(['\n', '\r'], " ");
        store.put_mt(t, tgt, prediction.clone())?;
        if let Some(text) = input {
            out.inputs.insert(t, text);
        }
        out.predictions.insert(t, prediction);
    }
    Ok(out)
}

/// Everything one dialogue produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueOutcome {
    pub dialogue: AnnotatedDialogue,
    pub transcripts: BTreeMap<usize, String>,
    pub translation: TranslationOutput,
    pub asr_failures: Vec<BackendError>,
    pub access_log: Vec<Access>,
}

impl DialogueOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &BackendError> {
        self.asr_failures.iter().chain(&self.translation.failures)
    }
}

/// Recognition followed by translation for one dialogue.
pub fn run_dialogue(
    d: &AnnotatedDialogue,
    asr: &dyn AsrBackend,
    mt: &dyn MtBackend,
    settings: &TranslationSettings,
    audio_root: &Path,
) -> Result<DialogueOutcome, CascadeError> {
    let (mut store, asr_failures) = run_asr_stage(d, asr, audio_root, &settings.separator)?;
    let translation = run_translation_stage(d, &mut store, mt, settings)?;
    Ok(DialogueOutcome {
        dialogue: d.clone(),
        transcripts: store.transcripts().clone(),
        translation,
        asr_failures,
        access_log: store.access_log(),
    })
}
