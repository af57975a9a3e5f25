use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, Gender, Scenario, Split};
use crate::lang::{Lang, PerLang};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenderSplit {
    pub male_pct: f64,
    pub female_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub split: Split,
    pub n_scenarios: usize,
    pub n_sentences: usize,
    /// Hours of recorded speech per language.
    pub speech_hours: PerLang<f64>,
    /// Share of recorded utterances by speaker gender; `None` when a language
    /// has no recordings.
    pub gender_split: PerLang<Option<GenderSplit>>,
}

/// Reads the duration of a WAV file from its header.
pub fn wav_duration(path: &Path) -> Result<f64, hound::Error> {
    let reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    Ok(reader.duration() as f64 / spec.sample_rate as f64)
}

/// Hours are summed from utterance durations; gender shares count utterances.
/// Recordings without a `duration_s` are measured from their WAV header,
/// resolving relative paths against `audio_root`.
pub fn corpus_stats(
    scenarios: &[Scenario],
    split: Split,
    audio_root: &Path,
) -> Result<CorpusStats, CorpusError> {
    let mut seconds = PerLang::new(0.0f64, 0.0f64);
    let mut genders = PerLang::new([0usize; 2], [0usize; 2]);

    for s in scenarios {
        for u in &s.utterances {
            for lang in Lang::ALL {
                let Some(audio) = u.audio.get(lang) else { continue };
                let duration = match audio.duration_s {
                    Some(d) => d,
                    None => wav_duration(&audio_root.join(&audio.path)).map_err(|e| {
                        CorpusError::Audio {
                            scenario: s.id.clone(),
                            t: u.t,
                            lang,
                            path: audio.path.clone(),
                            message: format!("no duration_s and the WAV header is unreadable: {e}"),
                        }
                    })?,
                };
                *seconds.get_mut(lang) += duration;
                let slot = match audio.gender {
                    Gender::M => 0,
                    Gender::F => 1,
                };
                genders.get_mut(lang)[slot] += 1;
            }
        }
    }

    Ok(CorpusStats {
        split,
        n_scenarios: scenarios.len(),
        n_sentences: scenarios.iter().map(Scenario::len).sum(),
        speech_hours: seconds.map(|_, s| s / 3600.0),
        gender_split: genders.map(|_, &[m, f]| {
            let total = m + f;
            (total > 0).then(|| GenderSplit {
                male_pct: 100.0 * m as f64 / total as f64,
                female_pct: 100.0 * f as f64 / total as f64,
            })
        }),
    })
}
