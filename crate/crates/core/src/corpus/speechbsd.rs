//! Import shim for the public SpeechBSD release.
//!
//! The release stores one JSON array per split in the BSD layout, with the
//! recordings described by flat per-utterance keys (`ja_wav`, `en_wav`,
//! `ja_spk_gender`, `en_spk_state`, ...). This maps that layout onto the
//! corpus schema; the English speaker name is used as the speaker label and
//! durations are left to the WAV header fallback.

use std::path::Path;

use serde_json::{json, Map, Value};

use super::{parse_corpus, CorpusError, Scenario};

fn gender(v: Option<&Value>) -> Option<&'static str> {
    match v?.as_str()?.trim().to_ascii_lowercase().as_str() {
        "m" | "male" => Some("M"),
        "f" | "female" => Some("F"),
        _ => None,
    }
}

fn audio(u: &Map<String, Value>, lang: &str, wav_prefix: &str) -> Option<Value> {
    let wav = u.get(&format!("{lang}_wav"))?.as_str()?;
    let homeplace_key = if lang == "ja" { "ja_spk_prefecture" } else { "en_spk_state" };
    let mut entry = json!({
        "path": format!("{wav_prefix}{wav}"),
        "gender": gender(u.get(&format!("{lang}_spk_gender")))?,
        "homeplace": u.get(homeplace_key).and_then(Value::as_str).unwrap_or(""),
    });
    if let Some(d) = u.get(&format!("{lang}_duration")).and_then(Value::as_f64) {
        entry["duration_s"] = json!(d);
    }
    Some(entry)
}

/// Converts a SpeechBSD split document into validated scenarios. `wav_prefix`
/// is prepended to every recording path (for example `"wav/test/"`).
pub fn import_speechbsd(text: &str, wav_prefix: &str, origin: &Path) -> Result<Vec<Scenario>, CorpusError> {
    let parse_err = |source| CorpusError::Parse {
        path: origin.to_path_buf(),
        source,
    };
    let raw: Vec<Map<String, Value>> = serde_json::from_str(text).map_err(parse_err)?;
    let mut converted = Vec::with_capacity(raw.len());
    for s in raw {
        let conversation: Vec<Value> = s
            .get("conversation")
            .and_then(Value::as_array)
            .map(|c| {
                c.iter()
                    .filter_map(Value::as_object)
                    .map(|u| {
                        let speaker = u
                            .get("speaker")
                            .or_else(|| u.get("en_speaker"))
                            .cloned()
                            .unwrap_or(Value::Null);
                        let mut out = json!({
                            "no": u.get("no").cloned().unwrap_or(Value::Null),
                            "speaker": speaker,
                            "en_sentence": u.get("en_sentence").cloned().unwrap_or(Value::Null),
                            "ja_sentence": u.get("ja_sentence").cloned().unwrap_or(Value::Null),
                        });
                        for lang in ["ja", "en"] {
                            if let Some(a) = audio(u, lang, wav_prefix) {
                                out[format!("{lang}_audio")] = a;
                            }
                        }
                        out
                    })
                    .collect()
            })
            .unwrap_or_default();
        converted.push(json!({
            "id": s.get("id").cloned().unwrap_or(Value::Null),
            "tag": s.get("tag").cloned().unwrap_or(json!("")),
            "title": s.get("title").cloned().unwrap_or(json!("")),
            "original_language": s.get("original_language").cloned().unwrap_or(Value::Null),
            "conversation": conversation,
        }));
    }
    let doc = serde_json::to_string(&converted).map_err(parse_err)?;
    parse_corpus(&doc, origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Gender;

    #[test]
    fn maps_release_fields() {
        let text = r#"[{"id":"190315_E001_17","tag":"training","title":"t","original_language":"en",
          "conversation":[{"no":1,"en_speaker":"Mr. Ben Sherman","ja_speaker":"ベン シャーマンさん",
            "en_sentence":"Hi.","ja_sentence":"はい。",
            "ja_wav":"a_ja.wav","en_wav":"a_en.wav",
            "ja_spk_gender":"M","en_spk_gender":"F",
            "ja_spk_prefecture":"大阪","en_spk_state":"CA"}]}]"#;
        let s = import_speechbsd(text, "wav/test/", Path::new("test.json")).unwrap();
        let u = &s[0].utterances[0];
        assert_eq!(u.speaker.label, "Mr. Ben Sherman");
        let ja = u.audio.ja.as_ref().unwrap();
        assert_eq!(ja.path, "wav/test/a_ja.wav");
        assert_eq!(ja.homeplace, "大阪");
        assert_eq!(u.audio.en.as_ref().unwrap().gender, Gender::F);
        assert_eq!(ja.duration_s, None);
    }
}
