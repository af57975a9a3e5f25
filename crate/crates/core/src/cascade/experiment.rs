use std::collections::BTreeMap;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::stages::{run_dialogue, DialogueOutcome, TranslationSettings};
use super::CascadeError;
use crate::backends::{build_asr, build_mt, BackendConfig, BackendError, MockSpec};
use crate::context::{ContextMode, DEFAULT_CONTEXT_WIDTH, DEFAULT_SEPARATOR};
use crate::corpus::{assign_languages, corpus_to_json, recompose_scenario, split_scenario, Corpus, RecomposedPair};
use crate::lang::{Direction, Lang};
use crate::metrics::{asr_error_rate, bleu_corpus, AsrScore, DirectionScore, EvalReport, Tokenizer};

/// Everything that determines the outputs of a run. `jobs` only affects
/// speed and is left out of manifests and hashes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: ContextMode,
    pub c: usize,
    pub separator: String,
    pub asr: BackendConfig,
    pub mt: BackendConfig,
    pub seed: u64,
    #[serde(skip, default = "default_jobs")]
    pub jobs: usize,
}

fn default_jobs() -> usize {
    1
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: ContextMode::Bilingual,
            c: DEFAULT_CONTEXT_WIDTH,
            separator: DEFAULT_SEPARATOR.to_string(),
            asr: BackendConfig::mock(MockSpec::GoldEcho),
            mt: BackendConfig::mock(MockSpec::Identity),
            seed: 0,
            jobs: 1,
        }
    }
}

impl RunConfig {
    pub fn settings(&self) -> TranslationSettings {
        TranslationSettings {
            mode: self.mode,
            c: self.c,
            separator: self.separator.clone(),
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("config serializes").as_bytes())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusInfo {
    pub split: String,
    pub scenarios: usize,
    pub sentences: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendIdentities {
    pub asr: String,
    pub mt: String,
}

/// Written as `manifest.json` at the top of every run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub corpus: CorpusInfo,
    pub config: RunConfig,
    pub config_hash: String,
    pub seed: u64,
    pub backends: BackendIdentities,
    pub dialogues: usize,
    pub failures: usize,
}

#[derive(Debug)]
pub struct ExperimentResult {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub report: EvalReport,
    pub outcomes: Vec<DialogueOutcome>,
    pub failures: Vec<BackendError>,
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CascadeError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| CascadeError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CascadeError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn lines<'a>(items: impl IntoIterator<Item = &'a str>) -> String {
    items.into_iter().map(|l| format!("{l}\n")).collect()
}

/// Runs the cascade over every scenario of `corpus` (both cross-language
/// variants) and writes the run directory:
///
/// ```text
/// manifest.json
/// failures.json
/// asr/<variant>/<lang>.txt, .ids
/// pred/<variant>/<direction>.txt, .ids, .src
/// eval/<direction>.hyp, .ref, .tsv
/// eval/report.json
/// ```
///
/// Text files hold one utterance per line in corpus order. Dialogues run on
/// `config.jobs` threads; turns of a dialogue run in order.
pub fn run_experiment(corpus: &Corpus, config: &RunConfig, out: &Path) -> Result<ExperimentResult, CascadeError> {
    if config.separator.is_empty() {
        return Err(CascadeError::Config("separator must not be empty".into()));
    }
    if config.jobs == 0 {
        return Err(CascadeError::Config("jobs must be at least 1".into()));
    }
    crate::corpus::validate_separator(&corpus.scenarios, &config.separator)?;
    let asr = build_asr(&config.asr, config.seed)?;
    let mt = build_mt(&config.mt, &config.separator)?;
    let settings = config.settings();

    let mut dialogues = Vec::new();
    let mut splits = Vec::new();
    for s in &corpus.scenarios {
        let (a, b) = split_scenario(s);
        dialogues.push(assign_languages(&a, s)?);
        dialogues.push(assign_languages(&b, s)?);
        splits.push((a, b));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CascadeError::Config(e.to_string()))?;
    let outcomes: Vec<DialogueOutcome> = pool.install(|| {
        dialogues
            .par_iter()
            .map(|d| run_dialogue(d, asr.as_ref(), mt.as_ref(), &settings, &corpus.audio_root))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let failures: Vec<BackendError> = outcomes.iter().flat_map(|o| o.failures().cloned()).collect();

    // recognizer and translator outputs per variant
    let mut asr_files: BTreeMap<(String, Lang), (Vec<String>, Vec<String>)> = BTreeMap::new();
    // ids, predictions, rendered inputs
    type PredColumns = (Vec<String>, Vec<String>, Vec<String>);
    let mut pred_files: BTreeMap<(String, Direction), PredColumns> = BTreeMap::new();
    for o in &outcomes {
        let d = &o.dialogue;
        let variant = d.variant.to_string();
        for turn in &d.turns {
            let id = format!("{}#{}", d.id(), turn.t);
            let (ids, texts) = asr_files.entry((variant.clone(), turn.spoken)).or_default();
            ids.push(id.clone());
            texts.push(o.transcripts[&turn.t].clone());
            let (ids, texts, inputs) = pred_files.entry((variant.clone(), turn.direction())).or_default();
            ids.push(id);
            texts.push(o.translation.predictions[&turn.t].clone());
            inputs.push(o.translation.inputs.get(&turn.t).cloned().unwrap_or_default());
        }
    }
    for ((variant, lang), (ids, texts)) in &asr_files {
        let base = out.join("asr").join(variant);
        write(&base.join(format!("{lang}.txt")), lines(texts.iter().map(String::as_str)))?;
        write(&base.join(format!("{lang}.ids")), lines(ids.iter().map(String::as_str)))?;
    }
    for ((variant, direction), (ids, texts, inputs)) in &pred_files {
        let base = out.join("pred").join(variant);
        write(&base.join(format!("{direction}.txt")), lines(texts.iter().map(String::as_str)))?;
        write(&base.join(format!("{direction}.ids")), lines(ids.iter().map(String::as_str)))?;
        write(&base.join(format!("{direction}.src")), lines(inputs.iter().map(String::as_str)))?;
    }

    // recomposition and scoring
    let mut report = EvalReport::default();
    for direction in Direction::ALL {
        let mut pairs: Vec<RecomposedPair> = Vec::new();
        for (i, s) in corpus.scenarios.iter().enumerate() {
            let (a, b) = &splits[i];
            let (pa, pb) = (&outcomes[2 * i].translation.predictions, &outcomes[2 * i + 1].translation.predictions);
            pairs.extend(recompose_scenario(s, &[(a, pa), (b, pb)], direction)?);
        }
        let base = out.join("eval");
        write(
            &base.join(format!("{direction}.hyp")),
            lines(pairs.iter().map(|p| p.hypothesis.as_str())),
        )?;
        write(
            &base.join(format!("{direction}.ref")),
            lines(pairs.iter().map(|p| p.reference.as_str())),
        )?;
        let mut tsv = String::from("id\tvariant\tsource\treference\thypothesis\n");
        for p in &pairs {
            let source = corpus
                .scenarios
                .iter()
                .find(|s| s.id == p.scenario_id)
                .and_then(|s| s.utterance(p.t))
                .map(|u| u.gold(direction.src()))
                .unwrap_or_default();
            let cells = [source, p.reference.as_str(), p.hypothesis.as_str()].map(|c| c.replace('\t', " "));
            tsv.push_str(&format!(
                "{}#{}\t{}\t{}\t{}\t{}\n",
                p.scenario_id, p.t, p.variant, cells[0], cells[1], cells[2]
            ));
        }
        write(&base.join(format!("{direction}.tsv")), tsv)?;
        if !pairs.is_empty() {
            let hyps: Vec<&str> = pairs.iter().map(|p| p.hypothesis.as_str()).collect();
            let refs: Vec<&str> = pairs.iter().map(|p| p.reference.as_str()).collect();
            let tokenizer = Tokenizer::for_target(direction.tgt());
            let scored = bleu_corpus(&hyps, &refs, tokenizer)?;
            report.bleu.push(DirectionScore {
                direction,
                sentences: pairs.len(),
                tokenizer,
                bleu: scored.bleu,
            });
        }
    }
    for lang in Lang::ALL {
        let mut refs = Vec::new();
        let mut hyps = Vec::new();
        for o in &outcomes {
            for turn in o.dialogue.turns.iter().filter(|t| t.spoken == lang) {
                refs.push(turn.spoken_gold());
                hyps.push(o.transcripts[&turn.t].as_str());
            }
        }
        if refs.is_empty() {
            continue;
        }
        let (unit, stats) = asr_error_rate(&refs, &hyps, lang)?;
        report.asr.push(AsrScore {
            language: lang,
            unit,
            errors: stats.errors,
            ref_len: stats.ref_len,
            rate: stats.rate(),
        });
    }
    write(&out.join("eval").join("report.json"), report.to_json())?;

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        corpus: CorpusInfo {
            split: corpus.split.name().to_string(),
            scenarios: corpus.scenarios.len(),
            sentences: corpus.sentence_count(),
            sha256: sha256_hex(corpus_to_json(&corpus.scenarios).as_bytes()),
        },
        config: config.clone(),
        config_hash: config.hash(),
        seed: config.seed,
        backends: BackendIdentities {
            asr: asr.identity(),
            mt: mt.identity(),
        },
        dialogues: outcomes.len(),
        failures: failures.len(),
    };
    write(
        &out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n",
    )?;
    let failure_lines: Vec<String> = failures.iter().map(|f| f.to_string()).collect();
    write(
        &out.join("failures.json"),
        serde_json::to_string_pretty(&failure_lines).expect("strings serialize") + "\n",
    )?;

    Ok(ExperimentResult {
        dir: out.to_path_buf(),
        manifest,
        report,
        outcomes,
        failures,
    })
}

/// Directory name of one sweep step: `c01`, `c02`, ...
pub fn sweep_dir_name(c: usize) -> String {
    format!("c{c:02}")
}

/// Runs one experiment per context width, each in `out/cNN`.
pub fn sweep(
    corpus: &Corpus,
    config: &RunConfig,
    widths: RangeInclusive<usize>,
    out: &Path,
) -> Result<Vec<ExperimentResult>, CascadeError> {
    widths
        .map(|c| {
            let cfg = RunConfig { c, ..config.clone() };
            run_experiment(corpus, &cfg, &out.join(sweep_dir_name(c)))
        })
        .collect()
}
