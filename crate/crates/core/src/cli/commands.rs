use std::collections::HashMap;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::{backend_config, CorpusArgs, CorpusFormat, Failure, Metric, RunArgs, EXIT_BACKEND};
use crate::cascade::{run_experiment, sweep_dir_name, ExperimentResult, RunConfig};
use crate::context::{build_training_pairs, write_training_pairs, ContextMode};
use crate::corpus::{
    assign_languages, import_speechbsd, load_corpus, split_scenario, validate_separator, Corpus, CorpusError,
};
use crate::lang::{Direction, Lang};
use crate::metrics::{
    bleu_corpus, bleu_from_stats, build_sheet, edit_stats, ingest_annotations, normalize_words,
    paired_approx_randomization, read_sheet, render_examples, sample_manual_eval, sentence_stats, write_sheet,
    zero_pronoun_candidates, EditStats, SentenceStats, Tokenizer, DEFAULT_ALPHA,
};

fn load(args: &CorpusArgs) -> Result<Corpus, Failure> {
    match args.format {
        CorpusFormat::Schema => Ok(load_corpus(&args.corpus, args.split)?),
        CorpusFormat::Speechbsd => {
            let file = if args.corpus.is_dir() {
                args.corpus.join(format!("{}.json", args.split.name()))
            } else {
                args.corpus.clone()
            };
            let text = fs::read_to_string(&file).map_err(|source| CorpusError::Io {
                path: file.clone(),
                source,
            })?;
            Ok(Corpus {
                split: args.split,
                audio_root: file.parent().map(Path::to_path_buf).unwrap_or_default(),
                scenarios: import_speechbsd(&text, &args.wav_prefix, &file)?,
            })
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::data(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_failure(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn read_lines(path: &Path) -> Result<Vec<String>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(text.lines().map(str::to_string).collect())
}

/// Records the command, its parameters and the tool version next to
/// outputs that are not full runs.
fn write_command_manifest(dir: &Path, command: &str, params: serde_json::Value) -> Result<(), Failure> {
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "params": params,
    });
    write_file(
        &dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("json value") + "\n",
    )
}

pub(super) fn validate(args: &CorpusArgs, sep: &str) -> Result<(), Failure> {
    let corpus = load(args)?;
    validate_separator(&corpus.scenarios, sep)?;
    println!(
        "ok: {} scenarios, {} sentences ({} split)",
        corpus.scenarios.len(),
        corpus.sentence_count(),
        corpus.split
    );
    Ok(())
}

pub(super) fn stats(args: &CorpusArgs, as_json: bool) -> Result<(), Failure> {
    let corpus = load(args)?;
    let stats = corpus.stats()?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialize"));
        return Ok(());
    }
    println!("split       {}", stats.split);
    println!("scenarios   {}", stats.n_scenarios);
    println!("sentences   {}", stats.n_sentences);
    for lang in Lang::ALL {
        let gender = match stats.gender_split.get(lang) {
            Some(g) => format!("M {:.1}% / F {:.1}%", g.male_pct, g.female_pct),
            None => "no recordings".to_string(),
        };
        println!("{lang} speech   {:.3} h, {gender}", stats.speech_hours.get(lang));
    }
    Ok(())
}

pub(super) fn split(args: &CorpusArgs, out: &Path) -> Result<(), Failure> {
    let corpus = load(args)?;
    let mut dialogues = Vec::new();
    let mut tsv = String::from("scenario_id\tvariant\tt\tspeaker\tpart\tspoken\ttext\n");
    for s in &corpus.scenarios {
        let (a, b) = split_scenario(s);
        for d in [a, b] {
            let annotated = assign_languages(&d, s)?;
            for turn in &annotated.turns {
                tsv.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    s.id,
                    d.variant,
                    turn.t,
                    turn.speaker.label,
                    turn.part,
                    turn.spoken,
                    turn.spoken_gold().replace('\t', " ")
                ));
            }
            dialogues.push(d);
        }
    }
    write_file(
        &out.join("dialogues.json"),
        serde_json::to_string_pretty(&dialogues).expect("dialogues serialize") + "\n",
    )?;
    write_file(&out.join("dialogues.tsv"), tsv)?;
    write_command_manifest(
        out,
        "split",
        json!({"split": corpus.split, "scenarios": corpus.scenarios.len(), "dialogues": dialogues.len()}),
    )?;
    println!("{} dialogues written to {}", dialogues.len(), out.display());
    Ok(())
}

pub(super) fn make_pairs(
    args: &CorpusArgs,
    mode: ContextMode,
    c: usize,
    sep: &str,
    direction: Option<Direction>,
    append_tags: bool,
    out: &Path,
) -> Result<(), Failure> {
    if mode == ContextMode::Bilingual && direction.is_some() {
        return Err(Failure::usage(
            "--direction conflicts with --mode bilingual (one pool covers both directions)",
        ));
    }
    let corpus = load(args)?;
    validate_separator(&corpus.scenarios, sep)?;
    let directions: Vec<Option<Direction>> = match (mode, direction) {
        (ContextMode::Bilingual, _) => vec![None],
        (_, Some(d)) => vec![Some(d)],
        (_, None) => Direction::ALL.into_iter().map(Some).collect(),
    };
    let mut counts = serde_json::Map::new();
    for dir in directions {
        let mut units = Vec::new();
        for s in &corpus.scenarios {
            let (a, b) = split_scenario(s);
            for d in [&a, &b] {
                units.extend(build_training_pairs(s, d, mode, c, dir, sep)?);
            }
        }
        let stem = match dir {
            None => mode.to_string(),
            Some(d) => format!("{mode}.{d}"),
        };
        write_training_pairs(&units, out, &stem, append_tags)?;
        println!("{stem}: {} units", units.len());
        counts.insert(stem, json!(units.len()));
    }
    write_command_manifest(
        out,
        "make-pairs",
        json!({
            "split": corpus.split,
            "mode": mode,
            "c": c,
            "separator": sep,
            "append_tags": append_tags,
            "units": counts,
        }),
    )
}

fn run_config(run: &RunArgs, c: usize) -> Result<RunConfig, Failure> {
    if run.sep.is_empty() {
        return Err(Failure::usage("--sep must not be empty"));
    }
    Ok(RunConfig {
        mode: run.mode,
        c,
        separator: run.sep.clone(),
        asr: backend_config(&run.asr)?,
        mt: backend_config(&run.mt)?,
        seed: run.seed,
        jobs: run.jobs as usize,
    })
}

fn summarize(result: &ExperimentResult) -> Result<(), Failure> {
    for d in &result.report.bleu {
        println!(
            "{}  BLEU {:.2}  ({} sentences, tok {})",
            d.direction, d.bleu.score, d.sentences, d.tokenizer
        );
    }
    for a in &result.report.asr {
        println!("{} ASR  {:?} error rate {:.2}%", a.language, a.unit, a.rate * 100.0);
    }
    if result.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::backend(format!(
            "{} backend failure(s); see {}",
            result.failures.len(),
            result.dir.join("failures.json").display()
        )))
    }
}

pub(super) fn run(run: &RunArgs, c: usize) -> Result<(), Failure> {
    let config = run_config(run, c)?;
    let corpus = load(&run.corpus)?;
    let result = run_experiment(&corpus, &config, &run.out)?;
    println!("run written to {}", run.out.display());
    summarize(&result)
}

pub(super) fn sweep(run: &RunArgs, widths: RangeInclusive<usize>) -> Result<(), Failure> {
    let config = run_config(run, *widths.start())?;
    let corpus = load(&run.corpus)?;
    let mut backend_failures = 0;
    for c in widths {
        let dir = run.out.join(sweep_dir_name(c));
        let result = run_experiment(&corpus, &RunConfig { c, ..config.clone() }, &dir)?;
        println!("c={c}: {}", dir.display());
        if let Err(f) = summarize(&result) {
            debug_assert_eq!(f.code, EXIT_BACKEND);
            eprintln!("warning: {}", f.message);
            backend_failures += result.failures.len();
        }
    }
    if backend_failures > 0 {
        return Err(Failure::backend(format!("{backend_failures} backend failure(s) across the sweep")));
    }
    Ok(())
}

fn check_lengths(hyp: &[String], reference: &[String]) -> Result<(), Failure> {
    if hyp.len() != reference.len() {
        return Err(Failure::data(format!(
            "{} hypothesis lines vs {} reference lines",
            hyp.len(),
            reference.len()
        )));
    }
    Ok(())
}

fn edit_unit_stats(metric: Metric, reference: &str, hyp: &str) -> EditStats {
    match metric {
        Metric::Cer => {
            let r: Vec<char> = reference.chars().collect();
            let h: Vec<char> = hyp.chars().collect();
            edit_stats(&r, &h)
        }
        _ => edit_stats(&normalize_words(reference), &normalize_words(hyp)),
    }
}

pub(super) fn score(hyp: &Path, reference: &Path, metric: Metric, tok: Tokenizer, as_json: bool) -> Result<(), Failure> {
    let hyps = read_lines(hyp)?;
    let refs = read_lines(reference)?;
    check_lengths(&hyps, &refs)?;
    match metric {
        Metric::Bleu => {
            let scored = bleu_corpus(&hyps, &refs, tok)?;
            if as_json {
                println!("{}", serde_json::to_string_pretty(&scored.bleu).expect("score serializes"));
            } else {
                let b = &scored.bleu;
                println!(
                    "BLEU {:.2}  {:.1}/{:.1}/{:.1}/{:.1}  BP {:.3}  hyp_len {} ref_len {}  tok {}",
                    b.score,
                    b.precisions[0],
                    b.precisions[1],
                    b.precisions[2],
                    b.precisions[3],
                    b.brevity_penalty,
                    b.hyp_len,
                    b.ref_len,
                    tok
                );
            }
        }
        Metric::Wer | Metric::Cer => {
            let mut total = EditStats::default();
            for (r, h) in refs.iter().zip(&hyps) {
                let s = edit_unit_stats(metric, r, h);
                total.errors += s.errors;
                total.ref_len += s.ref_len;
            }
            if total.ref_len == 0 {
                return Err(Failure::data("references are empty"));
            }
            if as_json {
                println!(
                    "{}",
                    json!({"metric": format!("{metric:?}").to_lowercase(), "errors": total.errors, "ref_len": total.ref_len, "rate": total.rate()})
                );
            } else {
                println!("{metric:?} {:.2}%  ({} errors / {})", total.rate() * 100.0, total.errors, total.ref_len);
            }
        }
    }
    Ok(())
}

pub(super) fn sigtest(
    reference: &Path,
    hyp_a: &Path,
    hyp_b: &Path,
    metric: Metric,
    tok: Tokenizer,
    trials: usize,
    seed: u64,
) -> Result<(), Failure> {
    let refs = read_lines(reference)?;
    let a = read_lines(hyp_a)?;
    let b = read_lines(hyp_b)?;
    check_lengths(&a, &refs)?;
    check_lengths(&b, &refs)?;
    let result = match metric {
        Metric::Bleu => {
            let stats = |hyps: &[String]| -> Vec<SentenceStats> {
                hyps.iter()
                    .zip(&refs)
                    .map(|(h, r)| sentence_stats(&tok.tokenize(h), &tok.tokenize(r)))
                    .collect()
            };
            paired_approx_randomization(&stats(&a), &stats(&b), |s| bleu_from_stats(s).score, trials, seed)?
        }
        Metric::Wer | Metric::Cer => {
            let stats = |hyps: &[String]| -> Vec<EditStats> {
                hyps.iter().zip(&refs).map(|(h, r)| edit_unit_stats(metric, r, h)).collect()
            };
            paired_approx_randomization(&stats(&a), &stats(&b), |s| s.rate(), trials, seed)?
        }
    };
    println!("{}", serde_json::to_string_pretty(&result).expect("result serializes"));
    println!(
        "{} at alpha {DEFAULT_ALPHA}",
        if result.significant(DEFAULT_ALPHA) { "significant" } else { "not significant" }
    );
    Ok(())
}

struct EvalRow {
    id: String,
    source: String,
    reference: String,
    hypothesis: String,
}

fn read_eval_rows(run: &Path, direction: Direction) -> Result<Vec<EvalRow>, Failure> {
    let path = run.join("eval").join(format!("{direction}.tsv"));
    let lines = read_lines(&path)?;
    lines
        .iter()
        .skip(1)
        .enumerate()
        .map(|(i, line)| {
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() != 5 {
                return Err(Failure::data(format!("{}:{}: expected 5 columns", path.display(), i + 2)));
            }
            Ok(EvalRow {
                id: cells[0].to_string(),
                source: cells[2].to_string(),
                reference: cells[3].to_string(),
                hypothesis: cells[4].to_string(),
            })
        })
        .collect()
}

pub(super) fn zp_sample(
    runs: &[(String, PathBuf)],
    direction: Direction,
    n: usize,
    seed: u64,
    out: &Path,
) -> Result<(), Failure> {
    if direction.tgt() != Lang::En {
        return Err(Failure::usage("zero-pronoun analysis needs English references (--direction ja-en)"));
    }
    let base = read_eval_rows(&runs[0].1, direction)?;
    let refs: Vec<(&str, &str)> = base.iter().map(|r| (r.id.as_str(), r.reference.as_str())).collect();
    let report = zero_pronoun_candidates(&refs);
    println!(
        "{} of {} references contain a pronoun ({:.1}%)",
        report.candidates,
        report.records.len(),
        report.fraction * 100.0
    );
    let sampled = sample_manual_eval(&report.records, n, seed)?;
    let ja_refs: HashMap<String, String> = base.iter().map(|r| (r.id.clone(), r.source.clone())).collect();
    let mut systems = Vec::new();
    for (name, dir) in runs {
        let rows = read_eval_rows(dir, direction)?;
        systems.push((name.clone(), rows.into_iter().map(|r| (r.id, r.hypothesis)).collect()));
    }
    let rows = build_sheet(&sampled, &ja_refs, &systems);
    let mut buf = Vec::new();
    write_sheet(&rows, &mut buf)?;
    write_file(out, buf)?;
    println!("{} rows written to {}", rows.len(), out.display());
    Ok(())
}

pub(super) fn zp_ingest(sheet: &Path, render: bool, as_json: bool) -> Result<(), Failure> {
    let file = fs::File::open(sheet).map_err(|e| io_failure(sheet, e))?;
    let rows = read_sheet(file)?;
    let tallies = ingest_annotations(&rows);
    if as_json {
        let value: Vec<_> = tallies
            .iter()
            .map(|(system, t)| json!({"system": system, "tally": t, "zero_pronoun": t.zero_pronoun()}))
            .collect();
        println!("{}", serde_json::to_string_pretty(&value).expect("json value"));
    } else {
        println!("system\tcorrect\tincorrect\tnot_zero_pronoun\tunjudged");
        for (system, t) in &tallies {
            println!(
                "{system}\t{}\t{}\t{}\t{}",
                t.correct, t.incorrect, t.not_zero_pronoun, t.unjudged
            );
        }
    }
    if render {
        print!("\n{}", render_examples(&rows));
    }
    Ok(())
}
