//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Criterion 8 needs the public SpeechBSD release: point `SDTKIT_SPEECHBSD_DIR`
//! at a directory holding `train.json`, `dev.json` and `test.json`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdtkit::backends::mock::{GoldEchoAsr, IdentityMt};
use sdtkit::backends::{build_mt, BackendConfig};
use sdtkit::cascade::{discipline_violations, run_dialogue, run_experiment, AccessKind, RunConfig, TranslationSettings};
use sdtkit::context::{
    bilingual_context_source, bilingual_context_target, constrain, extract_current, monolingual_context,
    render_input, ContextEntry, ContextMode, GoldOnly, Origin, TextPolicy, DEFAULT_SEPARATOR,
};
use sdtkit::corpus::{
    assign_languages, import_speechbsd, load_corpus, recompose_scenario, split_scenario,
    synthetic::synthetic_scenarios, AnnotatedDialogue, Corpus, Split,
};
use sdtkit::lang::{Direction, Lang};
use sdtkit::metrics::{
    bleu_corpus, bleu_from_stats, cer, edit_distance, paired_approx_randomization, sentence_stats, tokenize_13a,
    wer, zero_pronoun_candidates, Additive, SentenceStats, Tokenizer,
};

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

const SKIPPED: &str = "skipped: ";

fn main() {
    let criteria: [(&str, &str, Option<Duration>, Check); 8] = [
        ("AC1", "context windows on the three-turn fixture", Some(Duration::from_secs(1)), ac1),
        ("AC2", "render/extract and split/recompose round trips", None, ac2),
        ("AC3", "store access discipline on fixture dialogues", None, ac3),
        ("AC4", "metric oracles", None, ac4),
        ("AC5", "approximate randomization", Some(Duration::from_secs(10)), ac5),
        ("AC6", "end-to-end determinism on a synthetic corpus", Some(Duration::from_secs(30)), ac6),
        ("AC7", "dictionary disambiguation smoke test", None, ac7),
        ("AC8", "public corpus counts and pronoun fraction", None, ac8),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let message = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(message)
        });
        let elapsed = start.elapsed();
        let outcome = match result {
            Ok(detail) if detail.starts_with(SKIPPED) => Outcome::Skip(detail[SKIPPED.len()..].to_string()),
            Ok(detail) => match budget {
                Some(limit) if elapsed > limit => {
                    Outcome::Fail(format!("{detail}; took {elapsed:.2?}, limit {limit:.0?}"))
                }
                _ => Outcome::Pass(detail),
            },
            Err(e) => Outcome::Fail(e),
        };
        let (label, detail) = match &outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{label} {id} {name} ({:.3}s): {detail}", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn annotated(corpus: &Corpus) -> Vec<AnnotatedDialogue> {
    corpus
        .scenarios
        .iter()
        .flat_map(|s| {
            let (a, b) = split_scenario(s);
            [assign_languages(&a, s).unwrap(), assign_languages(&b, s).unwrap()]
        })
        .collect()
}

fn ac1() -> Result<String, String> {
    let d = &annotated(&common::three_turn())[0];
    let texts = |w: &sdtkit::context::ContextWindow| w.texts().map(str::to_string).collect::<Vec<_>>();
    let mono_ja = monolingual_context(d, 3, 5, Lang::Ja, TextPolicy::Gold, &GoldOnly).map_err(|e| e.to_string())?;
    let mono_en = monolingual_context(d, 3, 5, Lang::En, TextPolicy::Gold, &GoldOnly).map_err(|e| e.to_string())?;
    let bi_src = bilingual_context_source(d, 3, 5, TextPolicy::Gold, &GoldOnly).map_err(|e| e.to_string())?;
    let bi_tgt = bilingual_context_target(d, 3, 5).map_err(|e| e.to_string())?;
    let checks = [
        ("mono ja", texts(&mono_ja).concat(), "彼は良い考えだと言ってました。あなたはどう思いますか?"),
        ("mono en", texts(&mono_en).join(" "), "He said it's a good idea. What do you think about it?"),
        ("bilingual source", texts(&bi_src).concat(), "彼は良い考えだと言ってました。What do you think about it?"),
        ("bilingual target", texts(&bi_tgt).join(" "), "He said it's a good idea. あなたはどう思いますか?"),
    ];
    for (what, got, want) in checks {
        ensure!(got == want, "{what}: {got:?} != {want:?}");
    }
    Ok("4 windows match".into())
}

fn random_segment(rng: &mut ChaCha8Rng) -> String {
    const PIECES: &[&str] = &["a", "b", " ", "<", "/", "s", ">", "</", "s>", "。", "甘い", "\t", "x"];
    let n = rng.gen_range(0..10);
    (0..n).map(|_| PIECES[rng.gen_range(0..PIECES.len())]).collect()
}

fn ac2() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut cases = 0;
    let mut failures = 0;
    while cases < 10_000 {
        let segments: Vec<String> = (0..rng.gen_range(0..6))
            .map(|_| random_segment(&mut rng))
            .filter(|s| !s.contains(DEFAULT_SEPARATOR))
            .collect();
        let current = random_segment(&mut rng).trim().to_string();
        if current.is_empty() || current.contains(DEFAULT_SEPARATOR) {
            continue;
        }
        cases += 1;
        let t = segments.len() + 1;
        let window = constrain(
            segments.iter().enumerate().map(|(i, s)| ContextEntry {
                t: i + 1,
                language: Lang::Ja,
                text: s.clone(),
                origin: Origin::Asr,
            }),
            segments.len(),
            t,
        );
        let ok = render_input(&window, &current, DEFAULT_SEPARATOR)
            .map(|r| extract_current(&r, DEFAULT_SEPARATOR).as_deref() == Some(current.as_str()))
            .unwrap_or(false);
        failures += usize::from(!ok);
    }
    ensure!(failures == 0, "{failures} of {cases} render/extract cases failed");

    let mut scenarios = Vec::new();
    for corpus in [common::three_turn(), common::small()] {
        scenarios.extend(corpus.scenarios);
    }
    let mut reproduced = 0;
    for s in &scenarios {
        let (a, b) = split_scenario(s);
        let gold = |d: &sdtkit::corpus::CrossLanguageDialogue| -> BTreeMap<usize, String> {
            d.turns
                .iter()
                .map(|turn| (turn.t, s.utterance(turn.t).unwrap().gold(turn.spoken.other()).to_string()))
                .collect()
        };
        let (pa, pb) = (gold(&a), gold(&b));
        let all_ok = Direction::ALL.into_iter().all(|direction| {
            recompose_scenario(s, &[(&a, &pa), (&b, &pb)], direction).is_ok_and(|pairs| {
                pairs.len() == s.len()
                    && pairs.iter().enumerate().all(|(i, p)| {
                        let u = s.utterance(i + 1).unwrap();
                        p.t == i + 1
                            && p.reference == u.gold(direction.tgt())
                            && p.hypothesis == p.reference
                    })
            })
        });
        reproduced += usize::from(all_ok);
    }
    ensure!(reproduced == scenarios.len(), "{reproduced}/{} scenarios recomposed", scenarios.len());
    Ok(format!("{cases} render/extract cases, {reproduced}/{} scenarios", scenarios.len()))
}

fn ac3() -> Result<String, String> {
    let mut dialogues = 0;
    let mut mono_mt_reads = 0;
    for corpus in [common::three_turn(), common::small()] {
        for d in annotated(&corpus) {
            dialogues += 1;
            for mode in [ContextMode::Mono, ContextMode::Bilingual] {
                let settings = TranslationSettings {
                    mode,
                    c: 5,
                    separator: DEFAULT_SEPARATOR.into(),
                };
                let out = run_dialogue(&d, &GoldEchoAsr, &IdentityMt, &settings, Path::new("."))
                    .map_err(|e| e.to_string())?;
                let violations = discipline_violations(mode, &out.access_log);
                ensure!(violations.is_empty(), "{} {mode}: {violations:?}", d.id());
                let mt_reads: Vec<_> = out.access_log.iter().filter(|a| matches!(a.kind, AccessKind::Mt(_))).collect();
                match mode {
                    ContextMode::Mono => {
                        let cross = d.turns.windows(2).any(|w| w[0].spoken != w[1].spoken);
                        ensure!(!cross || !mt_reads.is_empty(), "{}: mono never read a translation", d.id());
                        ensure!(mt_reads.iter().all(|a| a.t < a.reader_t && a.found), "{}: bad read", d.id());
                        mono_mt_reads += mt_reads.len();
                    }
                    _ => ensure!(mt_reads.is_empty(), "{}: bilingual read a translation", d.id()),
                }
            }
        }
    }
    Ok(format!("{dialogues} dialogues, 0 violations, {mono_mt_reads} earlier-translation reads in mono"))
}

fn levenshtein_oracle(a: &[u8], b: &[u8]) -> usize {
    fn go(a: &[u8], b: &[u8], i: usize, j: usize, memo: &mut [Option<usize>], w: usize) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(v) = memo[i * w + j] {
            return v;
        }
        let v = (go(a, b, i + 1, j + 1, memo, w) + usize::from(a[i] != b[j]))
            .min(go(a, b, i + 1, j, memo, w) + 1)
            .min(go(a, b, i, j + 1, memo, w) + 1);
        memo[i * w + j] = Some(v);
        v
    }
    let w = b.len() + 1;
    go(a, b, 0, 0, &mut vec![None; (a.len() + 1) * w], w)
}

fn sequences(alphabet: &[u8], max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut start = 0;
    for _ in 0..max_len {
        let end = out.len();
        for i in start..end {
            for &c in alphabet {
                let mut s = out[i].clone();
                s.push(c);
                out.push(s);
            }
        }
        start = end;
    }
    out
}

fn ac4() -> Result<String, String> {
    let mut pairs = 0usize;
    for (alphabet, max_len) in [(&b"ab"[..], 6), (&b"abc"[..], 5)] {
        let seqs = sequences(alphabet, max_len);
        for r in &seqs {
            let words: Vec<String> = r.iter().map(|&c| (c as char).to_string()).collect();
            let chars = String::from_utf8(r.clone()).unwrap();
            for h in &seqs {
                let expected = levenshtein_oracle(r, h);
                ensure!(edit_distance(r, h) == expected, "distance {r:?} {h:?}");
                if !r.is_empty() {
                    let rate = expected as f64 / r.len() as f64;
                    let hw: Vec<String> = h.iter().map(|&c| (c as char).to_string()).collect();
                    let w = wer(&words, &hw).map_err(|e| e.to_string())?;
                    let c = cer(&chars, &String::from_utf8(h.clone()).unwrap()).map_err(|e| e.to_string())?;
                    ensure!(w == rate && c == rate, "rates {r:?} {h:?}");
                }
                pairs += 1;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let vocab = ["a", "b", "c", "d", "e", "f"];
    let sentence = |rng: &mut ChaCha8Rng, min: usize| -> Vec<String> {
        (0..rng.gen_range(min..14)).map(|_| vocab[rng.gen_range(0..vocab.len())].to_string()).collect()
    };
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let n = rng.gen_range(1..12);
        let corpus: Vec<(Vec<String>, Vec<String>)> =
            (0..n).map(|_| (sentence(&mut rng, 0), sentence(&mut rng, 1))).collect();
        let mut summed = SentenceStats::default();
        for (h, r) in &corpus {
            summed.add_assign(&sentence_stats(h, r));
        }
        let via_stats = bleu_from_stats(&summed).score;
        let direct = direct_bleu(&corpus);
        let rel = if direct == 0.0 { via_stats.abs() } else { ((via_stats - direct) / direct).abs() };
        worst = worst.max(rel);
        ensure!(rel <= 1e-9, "summed {via_stats} vs direct {direct}");

        let refs: Vec<String> = corpus.iter().map(|(_, r)| r.join(" ")).collect();
        let self_bleu = bleu_corpus(&refs, &refs, Tokenizer::Thirteen).map_err(|e| e.to_string())?.bleu.score;
        let long_enough = corpus.iter().any(|(_, r)| r.len() >= 4);
        ensure!(!long_enough || self_bleu == 100.0, "self BLEU {self_bleu}");
    }

    let cases = common::read_json("oracles/bleu.json");
    let mut max_gap = 0.0f64;
    for case in cases.as_array().unwrap() {
        let tok: Tokenizer = case["tokenize"].as_str().unwrap().parse().map_err(|e: sdtkit::metrics::MetricsError| e.to_string())?;
        let hyps: Vec<String> = serde_json::from_value(case["hyps"].clone()).unwrap();
        let refs: Vec<String> = serde_json::from_value(case["refs"].clone()).unwrap();
        let score = bleu_corpus(&hyps, &refs, tok).map_err(|e| e.to_string())?.bleu.score;
        let gap = (score - case["score"].as_f64().unwrap()).abs();
        max_gap = max_gap.max(gap);
        ensure!(gap <= 0.01, "{}: {score} vs {}", case["name"], case["score"]);
    }
    let tok_cases = common::read_json("oracles/tokenize_13a.json");
    for case in tok_cases.as_array().unwrap() {
        let expected: Vec<String> = serde_json::from_value(case["tokens"].clone()).unwrap();
        ensure!(tokenize_13a(case["text"].as_str().unwrap()) == expected, "tokenizer: {}", case["text"]);
    }
    Ok(format!(
        "{pairs} edit-distance pairs, 1000 corpora (max rel. gap {worst:.1e}), reference scorer max gap {max_gap:.2e}"
    ))
}

fn direct_bleu(corpus: &[(Vec<String>, Vec<String>)]) -> f64 {
    let mut matches = [0u64; 4];
    let mut totals = [0u64; 4];
    let (mut c, mut r) = (0usize, 0usize);
    for (h, rf) in corpus {
        c += h.len();
        r += rf.len();
        for n in 1..=4 {
            let mut rc: HashMap<&[String], u64> = HashMap::new();
            rf.windows(n).for_each(|g| *rc.entry(g).or_default() += 1);
            let mut hc: HashMap<&[String], u64> = HashMap::new();
            h.windows(n).for_each(|g| *hc.entry(g).or_default() += 1);
            for (g, k) in hc {
                totals[n - 1] += k;
                matches[n - 1] += k.min(rc.get(g).copied().unwrap_or(0));
            }
        }
    }
    if matches.iter().all(|&m| m == 0) || totals.contains(&0) {
        return 0.0;
    }
    let mut smooth = 1.0;
    let mut log_sum = 0.0;
    for n in 0..4 {
        let p = if matches[n] == 0 {
            smooth *= 2.0;
            1.0 / (smooth * totals[n] as f64)
        } else {
            matches[n] as f64 / totals[n] as f64
        };
        log_sum += p.ln();
    }
    let bp = if c >= r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    100.0 * bp * (log_sum / 4.0).exp()
}

fn ac5() -> Result<String, String> {
    let refs = [
        "I think it's a bit naive.",
        "What do you think about it?",
        "He said it's a good idea.",
        "The order will arrive next week.",
        "Please send me the report by Friday.",
        "We should review the budget first.",
    ];
    let sys_a = [
        "I think it's a little naive.",
        "What do you think about it?",
        "He said that is a good idea.",
        "The order arrives next week.",
        "Please send the report by Friday.",
        "We should check the budget first.",
    ];
    let sys_b = [
        "It's a little sweet.",
        "What do you think?",
        "He said it's a good idea.",
        "The order will come next week.",
        "Send me report Friday.",
        "Review budget first.",
    ];
    let stats = |hyps: &[&str]| -> Vec<SentenceStats> {
        hyps.iter().zip(&refs).map(|(h, r)| sentence_stats(&tokenize_13a(h), &tokenize_13a(r))).collect()
    };
    let (a, b) = (stats(&sys_a), stats(&sys_b));
    let bleu = |s: &SentenceStats| bleu_from_stats(s).score;
    let total = |xs: &[SentenceStats]| {
        let mut s = SentenceStats::default();
        xs.iter().for_each(|x| s.add_assign(x));
        s
    };
    let observed = (bleu(&total(&a)) - bleu(&total(&b))).abs();
    let mut hits = 0;
    for mask in 0u32..64 {
        let (sa, sb): (Vec<_>, Vec<_>) =
            (0..6).map(|i| if mask >> i & 1 == 1 { (b[i], a[i]) } else { (a[i], b[i]) }).unzip();
        hits += usize::from((bleu(&total(&sa)) - bleu(&total(&sb))).abs() >= observed);
    }
    let exact = hits as f64 / 64.0;
    let trials = 10_000;
    let r = paired_approx_randomization(&a, &b, bleu, trials, 5).map_err(|e| e.to_string())?;
    let estimate = (r.p_value * (trials + 1) as f64 - 1.0) / trials as f64;
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    ensure!((estimate - exact).abs() <= 3.0 * sigma, "estimate {estimate} vs exact {exact} (sigma {sigma})");
    let same = paired_approx_randomization(&a, &a, bleu, trials, 5).map_err(|e| e.to_string())?;
    ensure!(same.p_value == 1.0, "identical systems p = {}", same.p_value);
    let replay = paired_approx_randomization(&a, &b, bleu, trials, 5).map_err(|e| e.to_string())?;
    ensure!(replay == r && replay.p_value.to_bits() == r.p_value.to_bits(), "replay differs");
    Ok(format!("exact p {exact:.4}, estimate {estimate:.4}, 3 sigma {:.4}", 3.0 * sigma))
}

fn ac6() -> Result<String, String> {
    let corpus = Corpus {
        split: Split::Test,
        audio_root: ".".into(),
        scenarios: synthetic_scenarios(20, 6),
    };
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    for jobs in [1, 8] {
        let config = RunConfig {
            mode: ContextMode::Bilingual,
            jobs,
            ..RunConfig::default()
        };
        let dir = tmp.path().join(format!("jobs{jobs}"));
        let result = run_experiment(&corpus, &config, &dir).map_err(|e| e.to_string())?;
        for direction in Direction::ALL {
            let score = result.report.bleu_for(direction).map(|d| d.bleu.score);
            ensure!(score == Some(100.0), "jobs {jobs} {direction}: BLEU {score:?}");
        }
        trees.push(common::tree(&dir));
    }
    ensure!(trees[0] == trees[1], "output trees differ between --jobs 1 and --jobs 8");
    Ok(format!("{} sentences, {} files identical", corpus.sentence_count(), trees[0].len()))
}

fn ac7() -> Result<String, String> {
    let config = BackendConfig::from_arg(common::fixture("dictionary.toml").to_str().unwrap()).map_err(|e| e.to_string())?;
    let mt = build_mt(&config, DEFAULT_SEPARATOR).map_err(|e| e.to_string())?;
    let d = &annotated(&common::three_turn())[0];
    let mut got = Vec::new();
    for (mode, want) in [(ContextMode::Bilingual, "naive"), (ContextMode::None, "sweet")] {
        let settings = TranslationSettings {
            mode,
            c: 5,
            separator: DEFAULT_SEPARATOR.into(),
        };
        let out = run_dialogue(d, &GoldEchoAsr, mt.as_ref(), &settings, Path::new(".")).map_err(|e| e.to_string())?;
        let prediction = &out.translation.predictions[&3];
        ensure!(prediction.contains(want), "{mode}: {prediction:?}");
        got.push(format!("{mode}: {prediction:?}"));
    }
    Ok(got.join(", "))
}

fn load_public(dir: &Path, split: Split) -> Result<Corpus, String> {
    if let Ok(corpus) = load_corpus(dir, split) {
        return Ok(corpus);
    }
    let file = dir.join(format!("{}.json", split.name()));
    let text = std::fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
    let scenarios = import_speechbsd(&text, "", &file).map_err(|e| e.to_string())?;
    Ok(Corpus {
        split,
        audio_root: dir.to_path_buf(),
        scenarios,
    })
}

fn ac8() -> Result<String, String> {
    let Some(dir) = std::env::var_os("SDTKIT_SPEECHBSD_DIR") else {
        return Ok(format!("{SKIPPED}SDTKIT_SPEECHBSD_DIR not set"));
    };
    let dir = Path::new(&dir);
    let expected = [(Split::Train, 670, 20_000), (Split::Dev, 69, 2_051), (Split::Test, 69, 2_120)];
    let mut test = None;
    for (split, scenarios, sentences) in expected {
        let corpus = load_public(dir, split)?;
        ensure!(
            corpus.scenarios.len() == scenarios && corpus.sentence_count() == sentences,
            "{split}: {} scenarios / {} sentences, expected {scenarios} / {sentences}",
            corpus.scenarios.len(),
            corpus.sentence_count()
        );
        if split == Split::Test {
            test = Some(corpus);
        }
    }
    let test = test.unwrap();
    let refs: Vec<(String, String)> = test
        .scenarios
        .iter()
        .flat_map(|s| s.utterances.iter().map(move |u| (format!("{}#{}", s.id, u.t), u.gold(Lang::En).to_string())))
        .collect();
    let fraction = zero_pronoun_candidates(&refs).fraction * 100.0;
    ensure!((fraction - 63.0).abs() <= 1.0, "pronoun fraction {fraction:.2}%");
    Ok(format!("counts match, pronoun fraction {fraction:.2}%"))
}
