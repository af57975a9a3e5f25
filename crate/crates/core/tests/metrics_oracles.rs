mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use sdtkit::metrics::{
    bleu_corpus, bleu_from_stats, cer, edit_distance, sentence_stats, tokenize_13a, wer, Additive, SentenceStats,
    Tokenizer,
};

/// Plain recursive Levenshtein with memoization; independent of the
/// single-row implementation under test.
fn levenshtein_oracle(a: &[u8], b: &[u8]) -> usize {
    fn go(a: &[u8], b: &[u8], i: usize, j: usize, memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let sub = go(a, b, i + 1, j + 1, memo) + usize::from(a[i] != b[j]);
        let del = go(a, b, i + 1, j, memo) + 1;
        let ins = go(a, b, i, j + 1, memo) + 1;
        let v = sub.min(del).min(ins);
        memo.insert((i, j), v);
        v
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

fn all_strings(alphabet: &[u8], max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        frontier = frontier
            .iter()
            .flat_map(|s: &Vec<u8>| {
                alphabet.iter().map(move |&c| {
                    let mut t = s.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

#[test]
fn edit_distance_matches_exhaustive_oracle() {
    // all pairs over a binary alphabet up to length 6, ternary up to 4
    for (alphabet, max_len) in [(&b"ab"[..], 6), (&b"abc"[..], 4)] {
        let strings = all_strings(alphabet, max_len);
        for a in &strings {
            for b in &strings {
                assert_eq!(edit_distance(a, b), levenshtein_oracle(a, b), "{a:?} {b:?}");
            }
        }
    }
}

#[test]
fn wer_and_cer_are_distance_over_reference_length() {
    let strings = all_strings(b"xyz", 4);
    for r in strings.iter().filter(|s| !s.is_empty()) {
        for h in &strings {
            let expected = levenshtein_oracle(r, h) as f64 / r.len() as f64;
            let words = |s: &[u8]| s.iter().map(|&c| format!("w{}", c as char)).collect::<Vec<_>>();
            assert!((wer(&words(r), &words(h)).unwrap() - expected).abs() < 1e-12);
            let chars = |s: &[u8]| String::from_utf8(s.to_vec()).unwrap();
            assert!((cer(&chars(r), &chars(h)).unwrap() - expected).abs() < 1e-12);
        }
    }
    assert!(wer::<&str>(&[], &["a"]).is_err());
}

#[test]
fn tokenizer_matches_reference_implementation() {
    let cases = common::read_json("oracles/tokenize_13a.json");
    let cases = cases.as_array().unwrap();
    assert!(cases.len() >= 50);
    for case in cases {
        let text = case["text"].as_str().unwrap();
        let expected: Vec<String> = serde_json::from_value(case["tokens"].clone()).unwrap();
        assert_eq!(tokenize_13a(text), expected, "{text:?}");
    }
}

#[test]
fn bleu_matches_reference_implementation() {
    let cases = common::read_json("oracles/bleu.json");
    for case in cases.as_array().unwrap() {
        let name = case["name"].as_str().unwrap();
        let tokenizer: Tokenizer = case["tokenize"].as_str().unwrap().parse().unwrap();
        let hyps: Vec<String> = serde_json::from_value(case["hyps"].clone()).unwrap();
        let refs: Vec<String> = serde_json::from_value(case["refs"].clone()).unwrap();
        let bleu = bleu_corpus(&hyps, &refs, tokenizer).unwrap().bleu;
        let expected = case["score"].as_f64().unwrap();
        assert!((bleu.score - expected).abs() <= 0.01, "{name}: {} vs {expected}", bleu.score);
        assert!((bleu.brevity_penalty - case["bp"].as_f64().unwrap()).abs() < 1e-6, "{name}");
        assert_eq!(bleu.hyp_len, case["sys_len"].as_u64().unwrap(), "{name}");
        assert_eq!(bleu.ref_len, case["ref_len"].as_u64().unwrap(), "{name}");
    }
}

/// Corpus BLEU computed directly from pooled n-gram counts, without going
/// through per-sentence statistics.
fn direct_bleu(hyps: &[Vec<String>], refs: &[Vec<String>]) -> f64 {
    let mut matches = [0u64; 4];
    let mut totals = [0u64; 4];
    let (mut c, mut r) = (0u64, 0u64);
    for (h, rf) in hyps.iter().zip(refs) {
        c += h.len() as u64;
        r += rf.len() as u64;
        for n in 1..=4 {
            let mut ref_counts: HashMap<&[String], u64> = HashMap::new();
            for g in rf.windows(n) {
                *ref_counts.entry(g).or_default() += 1;
            }
            let mut hyp_counts: HashMap<&[String], u64> = HashMap::new();
            for g in h.windows(n) {
                *hyp_counts.entry(g).or_default() += 1;
            }
            for (g, k) in hyp_counts {
                totals[n - 1] += k;
                matches[n - 1] += k.min(ref_counts.get(g).copied().unwrap_or(0));
            }
        }
    }
    if matches.iter().all(|&m| m == 0) {
        return 0.0;
    }
    let mut smooth = 1.0;
    let mut log_sum = 0.0;
    for n in 0..4 {
        if totals[n] == 0 {
            return 0.0;
        }
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

fn sentence() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e"]), 0..12)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn corpus_pair() -> impl Strategy<Value = Vec<(Vec<String>, Vec<String>)>> {
    prop::collection::vec((sentence(), sentence().prop_filter("non-empty", |s| !s.is_empty())), 1..10)
}

fn summed(pairs: &[(Vec<String>, Vec<String>)]) -> SentenceStats {
    let mut total = SentenceStats::default();
    for (h, r) in pairs {
        total.add_assign(&sentence_stats(h, r));
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn summed_statistics_equal_direct_computation(pairs in corpus_pair()) {
        let (hyps, refs): (Vec<_>, Vec<_>) = pairs.iter().cloned().unzip();
        let via_stats = bleu_from_stats(&summed(&pairs)).score;
        prop_assert!((via_stats - direct_bleu(&hyps, &refs)).abs() < 1e-9);
    }

    #[test]
    fn self_bleu_is_exactly_100(refs in prop::collection::vec(sentence().prop_filter("n>=4", |s| s.len() >= 4), 1..10)) {
        let pairs: Vec<_> = refs.iter().map(|r| (r.clone(), r.clone())).collect();
        prop_assert_eq!(bleu_from_stats(&summed(&pairs)).score, 100.0);
    }

    #[test]
    fn bleu_is_invariant_to_sentence_order(pairs in corpus_pair(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = pairs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(bleu_from_stats(&summed(&pairs)).score, bleu_from_stats(&summed(&shuffled)).score);
    }

    #[test]
    fn removing_four_gram_matches_lowers_bleu(r in prop::collection::vec(prop::sample::select(vec!["a", "b", "c"]), 6..14)) {
        // break the hypothesis one position at a time with a token absent
        // from the reference; scores must not increase
        let reference: Vec<String> = r.into_iter().map(String::from).collect();
        let mut hyp = reference.clone();
        let mut last = bleu_from_stats(&sentence_stats(&hyp, &reference)).score;
        for i in (0..hyp.len()).step_by(2) {
            hyp[i] = "zz".into();
            let score = bleu_from_stats(&sentence_stats(&hyp, &reference)).score;
            prop_assert!(score <= last + 1e-12);
            last = score;
        }
    }
}

#[test]
fn japanese_uses_character_segmentation() {
    let hyp = ["ちょっと甘いと思います。"];
    let reference = ["ちょっと甘いと思います。"];
    let bleu = bleu_corpus(&hyp, &reference, Tokenizer::Char).unwrap().bleu;
    assert_eq!(bleu.score, 100.0);
    assert_eq!(bleu.hyp_len, 12);
    // without segmentation the whole sentence is one token
    let one = bleu_corpus(&["ちょっと甘いと思う。"], &reference, Tokenizer::Thirteen).unwrap().bleu;
    let many = bleu_corpus(&["ちょっと甘いと思う。"], &reference, Tokenizer::Char).unwrap().bleu;
    assert_eq!(one.score, 0.0);
    assert!(many.score > 0.0);
}
