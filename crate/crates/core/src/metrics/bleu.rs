use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::sigtest::Additive;
use super::tokenize::Tokenizer;
use super::MetricsError;

pub const MAX_ORDER: usize = 4;

/// Sufficient statistics of one hypothesis/reference pair. Corpus BLEU is a
/// function of their sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceStats {
    /// Clipped n-gram matches, n = 1..=4.
    pub matches: [u64; MAX_ORDER],
    /// Hypothesis n-gram counts, n = 1..=4.
    pub totals: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl Additive for SentenceStats {
    fn add_assign(&mut self, other: &Self) {
        for n in 0..MAX_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuScore {
    pub score: f64,
    /// Modified n-gram precisions in percent, after smoothing.
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: u64,
    pub ref_len: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusBleu {
    pub bleu: BleuScore,
    pub tokenizer: Tokenizer,
    pub sentences: Vec<SentenceStats>,
}

fn ngram_counts(tokens: &[String]) -> HashMap<&[String], u64> {
    let mut counts = HashMap::new();
    for n in 1..=MAX_ORDER {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

pub fn sentence_stats(hyp: &[String], reference: &[String]) -> SentenceStats {
    let ref_counts = ngram_counts(reference);
    let mut stats = SentenceStats {
        hyp_len: hyp.len() as u64,
        ref_len: reference.len() as u64,
        ..Default::default()
    };
    for (gram, count) in ngram_counts(hyp) {
        let n = gram.len() - 1;
        stats.totals[n] += count;
        if let Some(&r) = ref_counts.get(gram) {
            stats.matches[n] += count.min(r);
        }
    }
    stats
}

/// BLEU-4 from (summed) statistics, with the brevity penalty and the
/// exponential smoothing of mteval-v13a for orders without matches.
pub fn bleu_from_stats(s: &SentenceStats) -> BleuScore {
    let (c, r) = (s.hyp_len as f64, s.ref_len as f64);
    let brevity_penalty = if s.hyp_len >= s.ref_len {
        1.0
    } else if s.hyp_len > 0 {
        (1.0 - r / c).exp()
    } else {
        0.0
    };
    let mut ratios = [0.0; MAX_ORDER];
    let zero = |ratios: [f64; MAX_ORDER]| BleuScore {
        score: 0.0,
        precisions: ratios.map(|p| p * 100.0),
        brevity_penalty,
        hyp_len: s.hyp_len,
        ref_len: s.ref_len,
    };
    if s.matches.iter().all(|&m| m == 0) {
        return zero(ratios);
    }
    let mut smooth = 1.0;
    for (ratio, (&matches, &total)) in ratios.iter_mut().zip(s.matches.iter().zip(&s.totals)) {
        if total == 0 {
            break;
        }
        *ratio = if matches == 0 {
            smooth *= 2.0;
            1.0 / (smooth * total as f64)
        } else {
            matches as f64 / total as f64
        };
    }
    if ratios.contains(&0.0) {
        return zero(ratios);
    }
    // Ratios rather than percentages keep a perfect match at exactly 100.
    let mean_log = ratios.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
    BleuScore {
        score: 100.0 * brevity_penalty * mean_log.exp(),
        precisions: ratios.map(|p| p * 100.0),
        brevity_penalty,
        hyp_len: s.hyp_len,
        ref_len: s.ref_len,
    }
}

/// Corpus BLEU with a single reference per segment.
pub fn bleu_corpus<H: AsRef<str>, R: AsRef<str>>(
    hyps: &[H],
    refs: &[R],
    tokenizer: Tokenizer,
) -> Result<CorpusBleu, MetricsError> {
    if hyps.len() != refs.len() {
        return Err(MetricsError::LengthMismatch {
            what: "BLEU",
            left: hyps.len(),
            right: refs.len(),
        });
    }
    if hyps.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let sentences: Vec<SentenceStats> = hyps
        .iter()
        .zip(refs)
        .map(|(h, r)| sentence_stats(&tokenizer.tokenize(h.as_ref()), &tokenizer.tokenize(r.as_ref())))
        .collect();
    let mut total = SentenceStats::default();
    for s in &sentences {
        total.add_assign(s);
    }
    Ok(CorpusBleu {
        bleu: bleu_from_stats(&total),
        tokenizer,
        sentences,
    })
}
