//! Zero-pronoun analysis: candidate selection on English references,
//! seeded sampling for manual evaluation, annotation sheets and tallies.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pronoun {
    I,
    You,
    He,
    She,
    It,
    They,
}

impl Pronoun {
    pub const ALL: [Pronoun; 6] = [Pronoun::I, Pronoun::You, Pronoun::He, Pronoun::She, Pronoun::It, Pronoun::They];

    /// Case-insensitive match of a whole token.
    pub fn from_token(token: &str) -> Option<Pronoun> {
        Some(match token.to_lowercase().as_str() {
            "i" => Pronoun::I,
            "you" => Pronoun::You,
            "he" => Pronoun::He,
            "she" => Pronoun::She,
            "it" => Pronoun::It,
            "they" => Pronoun::They,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pronoun::I => "I",
            Pronoun::You => "you",
            Pronoun::He => "he",
            Pronoun::She => "she",
            Pronoun::It => "it",
            Pronoun::They => "they",
        }
    }
}

impl fmt::Display for Pronoun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const CLITICS: [&str; 6] = ["'s", "'re", "'ve", "'ll", "'m", "'d"];

fn split_clitic(word: &str) -> Vec<String> {
    let lower = word.to_lowercase();
    if lower == "cannot" {
        return vec![word[..3].to_string(), word[3..].to_string()];
    }
    if lower.len() > 3 && lower.ends_with("n't") {
        let cut = word.len() - 3;
        return vec![word[..cut].to_string(), word[cut..].to_string()];
    }
    for clitic in CLITICS {
        if lower.len() > clitic.len() && lower.ends_with(clitic) {
            let cut = word.len() - clitic.len();
            return vec![word[..cut].to_string(), word[cut..].to_string()];
        }
    }
    vec![word.to_string()]
}

/// Word tokenizer in the Penn Treebank style: punctuation is split from
/// words and contractions are split into clitics ("It's" -> "It" "'s",
/// "don't" -> "do" "n't"). Unlike the Treebank rules, a period directly
/// after a word is split off everywhere, not only at the end of the text.
pub fn tokenize_clitics(text: &str) -> Vec<String> {
    let text = text.replace(['\u{2019}', '\u{2018}'], "'");
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let is_punct = |c: char| !c.is_alphanumeric() && c != '\'';
        let start = chunk.find(|c: char| !is_punct(c)).unwrap_or(chunk.len());
        let end = chunk.rfind(|c: char| !is_punct(c)).map_or(start, |i| i + chunk[i..].chars().next().unwrap().len_utf8());
        out.extend(chunk[..start].chars().map(String::from));
        if start < end {
            let core = &chunk[start..end];
            let lower = core.to_lowercase();
            if CLITICS.contains(&lower.as_str()) || lower == "n't" {
                out.push(core.to_string());
                out.extend(chunk[end..].chars().map(String::from));
                continue;
            }
            // a leading quote is punctuation unless it starts a clitic
            let (lead, word) = match core.strip_prefix('\'') {
                Some(rest) if !rest.is_empty() => ("'", rest),
                _ => ("", core),
            };
            if !lead.is_empty() {
                out.push(lead.to_string());
            }
            let (word, trail) = match word.strip_suffix('\'') {
                Some(rest) if !rest.is_empty() => (rest, "'"),
                _ => (word, ""),
            };
            out.extend(split_clitic(word));
            if !trail.is_empty() {
                out.push(trail.to_string());
            }
        }
        out.extend(chunk[end.max(start)..].chars().map(String::from));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Judgment {
    Correct,
    Incorrect,
    NotZeroPronoun,
    Unjudged,
}

impl Judgment {
    pub fn label(self) -> &'static str {
        match self {
            Judgment::Correct => "correct",
            Judgment::Incorrect => "incorrect",
            Judgment::NotZeroPronoun => "not_zero_pronoun",
            Judgment::Unjudged => "",
        }
    }
}

impl FromStr for Judgment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "correct" => Ok(Judgment::Correct),
            "incorrect" => Ok(Judgment::Incorrect),
            "not_zero_pronoun" => Ok(Judgment::NotZeroPronoun),
            "" | "unjudged" => Ok(Judgment::Unjudged),
            other => Err(other.to_string()),
        }
    }
}

/// One English reference sentence screened for overt pronouns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroPronounRecord {
    pub id: String,
    pub en_ref: String,
    pub pronouns: BTreeSet<Pronoun>,
    pub sampled: bool,
}

impl ZeroPronounRecord {
    pub fn is_candidate(&self) -> bool {
        !self.pronouns.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub records: Vec<ZeroPronounRecord>,
    pub candidates: usize,
    /// Share of sentences containing at least one pronoun.
    pub fraction: f64,
}

pub fn zero_pronoun_candidates<I: AsRef<str>, T: AsRef<str>>(refs_en: &[(I, T)]) -> CandidateReport {
    let records: Vec<ZeroPronounRecord> = refs_en
        .iter()
        .map(|(id, text)| ZeroPronounRecord {
            id: id.as_ref().to_string(),
            en_ref: text.as_ref().to_string(),
            pronouns: tokenize_clitics(text.as_ref())
                .iter()
                .filter_map(|t| Pronoun::from_token(t))
                .collect(),
            sampled: false,
        })
        .collect();
    let candidates = records.iter().filter(|r| r.is_candidate()).count();
    let fraction = if records.is_empty() {
        0.0
    } else {
        candidates as f64 / records.len() as f64
    };
    CandidateReport {
        records,
        candidates,
        fraction,
    }
}

/// Uniform sample of `n` candidates without replacement, in corpus order,
/// with `sampled` set.
pub fn sample_manual_eval(
    records: &[ZeroPronounRecord],
    n: usize,
    seed: u64,
) -> Result<Vec<ZeroPronounRecord>, MetricsError> {
    let pool: Vec<&ZeroPronounRecord> = records.iter().filter(|r| r.is_candidate()).collect();
    if n > pool.len() {
        return Err(MetricsError::SampleTooLarge {
            requested: n,
            available: pool.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, pool.len(), n).into_vec();
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .map(|i| ZeroPronounRecord {
            sampled: true,
            ..pool[i].clone()
        })
        .collect())
}

/// A row of the annotation sheet. Columns, in order:
/// `id ja_ref en_ref system hypothesis judgment`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SheetRow {
    pub id: String,
    pub ja_ref: String,
    pub en_ref: String,
    pub system: String,
    pub hypothesis: String,
    pub judgment: Judgment,
}

/// One row per sampled sentence and system. Missing hypotheses are left
/// empty.
pub fn build_sheet(
    sampled: &[ZeroPronounRecord],
    ja_refs: &HashMap<String, String>,
    systems: &[(String, HashMap<String, String>)],
) -> Vec<SheetRow> {
    let mut rows = Vec::new();
    for record in sampled {
        for (system, hyps) in systems {
            rows.push(SheetRow {
                id: record.id.clone(),
                ja_ref: ja_refs.get(&record.id).cloned().unwrap_or_default(),
                en_ref: record.en_ref.clone(),
                system: system.clone(),
                hypothesis: hyps.get(&record.id).cloned().unwrap_or_default(),
                judgment: Judgment::Unjudged,
            });
        }
    }
    rows
}

const HEADER: [&str; 6] = ["id", "ja_ref", "en_ref", "system", "hypothesis", "judgment"];

fn cell(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Writes a tab-separated sheet with a header line. Tabs and newlines inside
/// cells become spaces.
pub fn write_sheet<W: Write>(rows: &[SheetRow], out: W) -> Result<(), MetricsError> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Never)
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            cell(&r.id),
            cell(&r.ja_ref),
            cell(&r.en_ref),
            cell(&r.system),
            cell(&r.hypothesis),
            r.judgment.label().to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_sheet<R: Read>(input: R) -> Result<Vec<SheetRow>, MetricsError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .flexible(true)
        .from_reader(input);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let get = |k: usize| record.get(k).unwrap_or("").to_string();
        let label = get(5);
        let judgment = label
            .parse()
            .map_err(|label| MetricsError::UnknownJudgment { line, label })?;
        rows.push(SheetRow {
            id: get(0),
            ja_ref: get(1),
            en_ref: get(2),
            system: get(3),
            hypothesis: get(4),
            judgment,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub correct: usize,
    pub incorrect: usize,
    pub not_zero_pronoun: usize,
    pub unjudged: usize,
}

impl Tally {
    /// Rows judged to contain a zero pronoun.
    pub fn zero_pronoun(&self) -> usize {
        self.correct + self.incorrect
    }
}

/// Per-system tallies, in order of first appearance on the sheet.
pub fn ingest_annotations(rows: &[SheetRow]) -> Vec<(String, Tally)> {
    let mut tallies: Vec<(String, Tally)> = Vec::new();
    for row in rows {
        let i = match tallies.iter().position(|(s, _)| *s == row.system) {
            Some(i) => i,
            None => {
                tallies.push((row.system.clone(), Tally::default()));
                tallies.len() - 1
            }
        };
        let t = &mut tallies[i].1;
        match row.judgment {
            Judgment::Correct => t.correct += 1,
            Judgment::Incorrect => t.incorrect += 1,
            Judgment::NotZeroPronoun => t.not_zero_pronoun += 1,
            Judgment::Unjudged => t.unjudged += 1,
        }
    }
    tallies
}

/// Renders each sentence as a block: both references, then every system's
/// output with its judgment.
pub fn render_examples(rows: &[SheetRow]) -> String {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<&str, Vec<&SheetRow>> = BTreeMap::new();
    for row in rows {
        if !groups.contains_key(row.id.as_str()) {
            order.push(&row.id);
        }
        groups.entry(&row.id).or_default().push(row);
    }
    let mut out = String::new();
    for id in order {
        let group = &groups[id];
        let width = group.iter().map(|r| r.system.chars().count()).max().unwrap_or(0).max("En reference".len());
        out.push_str(&format!("[{id}]\n"));
        out.push_str(&format!("{:<width$}  {}\n", "Ja reference", group[0].ja_ref));
        out.push_str(&format!("{:<width$}  {}\n", "En reference", group[0].en_ref));
        for r in group {
            let mark = match r.judgment {
                Judgment::Unjudged => String::new(),
                j => format!("  ({})", j.label()),
            };
            out.push_str(&format!("{:<width$}  {}{mark}\n", r.system, r.hypothesis));
        }
        out.push('\n');
    }
    out
}
