use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::lang::Lang;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tokenizer {
    /// mteval-v13a rules.
    #[serde(rename = "13a")]
    Thirteen,
    /// One token per non-whitespace character. Stands in for a
    /// morphological analyzer on the Japanese side.
    #[serde(rename = "char")]
    Char,
    /// Whitespace only.
    #[serde(rename = "none")]
    Whitespace,
}

impl Tokenizer {
    pub fn for_target(lang: Lang) -> Tokenizer {
        match lang {
            Lang::En => Tokenizer::Thirteen,
            Lang::Ja => Tokenizer::Char,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tokenizer::Thirteen => "13a",
            Tokenizer::Char => "char",
            Tokenizer::Whitespace => "none",
        }
    }

    pub fn tokenize(self, text: &str) -> Vec<String> {
        match self {
            Tokenizer::Thirteen => tokenize_13a(text),
            Tokenizer::Char => tokenize_char(text),
            Tokenizer::Whitespace => text.split_whitespace().map(str::to_string).collect(),
        }
    }
}

impl fmt::Display for Tokenizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tokenizer {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "13a" => Ok(Tokenizer::Thirteen),
            "char" => Ok(Tokenizer::Char),
            "none" => Ok(Tokenizer::Whitespace),
            other => Err(MetricsError::UnknownTokenizer(other.to_string())),
        }
    }
}

struct Rules13a([(Regex, &'static str); 4]);

fn rules() -> &'static Rules13a {
    static RULES: OnceLock<Rules13a> = OnceLock::new();
    RULES.get_or_init(|| {
        let re = |p: &str| Regex::new(p).expect("static pattern");
        Rules13a([
            (re(r"([\{-~\[-` -&\(-\+:-@/])"), " $1 "),
            // period and comma, unless preceded by a digit
            (re(r"([^0-9])([\.,])"), "$1 $2 "),
            // period and comma, unless followed by a digit
            (re(r"([\.,])([^0-9])"), " $1 $2"),
            // dash after a digit
            (re(r"([0-9])(-)"), "$1 $2 "),
        ])
    })
}

/// Tokenizes with the mteval-v13a rules. Case is preserved.
pub fn tokenize_13a(text: &str) -> Vec<String> {
    let mut line = text
        .trim_end()
        .replace("<skipped>", "")
        .replace("-\n", "")
        .replace('\n', " ");
    if line.contains('&') {
        line = line
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let mut line = format!(" {line} ");
    for (re, rep) in &rules().0 {
        line = re.replace_all(&line, *rep).into_owned();
    }
    line.split_whitespace().map(str::to_string).collect()
}

pub fn tokenize_char(text: &str) -> Vec<String> {
    text.chars().filter(|c| !c.is_whitespace()).map(String::from).collect()
}
