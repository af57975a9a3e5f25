//! The two languages of a bilingual dialogue and translation directions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the two corpus languages.
///
/// Japanese is the first language and English the second; the first
/// speaker of variant A of every cross-language dialogue speaks Japanese.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    Ja,
    En,
}

impl Lang {
    pub const ALL: [Lang; 2] = [Lang::Ja, Lang::En];

    pub fn code(self) -> &'static str {
        match self {
            Lang::Ja => "ja",
            Lang::En => "en",
        }
    }

    /// Backend-facing tag in the mBART style.
    pub fn mt_tag(self) -> &'static str {
        match self {
            Lang::Ja => "ja_XX",
            Lang::En => "en_XX",
        }
    }

    pub fn other(self) -> Lang {
        match self {
            Lang::Ja => Lang::En,
            Lang::En => Lang::Ja,
        }
    }

    pub fn from_code(code: &str) -> Option<Lang> {
        match code {
            "ja" => Some(Lang::Ja),
            "en" => Some(Lang::En),
            _ => None,
        }
    }

    pub fn from_mt_tag(tag: &str) -> Option<Lang> {
        Lang::ALL.into_iter().find(|l| l.mt_tag() == tag)
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown language `{0}` (expected `ja` or `en`)")]
pub struct UnknownLang(pub String);

impl FromStr for Lang {
    type Err = UnknownLang;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Lang::from_code(s).ok_or_else(|| UnknownLang(s.to_string()))
    }
}

/// A source/target language pair. Source and target always differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Direction {
    src: Lang,
    tgt: Lang,
}

impl Direction {
    pub const JA_EN: Direction = Direction { src: Lang::Ja, tgt: Lang::En };
    pub const EN_JA: Direction = Direction { src: Lang::En, tgt: Lang::Ja };
    pub const ALL: [Direction; 2] = [Direction::JA_EN, Direction::EN_JA];

    pub fn from_source(src: Lang) -> Direction {
        Direction { src, tgt: src.other() }
    }

    pub fn src(self) -> Lang {
        self.src
    }

    pub fn tgt(self) -> Lang {
        self.tgt
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src, self.tgt)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid direction `{0}` (expected `ja-en` or `en-ja`)")]
pub struct InvalidDirection(pub String);

impl FromStr for Direction {
    type Err = InvalidDirection;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InvalidDirection(s.to_string());
        let (a, b) = s.split_once('-').ok_or_else(bad)?;
        let src = Lang::from_code(a).ok_or_else(bad)?;
        let tgt = Lang::from_code(b).ok_or_else(bad)?;
        if src == tgt {
            return Err(bad());
        }
        Ok(Direction { src, tgt })
    }
}

impl TryFrom<String> for Direction {
    type Error = InvalidDirection;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Direction> for String {
    fn from(d: Direction) -> String {
        d.to_string()
    }
}

/// A value held once per language.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerLang<T> {
    pub ja: T,
    pub en: T,
}

impl<T> PerLang<T> {
    pub fn new(ja: T, en: T) -> Self {
        PerLang { ja, en }
    }

    pub fn get(&self, lang: Lang) -> &T {
        match lang {
            Lang::Ja => &self.ja,
            Lang::En => &self.en,
        }
    }

    pub fn get_mut(&mut self, lang: Lang) -> &mut T {
        match lang {
            Lang::Ja => &mut self.ja,
            Lang::En => &mut self.en,
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(Lang, &T) -> U) -> PerLang<U> {
        PerLang { ja: f(Lang::Ja, &self.ja), en: f(Lang::En, &self.en) }
    }
}
