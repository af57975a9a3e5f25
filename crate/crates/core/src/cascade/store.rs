use std::cell::RefCell;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::CascadeError;
use crate::context::{ContextMode, HypothesisSource};
use crate::lang::Lang;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "lang", rename_all = "lowercase")]
pub enum AccessKind {
    Asr,
    Mt(Lang),
}

/// One read of the store: which turn was being translated, what was read
/// and whether it was there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Access {
    pub reader_t: usize,
    pub kind: AccessKind,
    pub t: usize,
    pub found: bool,
}

/// Recognizer and translator outputs of one dialogue. Every key is written
/// at most once and every read is logged.
#[derive(Debug, Default)]
pub struct HypothesisStore {
    dialogue: String,
    asr: BTreeMap<usize, String>,
    mt: BTreeMap<(usize, Lang), String>,
    log: RefCell<Vec<Access>>,
}

impl HypothesisStore {
    pub fn new(dialogue: impl Into<String>) -> Self {
        HypothesisStore {
            dialogue: dialogue.into(),
            ..Default::default()
        }
    }

    pub fn dialogue(&self) -> &str {
        &self.dialogue
    }

    pub fn put_asr(&mut self, t: usize, text: String) -> Result<(), CascadeError> {
        if self.asr.contains_key(&t) {
            return Err(self.duplicate(t, "asr"));
        }
        self.asr.insert(t, text);
        Ok(())
    }

    pub fn put_mt(&mut self, t: usize, lang: Lang, text: String) -> Result<(), CascadeError> {
        if self.mt.contains_key(&(t, lang)) {
            return Err(self.duplicate(t, "mt"));
        }
        self.mt.insert((t, lang), text);
        Ok(())
    }

    fn duplicate(&self, t: usize, kind: &'static str) -> CascadeError {
        CascadeError::DuplicateWrite {
            dialogue: self.dialogue.clone(),
            t,
            kind,
        }
    }

    /// Unlogged views of everything written so far, for output files.
    pub fn transcripts(&self) -> &BTreeMap<usize, String> {
        &self.asr
    }

    pub fn translations(&self) -> &BTreeMap<(usize, Lang), String> {
        &self.mt
    }

    /// A logged read handle for translating turn `reader_t`.
    pub fn reader(&self, reader_t: usize) -> StoreReader<'_> {
        StoreReader { store: self, reader_t }
    }

    pub fn access_log(&self) -> Vec<Access> {
        self.log.borrow().clone()
    }
}

pub struct StoreReader<'a> {
    store: &'a HypothesisStore,
    reader_t: usize,
}

impl StoreReader<'_> {
    fn record(&self, kind: AccessKind, t: usize, found: bool) {
        self.store.log.borrow_mut().push(Access {
            reader_t: self.reader_t,
            kind,
            t,
            found,
        });
    }
}

impl HypothesisSource for StoreReader<'_> {
    fn asr(&self, t: usize) -> Option<&str> {
        let text = self.store.asr.get(&t).map(String::as_str);
        self.record(AccessKind::Asr, t, text.is_some());
        text
    }

    fn mt(&self, t: usize, lang: Lang) -> Option<&str> {
        let text = self.store.mt.get(&(t, lang)).map(String::as_str);
        self.record(AccessKind::Mt(lang), t, text.is_some());
        text
    }
}

/// Reads that break the data dependencies of `mode`: in `mono`, any
/// translator output of the current or a later turn; in `none` and
/// `bilingual`, any translator output at all. Reads of missing keys are
/// violations in every mode.
pub fn discipline_violations(mode: ContextMode, log: &[Access]) -> Vec<Access> {
    log.iter()
        .filter(|a| {
            !a.found
                || match (mode, a.kind) {
                    (_, AccessKind::Asr) => false,
                    (ContextMode::Mono, AccessKind::Mt(_)) => a.t >= a.reader_t,
                    (_, AccessKind::Mt(_)) => true,
                }
        })
        .copied()
        .collect()
}
