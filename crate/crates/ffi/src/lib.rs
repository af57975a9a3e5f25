//! C ABI for sdtkit.
//!
//! Conventions:
//! - every fallible function returns an `SdtStatus`; on failure a message is
//!   available from `sdt_last_error()` on the same thread;
//! - strings are NUL-terminated UTF-8. Strings returned through `char **out`
//!   parameters are owned by the caller and released with `sdt_string_free`;
//! - handles are opaque and released with their `_free` function. Passing
//!   NULL to a `_free` function is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use sdtkit::context::{build_training_pairs, constrain, extract_current, render_input, ContextEntry, ContextMode, Origin};
use sdtkit::corpus::{load_corpus, split_scenario, Corpus, Split};
use sdtkit::lang::{Direction, Lang};
use sdtkit::metrics::{
    asr_error_rate, bleu_corpus, bleu_from_stats, paired_approx_randomization, sentence_stats, SentenceStats,
    Tokenizer,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Corpus = 4,
    Context = 5,
    Metrics = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdtLang {
    Ja = 0,
    En = 1,
}

impl From<SdtLang> for Lang {
    fn from(l: SdtLang) -> Lang {
        match l {
            SdtLang::Ja => Lang::Ja,
            SdtLang::En => Lang::En,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdtContextMode {
    None = 0,
    Mono = 1,
    Bilingual = 2,
}

impl From<SdtContextMode> for ContextMode {
    fn from(m: SdtContextMode) -> ContextMode {
        match m {
            SdtContextMode::None => ContextMode::None,
            SdtContextMode::Mono => ContextMode::Mono,
            SdtContextMode::Bilingual => ContextMode::Bilingual,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdtSplit {
    Train = 0,
    Dev = 1,
    Test = 2,
}

impl From<SdtSplit> for Split {
    fn from(s: SdtSplit) -> Split {
        match s {
            SdtSplit::Train => Split::Train,
            SdtSplit::Dev => Split::Dev,
            SdtSplit::Test => Split::Test,
        }
    }
}

/// A loaded corpus split.
pub struct SdtCorpus {
    inner: Corpus,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Error(SdtStatus, String);

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, converting errors and panics into a status and the thread's
/// last error.
fn guard(f: impl FnOnce() -> Result<(), Error>) -> SdtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SdtStatus::Ok
        }
        Ok(Err(Error(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            SdtStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Error> {
    if p.is_null() {
        return Err(Error(SdtStatus::NullArgument, format!("`{name}` is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error(SdtStatus::InvalidUtf8, format!("`{name}` is not valid UTF-8")))
}

unsafe fn str_array<'a>(p: *const *const c_char, n: usize, name: &str) -> Result<Vec<&'a str>, Error> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(Error(SdtStatus::NullArgument, format!("`{name}` is NULL")));
    }
    (0..n)
        .map(|i| str_arg(*p.add(i), &format!("{name}[{i}]")))
        .collect()
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Error> {
    p.as_mut()
        .ok_or_else(|| Error(SdtStatus::NullArgument, format!("`{name}` is NULL")))
}

fn string_out(out: &mut *mut c_char, s: String) -> Result<(), Error> {
    let c = CString::new(s).map_err(|_| Error(SdtStatus::InvalidArgument, "result contains NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn metrics_err(e: impl ToString) -> Error {
    Error(SdtStatus::Metrics, e.to_string())
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn sdt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn sdt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn sdt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a corpus file, or `<dir>/<split>.json` when `path` is a directory.
///
/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sdt_corpus_load(path: *const c_char, split: SdtSplit, out: *mut *mut SdtCorpus) -> SdtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let inner = load_corpus(Path::new(path), split.into()).map_err(|e| Error(SdtStatus::Corpus, e.to_string()))?;
        *out = Box::into_raw(Box::new(SdtCorpus { inner }));
        Ok(())
    })
}

/// # Safety
/// `corpus` must be NULL or a handle from `sdt_corpus_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sdt_corpus_free(corpus: *mut SdtCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Number of scenarios; 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sdt_corpus_scenario_count(corpus: *const SdtCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.inner.scenarios.len())
}

/// Number of utterances over all scenarios; 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sdt_corpus_sentence_count(corpus: *const SdtCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.inner.sentence_count())
}

/// Gold model input for utterance `t` (1-based) of cross-language variant
/// `variant` (0 = A, 1 = B) of scenario `scenario` (0-based).
///
/// # Safety
/// `corpus` must be a live handle, `sep` a valid C string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn sdt_corpus_gold_input(
    corpus: *const SdtCorpus,
    scenario: usize,
    variant: u32,
    t: usize,
    mode: SdtContextMode,
    c: usize,
    sep: *const c_char,
    out: *mut *mut c_char,
) -> SdtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let corpus = corpus
            .as_ref()
            .ok_or_else(|| Error(SdtStatus::NullArgument, "`corpus` is NULL".into()))?;
        let sep = str_arg(sep, "sep")?;
        let s = corpus.inner.scenarios.get(scenario).ok_or_else(|| {
            Error(SdtStatus::OutOfRange, format!("scenario {scenario} of {}", corpus.inner.scenarios.len()))
        })?;
        let (a, b) = split_scenario(s);
        let d = match variant {
            0 => a,
            1 => b,
            v => return Err(Error(SdtStatus::InvalidArgument, format!("variant {v} (expected 0 or 1)"))),
        };
        let turn = d
            .turns
            .iter()
            .find(|turn| turn.t == t)
            .ok_or_else(|| Error(SdtStatus::OutOfRange, format!("utterance {t} of {}", s.len())))?;
        let mode = ContextMode::from(mode);
        let direction = (mode != ContextMode::Bilingual).then(|| Direction::from_source(turn.spoken));
        let units = build_training_pairs(s, &d, mode, c, direction, sep)
            .map_err(|e| Error(SdtStatus::Context, e.to_string()))?;
        let unit = units
            .into_iter()
            .find(|u| u.current_t == t)
            .ok_or_else(|| Error(SdtStatus::Context, format!("no input rendered for utterance {t}")))?;
        string_out(out, unit.source_text)
    })
}

/// Joins `n_context` context segments and `current` with `sep`.
///
/// # Safety
/// `context` must point to `n_context` valid C strings (it may be NULL when
/// `n_context` is 0); `current` and `sep` must be valid C strings and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sdt_render_input(
    context: *const *const c_char,
    n_context: usize,
    current: *const c_char,
    sep: *const c_char,
    out: *mut *mut c_char,
) -> SdtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let segments = str_array(context, n_context, "context")?;
        let current = str_arg(current, "current")?;
        let sep = str_arg(sep, "sep")?;
        let window = constrain(
            segments.iter().enumerate().map(|(i, s)| ContextEntry {
                t: i + 1,
                language: Lang::Ja,
                text: s.to_string(),
                origin: Origin::Gold,
            }),
            n_context,
            n_context + 1,
        );
        let rendered =
            render_input(&window, current, sep).map_err(|e| Error(SdtStatus::Context, e.to_string()))?;
        string_out(out, rendered)
    })
}

/// Last non-empty segment of a model output. Writes NULL to `out` when the
/// output has no non-empty segment.
///
/// # Safety
/// `output` and `sep` must be valid C strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sdt_extract_current(
    output: *const c_char,
    sep: *const c_char,
    out: *mut *mut c_char,
) -> SdtStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let output = str_arg(output, "output")?;
        let sep = str_arg(sep, "sep")?;
        match extract_current(output, sep) {
            Some(s) => string_out(out, s),
            None => Ok(()),
        }
    })
}

fn tokenizer(name: &str) -> Result<Tokenizer, Error> {
    name.parse().map_err(|e: sdtkit::metrics::MetricsError| Error(SdtStatus::InvalidArgument, e.to_string()))
}

/// Corpus BLEU over `n` segment pairs. `tokenizer` is "13a", "char" or
/// "none".
///
/// # Safety
/// `hyps` and `refs` must each point to `n` valid C strings; `tokenizer`
/// must be a valid C string and `score` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sdt_bleu(
    hyps: *const *const c_char,
    refs: *const *const c_char,
    n: usize,
    tokenizer: *const c_char,
    score: *mut f64,
) -> SdtStatus {
    guard(|| {
        let score = out_arg(score, "score")?;
        let hyps = str_array(hyps, n, "hyps")?;
        let refs = str_array(refs, n, "refs")?;
        let tok = self::tokenizer(str_arg(tokenizer, "tokenizer")?)?;
        *score = bleu_corpus(&hyps, &refs, tok).map_err(metrics_err)?.bleu.score;
        Ok(())
    })
}

/// Corpus recognition error rate: WER for English, CER for Japanese.
///
/// # Safety
/// `refs` and `hyps` must each point to `n` valid C strings and `rate` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sdt_error_rate(
    refs: *const *const c_char,
    hyps: *const *const c_char,
    n: usize,
    lang: SdtLang,
    rate: *mut f64,
) -> SdtStatus {
    guard(|| {
        let rate = out_arg(rate, "rate")?;
        let refs = str_array(refs, n, "refs")?;
        let hyps = str_array(hyps, n, "hyps")?;
        let (_, stats) = asr_error_rate(&refs, &hyps, lang.into()).map_err(metrics_err)?;
        if stats.ref_len == 0 {
            return Err(metrics_err("references are empty"));
        }
        *rate = stats.rate();
        Ok(())
    })
}

/// Paired approximate randomization on corpus BLEU between two systems.
///
/// # Safety
/// `refs`, `hyps_a` and `hyps_b` must each point to `n` valid C strings;
/// `tokenizer` must be a valid C string and `p_value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sdt_sigtest_bleu(
    refs: *const *const c_char,
    hyps_a: *const *const c_char,
    hyps_b: *const *const c_char,
    n: usize,
    tokenizer: *const c_char,
    trials: usize,
    seed: u64,
    p_value: *mut f64,
) -> SdtStatus {
    guard(|| {
        let p_value = out_arg(p_value, "p_value")?;
        let refs = str_array(refs, n, "refs")?;
        let a = str_array(hyps_a, n, "hyps_a")?;
        let b = str_array(hyps_b, n, "hyps_b")?;
        let tok = self::tokenizer(str_arg(tokenizer, "tokenizer")?)?;
        let stats = |hyps: &[&str]| -> Vec<SentenceStats> {
            hyps.iter()
                .zip(&refs)
                .map(|(h, r)| sentence_stats(&tok.tokenize(h), &tok.tokenize(r)))
                .collect()
        };
        let result = paired_approx_randomization(&stats(&a), &stats(&b), |s| bleu_from_stats(s).score, trials, seed)
            .map_err(metrics_err)?;
        *p_value = result.p_value;
        Ok(())
    })
}
