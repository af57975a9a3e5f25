//! Command-line interface. Every subcommand validates its flags before doing
//! any work; runs write a manifest next to their outputs.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 backend error.

mod commands;

use std::ffi::OsString;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::backends::{BackendConfig, ConfigError};
use crate::cascade::CascadeError;
use crate::context::{ContextError, ContextMode, DEFAULT_CONTEXT_WIDTH, DEFAULT_SEPARATOR};
use crate::corpus::{CorpusError, Split};
use crate::lang::Direction;
use crate::metrics::{MetricsError, Tokenizer, DEFAULT_TRIALS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_BACKEND: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sdtkit", version, about = "Speech dialogue translation toolkit")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub(crate) enum CorpusFormat {
    /// This toolkit's corpus schema.
    Schema,
    /// The public SpeechBSD release layout.
    Speechbsd,
}

#[derive(Debug, Args)]
pub(crate) struct CorpusArgs {
    /// Corpus file, or a directory holding `<split>.json`.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = "test")]
    pub split: Split,
    #[arg(long, value_enum, default_value = "schema")]
    pub format: CorpusFormat,
    /// Prefix for recording paths when importing the SpeechBSD layout.
    #[arg(long, default_value = "")]
    pub wav_prefix: String,
}

#[derive(Debug, Args)]
pub(crate) struct RunArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value = "bilingual")]
    pub mode: ContextMode,
    /// Context separator.
    #[arg(long, default_value = DEFAULT_SEPARATOR)]
    pub sep: String,
    /// Recognizer: config file or shorthand (gold-echo, noisy:RATE,
    /// command:CMD, http://URL).
    #[arg(long, default_value = "gold-echo")]
    pub asr: String,
    /// Translator: config file or shorthand (identity, dictionary:RULES,
    /// command:CMD, http://URL).
    #[arg(long, default_value = "identity")]
    pub mt: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dialogues processed concurrently. Does not change any output.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Metric {
    Bleu,
    Wer,
    Cer,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a corpus file against the schema.
    Validate {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Also reject texts containing this separator.
        #[arg(long, default_value = DEFAULT_SEPARATOR)]
        sep: String,
    },
    /// Scenario, sentence, speech-hour and gender counts.
    Stats {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        json: bool,
    },
    /// Derive the two cross-language dialogues of every scenario.
    Split {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render gold training pairs.
    MakePairs {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        mode: ContextMode,
        #[arg(long, default_value_t = DEFAULT_CONTEXT_WIDTH)]
        c: usize,
        #[arg(long, default_value = DEFAULT_SEPARATOR)]
        sep: String,
        /// Only this direction (none and mono modes; default: both).
        #[arg(long)]
        direction: Option<Direction>,
        /// Leave language tags out of the text files.
        #[arg(long)]
        no_tags: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cascaded recognition and translation with evaluation.
    Run {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = DEFAULT_CONTEXT_WIDTH)]
        c: usize,
    },
    /// Score a hypothesis file against a reference file.
    Score {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, value_enum, default_value = "bleu")]
        metric: Metric,
        /// BLEU tokenizer: 13a, char or none.
        #[arg(long, default_value = "13a")]
        tok: Tokenizer,
        #[arg(long)]
        json: bool,
    },
    /// Paired approximate randomization between two systems.
    Sigtest {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        hyp_a: PathBuf,
        #[arg(long)]
        hyp_b: PathBuf,
        #[arg(long, value_enum, default_value = "bleu")]
        metric: Metric,
        #[arg(long, default_value = "13a")]
        tok: Tokenizer,
        #[arg(long, default_value_t = DEFAULT_TRIALS as u64, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample zero-pronoun candidates and write an annotation sheet.
    ZpSample {
        /// System runs as NAME=RUN_DIR; the first run supplies references.
        #[arg(long = "run", required = true, value_parser = parse_named_run)]
        runs: Vec<(String, PathBuf)>,
        #[arg(long, default_value = "ja-en")]
        direction: Direction,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sheet to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Tally a filled annotation sheet.
    ZpIngest {
        #[arg(long)]
        sheet: PathBuf,
        /// Also print every sentence with its system outputs.
        #[arg(long)]
        render: bool,
        #[arg(long)]
        json: bool,
    },
    /// One run per context width, in `<out>/cNN`.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Widths as `A..B` (inclusive) or a single number.
        #[arg(long, default_value = "1..8", value_parser = parse_width_range)]
        c: RangeInclusive<usize>,
    },
}

fn parse_named_run(s: &str) -> Result<(String, PathBuf), String> {
    let (name, dir) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=RUN_DIR, got `{s}`"))?;
    if name.is_empty() || dir.is_empty() {
        return Err(format!("expected NAME=RUN_DIR, got `{s}`"));
    }
    Ok((name.to_string(), PathBuf::from(dir)))
}

pub(crate) fn parse_width_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("`{x}` is not a width"));
    let range = match s.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.trim_start_matches('='))?,
        None => {
            let c = parse(s)?;
            c..=c
        }
    };
    if range.is_empty() {
        return Err(format!("empty width range `{s}`"));
    }
    Ok(range)
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub(crate) struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl ToString) -> Self {
        Failure {
            code: EXIT_DATA,
            message: message.to_string(),
        }
    }

    pub fn backend(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_BACKEND,
            message: message.into(),
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::data(e)
    }
}

impl From<ContextError> for Failure {
    fn from(e: ContextError) -> Self {
        Failure::data(e)
    }
}

impl From<MetricsError> for Failure {
    fn from(e: MetricsError) -> Self {
        Failure::data(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Invalid(_) => Failure::usage(e.to_string()),
            ConfigError::Read { .. } => Failure::data(e),
        }
    }
}

impl From<CascadeError> for Failure {
    fn from(e: CascadeError) -> Self {
        match e {
            CascadeError::Backend(e) => e.into(),
            CascadeError::Config(m) => Failure::usage(m),
            other => Failure::data(other),
        }
    }
}

fn backend_config(arg: &str) -> Result<BackendConfig, Failure> {
    Ok(BackendConfig::from_arg(arg)?)
}

fn init_logging(verbose: u8) {
    let default = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default)).try_init();
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose);
    let result = match cli.command {
        Command::Validate { corpus, sep } => commands::validate(&corpus, &sep),
        Command::Stats { corpus, json } => commands::stats(&corpus, json),
        Command::Split { corpus, out } => commands::split(&corpus, &out),
        Command::MakePairs {
            corpus,
            mode,
            c,
            sep,
            direction,
            no_tags,
            out,
        } => commands::make_pairs(&corpus, mode, c, &sep, direction, !no_tags, &out),
        Command::Run { run, c } => commands::run(&run, c),
        Command::Score {
            hyp,
            reference,
            metric,
            tok,
            json,
        } => commands::score(&hyp, &reference, metric, tok, json),
        Command::Sigtest {
            reference,
            hyp_a,
            hyp_b,
            metric,
            tok,
            trials,
            seed,
        } => commands::sigtest(&reference, &hyp_a, &hyp_b, metric, tok, trials as usize, seed),
        Command::ZpSample {
            runs,
            direction,
            n,
            seed,
            out,
        } => commands::zp_sample(&runs, direction, n, seed, &out),
        Command::ZpIngest { sheet, render, json } => commands::zp_ingest(&sheet, render, json),
        Command::Sweep { run, c } => commands::sweep(&run, c),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
