//! Training-pair rendering and the parallel-file emitter.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    bilingual_context_source, bilingual_context_target, monolingual_context, render_input, ContextError,
    ContextMode, ContextWindow, GoldOnly, TextPolicy,
};
use crate::corpus::{assign_languages, CrossLanguageDialogue, Scenario, Variant};
use crate::lang::Direction;

/// One rendered source/target pair. Language tags are metadata; the emitter
/// decides whether they end up in the text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationUnit {
    pub scenario_id: String,
    pub variant: Variant,
    pub current_t: usize,
    pub mode: ContextMode,
    /// Direction of the current utterance.
    pub direction: Direction,
    pub src_tag: String,
    pub tgt_tag: String,
    pub context_len: usize,
    pub source_text: String,
    pub target_text: String,
}

/// Renders gold training pairs for one cross-language dialogue.
///
/// `none` and `mono` produce one unit per turn spoken in `direction`'s source
/// language and require a direction; `bilingual` produces one unit per turn,
/// each tagged with its own direction.
pub fn build_training_pairs(
    s: &Scenario,
    d: &CrossLanguageDialogue,
    mode: ContextMode,
    c: usize,
    direction: Option<Direction>,
    sep: &str,
) -> Result<Vec<TranslationUnit>, ContextError> {
    let annotated = assign_languages(d, s)?;
    let direction_filter = match mode {
        ContextMode::Bilingual => None,
        _ => Some(direction.ok_or(ContextError::MissingDirection(mode))?),
    };
    let mut units = Vec::new();
    for turn in &annotated.turns {
        if direction_filter.is_some_and(|dir| dir.src() != turn.spoken) {
            continue;
        }
        let dir = turn.direction();
        let (src_ctx, tgt_ctx) = match mode {
            ContextMode::None => (ContextWindow::empty(), ContextWindow::empty()),
            ContextMode::Mono => (
                monolingual_context(&annotated, turn.t, c, dir.src(), TextPolicy::Gold, &GoldOnly)?,
                monolingual_context(&annotated, turn.t, c, dir.tgt(), TextPolicy::Gold, &GoldOnly)?,
            ),
            ContextMode::Bilingual => (
                bilingual_context_source(&annotated, turn.t, c, TextPolicy::Gold, &GoldOnly)?,
                bilingual_context_target(&annotated, turn.t, c)?,
            ),
        };
        units.push(TranslationUnit {
            scenario_id: s.id.clone(),
            variant: d.variant,
            current_t: turn.t,
            mode,
            direction: dir,
            src_tag: dir.src().mt_tag().to_string(),
            tgt_tag: dir.tgt().mt_tag().to_string(),
            context_len: src_ctx.len(),
            source_text: render_input(&src_ctx, turn.gold.get(dir.src()), sep)?,
            target_text: render_input(&tgt_ctx, turn.gold.get(dir.tgt()), sep)?,
        });
    }
    Ok(units)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairFiles {
    pub source: PathBuf,
    pub target: PathBuf,
    pub meta: PathBuf,
}

fn one_line(text: &str) -> String {
    text.replace(['\r', '\n'], " ")
}

/// Writes `<stem>.src`, `<stem>.tgt` (one unit per line) and a tab-separated
/// `<stem>.meta.tsv` sidecar with the tag columns. With `append_tags`, each
/// side additionally ends with its language tag after a space.
pub fn write_training_pairs(
    units: &[TranslationUnit],
    dir: &Path,
    stem: &str,
    append_tags: bool,
) -> Result<PairFiles, ContextError> {
    let files = PairFiles {
        source: dir.join(format!("{stem}.src")),
        target: dir.join(format!("{stem}.tgt")),
        meta: dir.join(format!("{stem}.meta.tsv")),
    };
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ContextError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;

    let mut src = Vec::new();
    let mut tgt = Vec::new();
    let mut meta = Vec::new();
    writeln!(meta, "scenario_id\tvariant\tt\tdirection\tsrc_tag\ttgt_tag\tcontext_len").unwrap();
    for u in units {
        let (s, t) = (one_line(&u.source_text), one_line(&u.target_text));
        if append_tags {
            writeln!(src, "{s} {}", u.src_tag).unwrap();
            writeln!(tgt, "{t} {}", u.tgt_tag).unwrap();
        } else {
            writeln!(src, "{s}").unwrap();
            writeln!(tgt, "{t}").unwrap();
        }
        writeln!(
            meta,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            u.scenario_id, u.variant, u.current_t, u.direction, u.src_tag, u.tgt_tag, u.context_len
        )
        .unwrap();
    }
    fs::write(&files.source, src).map_err(io(&files.source))?;
    fs::write(&files.target, tgt).map_err(io(&files.target))?;
    fs::write(&files.meta, meta).map_err(io(&files.meta))?;
    Ok(files)
}
