#ifndef SDTKIT_H
#define SDTKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SdtStatus {
  SDT_STATUS_OK = 0,
  SDT_STATUS_NULL_ARGUMENT = 1,
  SDT_STATUS_INVALID_UTF8 = 2,
  SDT_STATUS_INVALID_ARGUMENT = 3,
  SDT_STATUS_CORPUS = 4,
  SDT_STATUS_CONTEXT = 5,
  SDT_STATUS_METRICS = 6,
  SDT_STATUS_OUT_OF_RANGE = 7,
  SDT_STATUS_PANIC = 8,
} SdtStatus;

typedef enum SdtSplit {
  SDT_SPLIT_TRAIN = 0,
  SDT_SPLIT_DEV = 1,
  SDT_SPLIT_TEST = 2,
} SdtSplit;

typedef enum SdtContextMode {
  SDT_CONTEXT_MODE_NONE = 0,
  SDT_CONTEXT_MODE_MONO = 1,
  SDT_CONTEXT_MODE_BILINGUAL = 2,
} SdtContextMode;

typedef enum SdtLang {
  SDT_LANG_JA = 0,
  SDT_LANG_EN = 1,
} SdtLang;

/**
 * A loaded corpus split.
 */
typedef struct SdtCorpus SdtCorpus;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *sdt_last_error(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer obtained from this library that has not
 * been freed yet.
 */
void sdt_string_free(char *s);

/**
 * Library version as a static string.
 */
const char *sdt_version(void);

/**
 * Loads a corpus file, or `<dir>/<split>.json` when `path` is a directory.
 *
 * # Safety
 * `path` must be a valid C string and `out` a valid pointer.
 */
enum SdtStatus sdt_corpus_load(const char *path, enum SdtSplit split, struct SdtCorpus **out);

/**
 * # Safety
 * `corpus` must be NULL or a handle from `sdt_corpus_load` not yet freed.
 */
void sdt_corpus_free(struct SdtCorpus *corpus);

/**
 * Number of scenarios; 0 for NULL.
 *
 * # Safety
 * `corpus` must be NULL or a live handle.
 */
size_t sdt_corpus_scenario_count(const struct SdtCorpus *corpus);

/**
 * Number of utterances over all scenarios; 0 for NULL.
 *
 * # Safety
 * `corpus` must be NULL or a live handle.
 */
size_t sdt_corpus_sentence_count(const struct SdtCorpus *corpus);

/**
 * Gold model input for utterance `t` (1-based) of cross-language variant
 * `variant` (0 = A, 1 = B) of scenario `scenario` (0-based).
 *
 * # Safety
 * `corpus` must be a live handle, `sep` a valid C string and `out` a valid
 * pointer.
 */
enum SdtStatus sdt_corpus_gold_input(const struct SdtCorpus *corpus,
                                     size_t scenario,
                                     uint32_t variant,
                                     size_t t,
                                     enum SdtContextMode mode,
                                     size_t c,
                                     const char *sep,
                                     char **out);

/**
 * Joins `n_context` context segments and `current` with `sep`.
 *
 * # Safety
 * `context` must point to `n_context` valid C strings (it may be NULL when
 * `n_context` is 0); `current` and `sep` must be valid C strings and `out`
 * a valid pointer.
 */
enum SdtStatus sdt_render_input(const char *const *context,
                                size_t n_context,
                                const char *current,
                                const char *sep,
                                char **out);

/**
 * Last non-empty segment of a model output. Writes NULL to `out` when the
 * output has no non-empty segment.
 *
 * # Safety
 * `output` and `sep` must be valid C strings and `out` a valid pointer.
 */
enum SdtStatus sdt_extract_current(const char *output, const char *sep, char **out);

/**
 * Corpus BLEU over `n` segment pairs. `tokenizer` is "13a", "char" or
 * "none".
 *
 * # Safety
 * `hyps` and `refs` must each point to `n` valid C strings; `tokenizer`
 * must be a valid C string and `score` a valid pointer.
 */
enum SdtStatus sdt_bleu(const char *const *hyps,
                        const char *const *refs,
                        size_t n,
                        const char *tokenizer,
                        double *score);

/**
 * Corpus recognition error rate: WER for English, CER for Japanese.
 *
 * # Safety
 * `refs` and `hyps` must each point to `n` valid C strings and `rate` must
 * be a valid pointer.
 */
enum SdtStatus sdt_error_rate(const char *const *refs,
                              const char *const *hyps,
                              size_t n,
                              enum SdtLang lang,
                              double *rate);

/**
 * Paired approximate randomization on corpus BLEU between two systems.
 *
 * # Safety
 * `refs`, `hyps_a` and `hyps_b` must each point to `n` valid C strings;
 * `tokenizer` must be a valid C string and `p_value` a valid pointer.
 */
enum SdtStatus sdt_sigtest_bleu(const char *const *refs,
                                const char *const *hyps_a,
                                const char *const *hyps_b,
                                size_t n,
                                const char *tokenizer,
                                size_t trials,
                                uint64_t seed,
                                double *p_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SDTKIT_H */
