#ifndef XLIFT_H
#define XLIFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum XliftStatus {
  XLIFT_STATUS_OK = 0,
  XLIFT_STATUS_NULL_ARGUMENT = 1,
  XLIFT_STATUS_INVALID_UTF8 = 2,
  XLIFT_STATUS_IO = 3,
  XLIFT_STATUS_FORMAT = 4,
  XLIFT_STATUS_INVALID_PARAM = 5,
  XLIFT_STATUS_DIMENSION = 6,
  XLIFT_STATUS_NOT_NORMALIZED = 7,
  XLIFT_STATUS_EMPTY_DICTIONARY = 8,
  XLIFT_STATUS_NOT_FOUND = 9,
  XLIFT_STATUS_FAILED = 10,
  XLIFT_STATUS_PANIC = 11,
} XliftStatus;

// Source-target translation pairs.
typedef struct XliftDictionary XliftDictionary;

// Word vectors loaded from a text file.
typedef struct XliftEmbeddings XliftEmbeddings;

// A `d x d` linear map between two embedding spaces.
typedef struct XliftMapping XliftMapping;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next call into this library on the same thread.
const char *xlift_last_error(void);

// Frees a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed already.
void xlift_string_free(char *s);

// Loads embeddings in word2vec text format.
//
// # Safety
// `path` must be a nul-terminated string and `out` a writable pointer.
enum XliftStatus xlift_embeddings_load(const char *path, struct XliftEmbeddings **out);

// # Safety
// `e` must be null or a handle from this library that has not been freed.
void xlift_embeddings_free(struct XliftEmbeddings *e);

// Number of words, or 0 for a null handle.
//
// # Safety
// `e` must be null or a live handle.
uintptr_t xlift_embeddings_len(const struct XliftEmbeddings *e);

// Vector dimension, or 0 for a null handle.
//
// # Safety
// `e` must be null or a live handle.
uintptr_t xlift_embeddings_dim(const struct XliftEmbeddings *e);

// Scales every row to unit length in place.
//
// # Safety
// `e` must be a live handle not used concurrently.
enum XliftStatus xlift_embeddings_normalize(struct XliftEmbeddings *e);

// Loads a whitespace-separated `source target` dictionary.
//
// # Safety
// `path` must be a nul-terminated string and `out` a writable pointer.
enum XliftStatus xlift_dictionary_load(const char *path, struct XliftDictionary **out);

// # Safety
// `d` must be null or a handle from this library that has not been freed.
void xlift_dictionary_free(struct XliftDictionary *d);

// Number of pairs, or 0 for a null handle.
//
// # Safety
// `d` must be null or a live handle.
uintptr_t xlift_dictionary_len(const struct XliftDictionary *d);

// Orthogonal map fitted on the dictionary pairs present in both spaces.
//
// # Safety
// All handles must be live and `out` writable.
enum XliftStatus xlift_procrustes(const struct XliftEmbeddings *x,
                                  const struct XliftEmbeddings *y,
                                  const struct XliftDictionary *dict,
                                  struct XliftMapping **out);

// The identity map of dimension `dim`.
//
// # Safety
// `out` must be writable.
enum XliftStatus xlift_mapping_identity(uintptr_t dim, struct XliftMapping **out);

// Loads a mapping saved as JSON.
//
// # Safety
// `path` must be a nul-terminated string and `out` writable.
enum XliftStatus xlift_mapping_load(const char *path, struct XliftMapping **out);

// # Safety
// `m` must be a live handle and `path` a nul-terminated string.
enum XliftStatus xlift_mapping_save(const struct XliftMapping *m, const char *path);

// # Safety
// `m` must be null or a handle from this library that has not been freed.
void xlift_mapping_free(struct XliftMapping *m);

// Dimension of the map, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
uintptr_t xlift_mapping_dim(const struct XliftMapping *m);

// Best translation of `word`. `csls_k = 0` selects cosine nearest neighbour,
// otherwise CSLS with that neighbourhood size. The string written to `out`
// is freed with [`xlift_string_free`].
//
// # Safety
// Handles must be live, `word` nul-terminated and `out` writable.
enum XliftStatus xlift_translate(const struct XliftMapping *m,
                                 const struct XliftEmbeddings *x,
                                 const struct XliftEmbeddings *y,
                                 const char *word,
                                 uint32_t csls_k,
                                 char **out);

// Translation accuracy at 1 and 5 over the dictionary's source words.
//
// # Safety
// Handles must be live and the output pointers writable.
enum XliftStatus xlift_eval_bli(const struct XliftMapping *m,
                                const struct XliftEmbeddings *x,
                                const struct XliftEmbeddings *y,
                                const struct XliftDictionary *gold,
                                uint32_t csls_k,
                                double *acc1,
                                double *acc5);

// Accuracy at 1 of translating every word as itself.
//
// # Safety
// `gold` must be live and `acc1` writable.
enum XliftStatus xlift_copy_baseline(const struct XliftDictionary *gold, double *acc1);

// Domain mismatch between two corpus files cut into blocks of
// `block_lines` lines, with a rank-`rank` topic space.
//
// # Safety
// Paths must be nul-terminated and `score` writable.
enum XliftStatus xlift_stdm(const char *path_a,
                            const char *path_b,
                            uintptr_t block_lines,
                            uintptr_t rank,
                            double *score);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XLIFT_H */
