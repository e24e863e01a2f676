#ifndef SRG_SRG_H
#define SRG_SRG_H

/* C interface to libsrg. All handles are opaque; every call returns a
 * status code and srg_last_error() describes the most recent failure on
 * the calling thread. */

#include <stddef.h>
#include <stdint.h>

#if defined(SRG_BUILDING_LIBRARY)
#define SRG_API __attribute__((visibility("default")))
#else
#define SRG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srg_status {
  SRG_OK = 0,
  SRG_ERR_INVALID_ARGUMENT = 1,
  SRG_ERR_PARSE = 2,
  SRG_ERR_IO = 3,
  SRG_ERR_NUMERIC = 4,
  SRG_ERR_DIVERGED = 5,
  SRG_ERR_INTERNAL = 6
} srg_status;

typedef struct srg_dataset srg_dataset;
typedef struct srg_tree srg_tree;
typedef struct srg_config srg_config;

SRG_API const char* srg_version(void);
/* Message for the last failed call on this thread; "" if none. */
SRG_API const char* srg_last_error(void);

/* datasets */
SRG_API srg_status srg_dataset_load_libsvm(const char* path, srg_dataset** out);
SRG_API srg_status srg_dataset_parse_libsvm(const char* text, size_t len,
                                            srg_dataset** out);
SRG_API srg_status srg_dataset_synthetic_cauchy(size_t n, size_t d,
                                                uint64_t seed,
                                                srg_dataset** out);
/* zero_rows may be NULL */
SRG_API srg_status srg_dataset_normalize(srg_dataset* data, size_t* zero_rows);
SRG_API srg_status srg_dataset_shape(const srg_dataset* data, size_t* n,
                                     size_t* d);
SRG_API srg_status srg_dataset_save_libsvm(const srg_dataset* data,
                                           const char* path);
SRG_API void srg_dataset_free(srg_dataset* data);

/* sampling tree over non-negative keys; indices are 0-based, ranks 1-based
 * with rank 1 the largest key */
SRG_API srg_status srg_tree_create(const double* keys, size_t n, srg_tree** out);
SRG_API srg_status srg_tree_update(srg_tree* tree, size_t i, double key);
SRG_API srg_status srg_tree_rank(const srg_tree* tree, size_t i, size_t* rank);
SRG_API srg_status srg_tree_partial_sum(const srg_tree* tree, size_t i,
                                        double* sum);
SRG_API srg_status srg_tree_select_rank(const srg_tree* tree, size_t rank,
                                        size_t* index);
SRG_API srg_status srg_tree_select_sum(const srg_tree* tree, double s,
                                       size_t* index);
/* Draws from the restricted-simplex distribution with lower bound eps
 * using the uniform u in [0,1). probability may be NULL. */
SRG_API srg_status srg_tree_sample(const srg_tree* tree, double eps, double u,
                                   size_t* index, double* probability);
SRG_API void srg_tree_free(srg_tree* tree);

/* experiment runs */
SRG_API srg_status srg_config_create(srg_config** out);
SRG_API srg_status srg_config_set(srg_config* cfg, const char* key,
                                  const char* value);
/* key=value file, '#' comments */
SRG_API srg_status srg_config_load(srg_config* cfg, const char* path);
SRG_API void srg_config_free(srg_config* cfg);
/* Writes seed_<s>.csv and mean.csv. SRG_ERR_DIVERGED if any seed blew up;
 * its partial trace is still written. */
SRG_API srg_status srg_run(const srg_config* cfg);

/* Summary table for trace CSVs; *out must be released with
 * srg_string_free. Grid mismatch warnings are appended to the table. */
SRG_API srg_status srg_compare(const char* const* paths, size_t count,
                               char** out);
SRG_API srg_status srg_generate_synthetic(uint64_t seed, size_t n, size_t d,
                                          const char* path);
SRG_API void srg_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
