/*
 * syntagraph C API: question-schema interaction graphs with syntactic edges,
 * a relation-aware attention encoder, and the relation-embedding decoupling
 * penalty, behind opaque handles and status codes.
 *
 * Conventions:
 *   - Functions returning stg_status set a thread-local message retrievable
 *     via stg_last_error() on failure. Out-parameters are untouched then.
 *   - Buffers returned through char** are NUL-terminated, heap-allocated and
 *     must be released with stg_buffer_free().
 *   - Handles are released with the matching *_free(); NULL is accepted.
 */

#ifndef SYNTAGRAPH_H
#define SYNTAGRAPH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stg_status {
  STG_OK = 0,
  STG_ERROR_VALIDATION = 1, /* well-formed input breaking an invariant */
  STG_ERROR_PARSE = 2,      /* malformed document bytes */
  STG_ERROR_NUMERIC = 3,    /* non-finite values in numeric code */
  STG_ERROR_ARGUMENT = 4,   /* bad handle, index or argument */
  STG_ERROR_INTERNAL = 5
} stg_status;

typedef struct stg_schema stg_schema;
typedef struct stg_question stg_question;
typedef struct stg_graph stg_graph;
typedef struct stg_params stg_params;

const char* stg_version(void);
const char* stg_last_error(void);
void stg_buffer_free(char* buffer);

/* ---- relation label vocabulary -------------------------------------- */

int32_t stg_relation_count(void);
const char* stg_relation_name(int32_t ordinal); /* NULL if out of range */
int32_t stg_relation_by_name(const char* name); /* -1 if unknown */
int32_t stg_relation_inverse(int32_t ordinal);  /* -1 if out of range */

/* ---- schema ----------------------------------------------------------- */

stg_status stg_schema_parse(const char* bytes, size_t length, stg_schema** out);
void stg_schema_free(stg_schema* schema);
int32_t stg_schema_table_count(const stg_schema* schema);
int32_t stg_schema_column_count(const stg_schema* schema);

/* ---- question + dependency parse -------------------------------------- */

stg_status stg_question_parse_conllu(const char* bytes, size_t length, stg_question** out);
void stg_question_free(stg_question* question);
int32_t stg_question_token_count(const stg_question* question);
/* Pointer owned by the handle; NULL if out of range. */
const char* stg_question_token_surface(const stg_question* question, int32_t index);

/* ---- interaction graph ------------------------------------------------- */

stg_status stg_graph_build(const stg_schema* schema, const stg_question* question,
                           stg_graph** out);
stg_status stg_graph_parse(const char* bytes, size_t length, stg_graph** out);
/* manifest_json: optional JSON object embedded under "manifest" (may be NULL). */
stg_status stg_graph_export(const stg_graph* graph, const char* manifest_json, char** out,
                            size_t* out_length);
void stg_graph_free(stg_graph* graph);
int32_t stg_graph_node_count(const stg_graph* graph);
int32_t stg_graph_node_kind(const stg_graph* graph, int32_t node); /* 0=question 1=table 2=column */
int32_t stg_graph_node_local_index(const stg_graph* graph, int32_t node);
/* Relation label ordinal at cell (i, j); -1 if out of range. */
int32_t stg_graph_relation(const stg_graph* graph, int32_t i, int32_t j);

/* ---- encoder parameters ------------------------------------------------ */

typedef struct stg_config {
  int32_t num_layers;
  int32_t num_heads;
  int32_t model_dim;
  int32_t ffn_dim;
  double dropout_rate;
  uint64_t seed;
} stg_config;

void stg_config_defaults(stg_config* config);

stg_status stg_params_init(const stg_config* config, stg_params** out);
stg_status stg_params_parse(const char* bytes, size_t length, stg_params** out);
stg_status stg_params_export(const stg_params* params, const char* manifest_json, char** out,
                             size_t* out_length);
void stg_params_free(stg_params* params);
stg_status stg_params_config(const stg_params* params, stg_config* out);

/* ---- encoding ------------------------------------------------------------ */

/* Final representations, row-major node_count x model_dim doubles. */
stg_status stg_encode(const stg_params* params, const stg_graph* graph, double* out_values,
                      size_t capacity);
stg_status stg_encode_export(const stg_params* params, const stg_graph* graph,
                             const char* manifest_json, char** out, size_t* out_length);

/* ---- gradient check -------------------------------------------------------- */

/* Compares analytic gradients of the surrogate loss against central
 * differences over every trainable tensor. `corrupt` != 0 perturbs one
 * analytic entry (negative control). Writes the max relative error. */
stg_status stg_grad_check(const stg_config* config, int32_t nodes, double lambda_dc,
                          int32_t probes_per_tensor, double step, int32_t corrupt,
                          double* out_max_rel_err);

/* ---- decoupling ---------------------------------------------------------- */

typedef struct stg_dc_report {
  double max_offdiag_abs;
  double mean_offdiag_abs;
} stg_dc_report;

/* Runs the two-arm decoupling experiment; writes the trajectory and both
 * cosine reports as CSV. Report out-parameters may be NULL. */
stg_status stg_dc_train(int32_t k, int32_t dim, int32_t steps, double learning_rate,
                        double lambda_dc, uint64_t seed, const char* manifest_json,
                        char** out_csv, size_t* out_length, stg_dc_report* out_with_dc,
                        stg_dc_report* out_without_dc);

/* Cosine similarity matrix of the checkpoint's stacked relation embeddings,
 * as CSV with a header row of relation label names. */
stg_status stg_sim_matrix(const stg_params* params, const char* manifest_json, char** out_csv,
                          size_t* out_length);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SYNTAGRAPH_H */
