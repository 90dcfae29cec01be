#include "syntagraph/syntagraph.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "decoupling.hpp"
#include "encoder.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "question.hpp"
#include "relations.hpp"
#include "schema.hpp"

using nlohmann::json;

struct stg_schema {
  syntagraph::Schema value;
};
struct stg_question {
  syntagraph::ParsedQuestion value;
};
struct stg_graph {
  syntagraph::InteractionGraph value;
};
struct stg_params {
  syntagraph::EncoderConfig config;
  syntagraph::EncoderParameters params;
  syntagraph::RelationEmbeddingTables tables;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
stg_status guarded(F&& body) {
  try {
    body();
    return STG_OK;
  } catch (const syntagraph::ParseError& e) {
    g_last_error = e.what();
    return STG_ERROR_PARSE;
  } catch (const syntagraph::ValidationError& e) {
    g_last_error = e.what();
    return STG_ERROR_VALIDATION;
  } catch (const syntagraph::NumericError& e) {
    g_last_error = e.what();
    return STG_ERROR_NUMERIC;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return STG_ERROR_ARGUMENT;
  } catch (const std::out_of_range& e) {
    g_last_error = e.what();
    return STG_ERROR_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return STG_ERROR_INTERNAL;
  }
}

stg_status bad_argument(const char* message) {
  g_last_error = message;
  return STG_ERROR_ARGUMENT;
}

stg_status copy_out(const std::string& text, char** out, size_t* out_length) {
  char* buffer = static_cast<char*>(std::malloc(text.size() + 1));
  if (buffer == nullptr) {
    g_last_error = "out of memory";
    return STG_ERROR_INTERNAL;
  }
  std::memcpy(buffer, text.data(), text.size());
  buffer[text.size()] = '\0';
  *out = buffer;
  if (out_length != nullptr) *out_length = text.size();
  return STG_OK;
}

// NULL manifest is allowed; anything else must be a JSON object.
bool parse_manifest(const char* manifest_json, json& out, stg_status& status) {
  if (manifest_json == nullptr) return true;
  try {
    out = json::parse(manifest_json);
  } catch (const json::parse_error& e) {
    g_last_error = std::string("manifest: ") + e.what();
    status = STG_ERROR_PARSE;
    return false;
  }
  if (!out.is_object()) {
    g_last_error = "manifest: expected a JSON object";
    status = STG_ERROR_PARSE;
    return false;
  }
  return true;
}

syntagraph::EncoderConfig to_config(const stg_config& c) {
  syntagraph::EncoderConfig config;
  config.num_layers = c.num_layers;
  config.num_heads = c.num_heads;
  config.model_dim = c.model_dim;
  config.ffn_dim = c.ffn_dim;
  config.dropout_rate = c.dropout_rate;
  config.seed = c.seed;
  return config;
}

}  // namespace

extern "C" {

const char* stg_version(void) { return "1.0.0"; }

const char* stg_last_error(void) { return g_last_error.c_str(); }

void stg_buffer_free(char* buffer) { std::free(buffer); }

int32_t stg_relation_count(void) { return syntagraph::kRelationLabelCount; }

const char* stg_relation_name(int32_t ordinal) {
  if (ordinal < 0 || ordinal >= syntagraph::kRelationLabelCount) return nullptr;
  return syntagraph::relation_name(static_cast<syntagraph::RelationLabel>(ordinal)).data();
}

int32_t stg_relation_by_name(const char* name) {
  if (name == nullptr) return -1;
  try {
    return static_cast<int32_t>(syntagraph::relation_from_name(name));
  } catch (const std::exception&) {
    return -1;
  }
}

int32_t stg_relation_inverse(int32_t ordinal) {
  if (ordinal < 0 || ordinal >= syntagraph::kRelationLabelCount) return -1;
  return static_cast<int32_t>(
      syntagraph::inverse_label(static_cast<syntagraph::RelationLabel>(ordinal)));
}

stg_status stg_schema_parse(const char* bytes, size_t length, stg_schema** out) {
  if (bytes == nullptr || out == nullptr) return bad_argument("stg_schema_parse: NULL argument");
  return guarded([&] {
    auto handle = std::make_unique<stg_schema>();
    handle->value = syntagraph::load_schema(std::string_view(bytes, length));
    *out = handle.release();
  });
}

void stg_schema_free(stg_schema* schema) { delete schema; }

int32_t stg_schema_table_count(const stg_schema* schema) {
  return schema == nullptr ? -1 : static_cast<int32_t>(schema->value.tables.size());
}

int32_t stg_schema_column_count(const stg_schema* schema) {
  return schema == nullptr ? -1 : static_cast<int32_t>(schema->value.columns.size());
}

stg_status stg_question_parse_conllu(const char* bytes, size_t length, stg_question** out) {
  if (bytes == nullptr || out == nullptr)
    return bad_argument("stg_question_parse_conllu: NULL argument");
  return guarded([&] {
    auto handle = std::make_unique<stg_question>();
    handle->value = syntagraph::load_conllu(std::string_view(bytes, length));
    *out = handle.release();
  });
}

void stg_question_free(stg_question* question) { delete question; }

int32_t stg_question_token_count(const stg_question* question) {
  return question == nullptr ? -1 : static_cast<int32_t>(question->value.tokens.size());
}

const char* stg_question_token_surface(const stg_question* question, int32_t index) {
  if (question == nullptr || index < 0 ||
      index >= static_cast<int32_t>(question->value.tokens.size()))
    return nullptr;
  return question->value.tokens[index].surface.c_str();
}

stg_status stg_graph_build(const stg_schema* schema, const stg_question* question,
                           stg_graph** out) {
  if (schema == nullptr || question == nullptr || out == nullptr)
    return bad_argument("stg_graph_build: NULL argument");
  return guarded([&] {
    auto handle = std::make_unique<stg_graph>();
    handle->value = syntagraph::build_graph(question->value.tokens, question->value.parse,
                                            schema->value);
    *out = handle.release();
  });
}

stg_status stg_graph_parse(const char* bytes, size_t length, stg_graph** out) {
  if (bytes == nullptr || out == nullptr) return bad_argument("stg_graph_parse: NULL argument");
  return guarded([&] {
    auto handle = std::make_unique<stg_graph>();
    handle->value = syntagraph::import_graph(std::string_view(bytes, length));
    *out = handle.release();
  });
}

stg_status stg_graph_export(const stg_graph* graph, const char* manifest_json, char** out,
                            size_t* out_length) {
  if (graph == nullptr || out == nullptr) return bad_argument("stg_graph_export: NULL argument");
  stg_status status = STG_OK;
  json manifest;
  if (!parse_manifest(manifest_json, manifest, status)) return status;
  return guarded([&] {
    const std::string text = syntagraph::export_graph(
        graph->value, manifest_json == nullptr ? nullptr : &manifest);
    status = copy_out(text, out, out_length);
    if (status != STG_OK) throw std::bad_alloc();
  });
}

void stg_graph_free(stg_graph* graph) { delete graph; }

int32_t stg_graph_node_count(const stg_graph* graph) {
  return graph == nullptr ? -1 : graph->value.node_count();
}

int32_t stg_graph_node_kind(const stg_graph* graph, int32_t node) {
  if (graph == nullptr || node < 0 || node >= graph->value.node_count()) return -1;
  return static_cast<int32_t>(graph->value.nodes[node].kind);
}

int32_t stg_graph_node_local_index(const stg_graph* graph, int32_t node) {
  if (graph == nullptr || node < 0 || node >= graph->value.node_count()) return -1;
  return graph->value.nodes[node].local_index;
}

int32_t stg_graph_relation(const stg_graph* graph, int32_t i, int32_t j) {
  if (graph == nullptr || i < 0 || j < 0 || i >= graph->value.node_count() ||
      j >= graph->value.node_count())
    return -1;
  return static_cast<int32_t>(graph->value.relations.at(i, j));
}

void stg_config_defaults(stg_config* config) {
  if (config == nullptr) return;
  const syntagraph::EncoderConfig defaults;
  config->num_layers = defaults.num_layers;
  config->num_heads = defaults.num_heads;
  config->model_dim = defaults.model_dim;
  config->ffn_dim = defaults.ffn_dim;
  config->dropout_rate = defaults.dropout_rate;
  config->seed = defaults.seed;
}

stg_status stg_params_init(const stg_config* config, stg_params** out) {
  if (config == nullptr || out == nullptr) return bad_argument("stg_params_init: NULL argument");
  return guarded([&] {
    auto handle = std::make_unique<stg_params>();
    handle->config = to_config(*config);
    auto [params, tables] = syntagraph::init_params(handle->config);
    handle->params = std::move(params);
    handle->tables = std::move(tables);
    *out = handle.release();
  });
}

stg_status stg_params_parse(const char* bytes, size_t length, stg_params** out) {
  if (bytes == nullptr || out == nullptr) return bad_argument("stg_params_parse: NULL argument");
  return guarded([&] {
    auto loaded = syntagraph::load_params(std::string_view(bytes, length));
    auto handle = std::make_unique<stg_params>();
    handle->config = loaded.config;
    handle->params = std::move(loaded.params);
    handle->tables = std::move(loaded.tables);
    *out = handle.release();
  });
}

stg_status stg_params_export(const stg_params* params, const char* manifest_json, char** out,
                             size_t* out_length) {
  if (params == nullptr || out == nullptr) return bad_argument("stg_params_export: NULL argument");
  stg_status status = STG_OK;
  json manifest;
  if (!parse_manifest(manifest_json, manifest, status)) return status;
  return guarded([&] {
    const std::string text = syntagraph::save_params(
        params->config, params->params, params->tables,
        manifest_json == nullptr ? nullptr : &manifest);
    status = copy_out(text, out, out_length);
    if (status != STG_OK) throw std::bad_alloc();
  });
}

void stg_params_free(stg_params* params) { delete params; }

stg_status stg_params_config(const stg_params* params, stg_config* out) {
  if (params == nullptr || out == nullptr) return bad_argument("stg_params_config: NULL argument");
  out->num_layers = params->config.num_layers;
  out->num_heads = params->config.num_heads;
  out->model_dim = params->config.model_dim;
  out->ffn_dim = params->config.ffn_dim;
  out->dropout_rate = params->config.dropout_rate;
  out->seed = params->config.seed;
  return STG_OK;
}

stg_status stg_encode(const stg_params* params, const stg_graph* graph, double* out_values,
                      size_t capacity) {
  if (params == nullptr || graph == nullptr || out_values == nullptr)
    return bad_argument("stg_encode: NULL argument");
  return guarded([&] {
    const syntagraph::Matrix x =
        syntagraph::embed_nodes(graph->value.flattened, params->config);
    const syntagraph::Matrix z = syntagraph::encode(graph->value.relations, x, params->params,
                                                    params->tables, params->config);
    if (capacity < z.data.size())
      throw std::invalid_argument("stg_encode: buffer holds " + std::to_string(capacity) +
                                  " doubles, need " + std::to_string(z.data.size()));
    std::memcpy(out_values, z.data.data(), z.data.size() * sizeof(double));
  });
}

stg_status stg_encode_export(const stg_params* params, const stg_graph* graph,
                             const char* manifest_json, char** out, size_t* out_length) {
  if (params == nullptr || graph == nullptr || out == nullptr)
    return bad_argument("stg_encode_export: NULL argument");
  stg_status status = STG_OK;
  json manifest;
  if (!parse_manifest(manifest_json, manifest, status)) return status;
  return guarded([&] {
    const syntagraph::Matrix x =
        syntagraph::embed_nodes(graph->value.flattened, params->config);
    const syntagraph::Matrix z = syntagraph::encode(graph->value.relations, x, params->params,
                                                    params->tables, params->config);
    const std::string text =
        syntagraph::export_encoding(z, manifest_json == nullptr ? nullptr : &manifest);
    status = copy_out(text, out, out_length);
    if (status != STG_OK) throw std::bad_alloc();
  });
}

stg_status stg_grad_check(const stg_config* config, int32_t nodes, double lambda_dc,
                          int32_t probes_per_tensor, double step, int32_t corrupt,
                          double* out_max_rel_err) {
  if (config == nullptr || out_max_rel_err == nullptr)
    return bad_argument("stg_grad_check: NULL argument");
  return guarded([&] {
    const syntagraph::GradCheckResult result = syntagraph::grad_check(
        to_config(*config), nodes, lambda_dc, probes_per_tensor, step, corrupt != 0);
    *out_max_rel_err = result.max_rel_err;
  });
}

stg_status stg_dc_train(int32_t k, int32_t dim, int32_t steps, double learning_rate,
                        double lambda_dc, uint64_t seed, const char* manifest_json,
                        char** out_csv, size_t* out_length, stg_dc_report* out_with_dc,
                        stg_dc_report* out_without_dc) {
  if (out_csv == nullptr) return bad_argument("stg_dc_train: NULL output buffer");
  stg_status status = STG_OK;
  json manifest;
  if (!parse_manifest(manifest_json, manifest, status)) return status;
  return guarded([&] {
    const syntagraph::DecouplingRun run =
        syntagraph::decoupling_experiment(k, dim, steps, learning_rate, lambda_dc, seed);
    const std::string text =
        syntagraph::decoupling_run_csv(run, manifest_json == nullptr ? nullptr : &manifest);
    if (out_with_dc != nullptr) {
      out_with_dc->max_offdiag_abs = run.with_dc.max_offdiag_abs;
      out_with_dc->mean_offdiag_abs = run.with_dc.mean_offdiag_abs;
    }
    if (out_without_dc != nullptr) {
      out_without_dc->max_offdiag_abs = run.without_dc.max_offdiag_abs;
      out_without_dc->mean_offdiag_abs = run.without_dc.mean_offdiag_abs;
    }
    status = copy_out(text, out_csv, out_length);
    if (status != STG_OK) throw std::bad_alloc();
  });
}

stg_status stg_sim_matrix(const stg_params* params, const char* manifest_json, char** out_csv,
                          size_t* out_length) {
  if (params == nullptr || out_csv == nullptr) return bad_argument("stg_sim_matrix: NULL argument");
  stg_status status = STG_OK;
  json manifest;
  if (!parse_manifest(manifest_json, manifest, status)) return status;
  return guarded([&] {
    const syntagraph::Matrix r = syntagraph::relation_embedding_matrix(params->tables);
    const syntagraph::SimilarityReport report = syntagraph::similarity_matrix(r);
    std::vector<std::string> names;
    for (int i = 0; i < syntagraph::kRelationLabelCount; ++i)
      names.emplace_back(syntagraph::relation_name(static_cast<syntagraph::RelationLabel>(i)));
    const std::string text = syntagraph::similarity_csv(
        report, names, manifest_json == nullptr ? nullptr : &manifest);
    status = copy_out(text, out_csv, out_length);
    if (status != STG_OK) throw std::bad_alloc();
  });
}

}  // extern "C"
