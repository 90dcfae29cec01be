// syntagraph command line: build question-schema interaction graphs, run the
// relational encoder, and drive the gradient / decoupling diagnostics.
//
// Talks to the core exclusively through the public C API. Exit codes are
// stable for CI: 0 success, 1 validation error, 2 parse or I/O error,
// 3 gradient check above threshold, 64 usage error.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "syntagraph/syntagraph.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitParse = 2;
constexpr int kExitGradCheck = 3;
constexpr int kExitUsage = 64;

constexpr double kGradCheckThreshold = 1e-4;

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("SYNTAGRAPH_LOG");
    if (env == nullptr) return 1;
    const std::string value(env);
    if (value == "debug" || value == "3") return 3;
    if (value == "info" || value == "2") return 2;
    if (value == "warn" || value == "1") return 1;
    if (value == "error" || value == "0") return 0;
    return 1;
  }();
  return level;
}

void log_info(const std::string& message) {
  if (log_level() >= 2) std::cerr << "syntagraph: " << message << "\n";
}

int exit_code_for(stg_status status) {
  switch (status) {
    case STG_OK: return kExitOk;
    case STG_ERROR_PARSE: return kExitParse;
    default: return kExitValidation;
  }
}

int fail(stg_status status) {
  std::cerr << "syntagraph: error: " << stg_last_error() << "\n";
  return exit_code_for(status);
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return true;
}

// "-" writes to stdout.
bool write_output(const std::string& path, const std::string& bytes) {
  if (path == "-") {
    std::cout << bytes;
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out << bytes;
  return static_cast<bool>(out);
}

int missing_file(const std::string& path) {
  std::cerr << "syntagraph: error: cannot read '" << path << "'\n";
  return kExitParse;
}

int unwritable_file(const std::string& path) {
  std::cerr << "syntagraph: error: cannot write '" << path << "'\n";
  return kExitParse;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Reproducibility header recorded into every output document: the command,
// its input paths, every user-set option, and the effective seed.
std::string build_manifest(const CLI::App& command, uint64_t seed,
                           const std::vector<std::pair<std::string, std::string>>& inputs) {
  json manifest;
  manifest["format_version"] = 1;
  manifest["command"] = command.get_name();
  json input_map = json::object();
  for (const auto& [key, value] : inputs) input_map[key] = value;
  manifest["inputs"] = std::move(input_map);
  json overrides = json::object();
  for (const CLI::Option* option : command.get_options()) {
    if (option->count() == 0 || option->get_lnames().empty()) continue;
    const std::string name = option->get_lnames().front();
    // --out names the artifact location, not the computation.
    if (name == "help" || name == "out") continue;
    std::string joined;
    for (const std::string& result : option->results()) {
      if (!joined.empty()) joined += ",";
      joined += result;
    }
    overrides[name] = joined;
  }
  manifest["overrides"] = std::move(overrides);
  manifest["seed"] = seed;
  return manifest.dump();
}

struct BufferOwner {
  char* data = nullptr;
  size_t length = 0;
  ~BufferOwner() { stg_buffer_free(data); }
  std::string str() const { return std::string(data, length); }
};

// Whitespace tokens of the question file must match the CoNLL-U surface
// forms; this catches mismatched parse/question pairs before graph assembly.
bool question_text_matches(const std::string& text, const stg_question* question,
                           std::string& why) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  std::string tok;
  while (in >> tok) tokens.push_back(tok);

  const int expected = stg_question_token_count(question);
  if (static_cast<int>(tokens.size()) != expected) {
    why = "question file has " + std::to_string(tokens.size()) + " tokens but the parse has " +
          std::to_string(expected);
    return false;
  }
  for (int i = 0; i < expected; ++i) {
    const char* surface = stg_question_token_surface(question, i);
    if (tokens[i] != surface) {
      why = "question token " + std::to_string(i) + " is '" + tokens[i] +
            "' but the parse has '" + surface + "'";
      return false;
    }
  }
  return true;
}

int run_build_graph(const CLI::App& cmd, const std::string& schema_path,
                    const std::string& parse_path, const std::string& question_path,
                    const std::string& out_path, uint64_t seed) {
  std::string schema_bytes, parse_bytes, question_bytes;
  if (!read_file(schema_path, schema_bytes)) return missing_file(schema_path);
  if (!read_file(parse_path, parse_bytes)) return missing_file(parse_path);
  if (!read_file(question_path, question_bytes)) return missing_file(question_path);

  stg_schema* schema = nullptr;
  stg_status status = stg_schema_parse(schema_bytes.data(), schema_bytes.size(), &schema);
  if (status != STG_OK) return fail(status);
  std::unique_ptr<stg_schema, decltype(&stg_schema_free)> schema_owner(schema, stg_schema_free);
  log_info("loaded schema with " + std::to_string(stg_schema_table_count(schema)) + " tables, " +
           std::to_string(stg_schema_column_count(schema)) + " columns");

  stg_question* question = nullptr;
  status = stg_question_parse_conllu(parse_bytes.data(), parse_bytes.size(), &question);
  if (status != STG_OK) return fail(status);
  std::unique_ptr<stg_question, decltype(&stg_question_free)> question_owner(question,
                                                                             stg_question_free);
  log_info("loaded parse with " + std::to_string(stg_question_token_count(question)) + " tokens");

  std::string why;
  if (!question_text_matches(question_bytes, question, why)) {
    std::cerr << "syntagraph: error: " << why << "\n";
    return kExitValidation;
  }

  stg_graph* graph = nullptr;
  status = stg_graph_build(schema, question, &graph);
  if (status != STG_OK) return fail(status);
  std::unique_ptr<stg_graph, decltype(&stg_graph_free)> graph_owner(graph, stg_graph_free);

  const std::string manifest = build_manifest(
      cmd, seed, {{"schema", schema_path}, {"parse", parse_path}, {"question", question_path}});
  BufferOwner buffer;
  status = stg_graph_export(graph, manifest.c_str(), &buffer.data, &buffer.length);
  if (status != STG_OK) return fail(status);
  if (!write_output(out_path, buffer.str())) return unwritable_file(out_path);
  log_info("wrote graph with " + std::to_string(stg_graph_node_count(graph)) + " nodes to " +
           out_path);
  return kExitOk;
}

int load_params_file(const std::string& path, stg_params** out) {
  std::string bytes;
  if (!read_file(path, bytes)) return missing_file(path);
  const stg_status status = stg_params_parse(bytes.data(), bytes.size(), out);
  if (status != STG_OK) return fail(status);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"question-schema interaction graphs with a relation-aware encoder"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; command-line flags win");

  // build-graph
  std::string schema_path, parse_path, question_path;
  std::string graph_out = "-";
  uint64_t build_seed = 0;
  CLI::App* build = app.add_subcommand("build-graph", "assemble the interaction graph");
  build->add_option("--schema", schema_path, "schema JSON path")->required();
  build->add_option("--parse", parse_path, "CoNLL-U dependency parse path")->required();
  build->add_option("--question", question_path, "question text path")->required();
  build->add_option("--out", graph_out, "output path ('-' for stdout)")->required();
  build->add_option("--seed", build_seed, "seed recorded in the manifest");

  // init-params
  stg_config init_config;
  stg_config_defaults(&init_config);
  std::string params_out = "-";
  CLI::App* init = app.add_subcommand("init-params", "create a fresh parameter checkpoint");
  init->add_option("--layers", init_config.num_layers, "attention layers");
  init->add_option("--heads", init_config.num_heads, "attention heads");
  init->add_option("--model-dim", init_config.model_dim, "model width");
  init->add_option("--ffn-dim", init_config.ffn_dim, "feed-forward inner width");
  init->add_option("--dropout", init_config.dropout_rate, "training-mode dropout rate");
  init->add_option("--seed", init_config.seed, "initialization seed");
  init->add_option("--out", params_out, "output path ('-' for stdout)")->required();

  // encode
  std::string encode_graph_path, encode_params_path;
  std::string encode_out = "-";
  uint64_t encode_seed = 0;
  CLI::App* enc = app.add_subcommand("encode", "run the encoder over a graph document");
  enc->add_option("--graph", encode_graph_path, "graph document path")->required();
  enc->add_option("--params", encode_params_path, "parameter checkpoint path")->required();
  enc->add_option("--out", encode_out, "output path ('-' for stdout)")->required();
  enc->add_option("--seed", encode_seed, "seed recorded in the manifest");

  // grad-check
  stg_config check_config;
  stg_config_defaults(&check_config);
  check_config.num_layers = 2;
  check_config.num_heads = 2;
  check_config.model_dim = 16;
  check_config.ffn_dim = 32;
  int check_nodes = 12;
  double check_lambda = 0.01;
  int check_probes = 20;
  double check_step = 1e-5;
  bool check_corrupt = false;
  CLI::App* check = app.add_subcommand(
      "grad-check", "verify analytic gradients against central differences");
  check->add_option("--seed", check_config.seed, "instance and init seed");
  check->add_option("--layers", check_config.num_layers, "attention layers");
  check->add_option("--heads", check_config.num_heads, "attention heads");
  check->add_option("--model-dim", check_config.model_dim, "model width");
  check->add_option("--ffn-dim", check_config.ffn_dim, "feed-forward inner width");
  check->add_option("--nodes", check_nodes, "synthetic graph size");
  check->add_option("--lambda", check_lambda, "decoupling loss weight");
  check->add_option("--probes", check_probes, "coordinates probed per tensor");
  check->add_option("--step", check_step, "central-difference step");
  check->add_flag("--corrupt-gradient", check_corrupt,
                  "perturb one analytic entry (negative control for the checker)");

  // dc-train
  int dc_k = 32, dc_d = 64, dc_steps = 2000;
  double dc_lr = 0.1, dc_lambda = 1.0;
  uint64_t dc_seed = 0;
  std::string dc_out = "-";
  CLI::App* dc = app.add_subcommand("dc-train", "run the two-arm decoupling experiment");
  dc->add_option("--k", dc_k, "number of relation embeddings");
  dc->add_option("--d", dc_d, "embedding dimension");
  dc->add_option("--steps", dc_steps, "gradient descent steps");
  dc->add_option("--lr", dc_lr, "learning rate");
  dc->add_option("--lambda", dc_lambda, "decoupling loss weight");
  dc->add_option("--seed", dc_seed, "initialization seed");
  dc->add_option("--out", dc_out, "trajectory/report CSV path ('-' for stdout)")->required();

  // sim-matrix
  std::string sim_params_path;
  std::string sim_out = "-";
  uint64_t sim_seed = 0;
  CLI::App* sim = app.add_subcommand(
      "sim-matrix", "cosine similarity of a checkpoint's relation embeddings");
  sim->add_option("--params", sim_params_path, "parameter checkpoint path")->required();
  sim->add_option("--out", sim_out, "CSV output path ('-' for stdout)")->required();
  sim->add_option("--seed", sim_seed, "seed recorded in the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (build->parsed())
    return run_build_graph(*build, schema_path, parse_path, question_path, graph_out, build_seed);

  if (init->parsed()) {
    stg_params* params = nullptr;
    const stg_status status = stg_params_init(&init_config, &params);
    if (status != STG_OK) return fail(status);
    std::unique_ptr<stg_params, decltype(&stg_params_free)> owner(params, stg_params_free);
    const std::string manifest = build_manifest(*init, init_config.seed, {});
    BufferOwner buffer;
    const stg_status export_status =
        stg_params_export(params, manifest.c_str(), &buffer.data, &buffer.length);
    if (export_status != STG_OK) return fail(export_status);
    if (!write_output(params_out, buffer.str())) return unwritable_file(params_out);
    log_info("wrote checkpoint to " + params_out);
    return kExitOk;
  }

  if (enc->parsed()) {
    std::string graph_bytes;
    if (!read_file(encode_graph_path, graph_bytes)) return missing_file(encode_graph_path);
    stg_graph* graph = nullptr;
    stg_status status = stg_graph_parse(graph_bytes.data(), graph_bytes.size(), &graph);
    if (status != STG_OK) return fail(status);
    std::unique_ptr<stg_graph, decltype(&stg_graph_free)> graph_owner(graph, stg_graph_free);

    stg_params* params = nullptr;
    const int load_code = load_params_file(encode_params_path, &params);
    if (load_code != kExitOk) return load_code;
    std::unique_ptr<stg_params, decltype(&stg_params_free)> params_owner(params, stg_params_free);

    const std::string manifest = build_manifest(
        *enc, encode_seed, {{"graph", encode_graph_path}, {"params", encode_params_path}});
    BufferOwner buffer;
    status = stg_encode_export(params, graph, manifest.c_str(), &buffer.data, &buffer.length);
    if (status != STG_OK) return fail(status);
    if (!write_output(encode_out, buffer.str())) return unwritable_file(encode_out);
    log_info("encoded " + std::to_string(stg_graph_node_count(graph)) + " nodes to " + encode_out);
    return kExitOk;
  }

  if (check->parsed()) {
    double max_rel_err = 0.0;
    const stg_status status =
        stg_grad_check(&check_config, check_nodes, check_lambda, check_probes, check_step,
                       check_corrupt ? 1 : 0, &max_rel_err);
    if (status != STG_OK) return fail(status);
    std::cout << format_double(max_rel_err) << "\n";
    if (max_rel_err < kGradCheckThreshold) {
      log_info("gradient check passed: max relative error " + format_double(max_rel_err) +
               " < " + format_double(kGradCheckThreshold));
      return kExitOk;
    }
    std::cerr << "syntagraph: gradient check FAILED: max relative error "
              << format_double(max_rel_err) << " >= " << format_double(kGradCheckThreshold)
              << "\n";
    return kExitGradCheck;
  }

  if (dc->parsed()) {
    const std::string manifest = build_manifest(*dc, dc_seed, {});
    BufferOwner buffer;
    stg_dc_report with_dc{}, without_dc{};
    const stg_status status =
        stg_dc_train(dc_k, dc_d, dc_steps, dc_lr, dc_lambda, dc_seed, manifest.c_str(),
                     &buffer.data, &buffer.length, &with_dc, &without_dc);
    if (status != STG_OK) return fail(status);
    if (!write_output(dc_out, buffer.str())) return unwritable_file(dc_out);
    log_info("with-DC max |cos| " + format_double(with_dc.max_offdiag_abs) +
             ", without-DC max |cos| " + format_double(without_dc.max_offdiag_abs));
    return kExitOk;
  }

  if (sim->parsed()) {
    stg_params* params = nullptr;
    const int load_code = load_params_file(sim_params_path, &params);
    if (load_code != kExitOk) return load_code;
    std::unique_ptr<stg_params, decltype(&stg_params_free)> owner(params, stg_params_free);
    const std::string manifest = build_manifest(*sim, sim_seed, {{"params", sim_params_path}});
    BufferOwner buffer;
    const stg_status status =
        stg_sim_matrix(params, manifest.c_str(), &buffer.data, &buffer.length);
    if (status != STG_OK) return fail(status);
    if (!write_output(sim_out, buffer.str())) return unwritable_file(sim_out);
    return kExitOk;
  }

  return kExitUsage;
}
