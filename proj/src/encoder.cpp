#include "encoder.hpp"

#include <cmath>
#include <stdexcept>

#include "decoupling.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "tape.hpp"

namespace syntagraph {

using nlohmann::json;

void validate_config(const EncoderConfig& config) {
  if (config.num_layers < 0)
    throw ValidationError("num_layers must be >= 0, got " + std::to_string(config.num_layers));
  if (config.num_heads < 1 || config.model_dim < 1 || config.ffn_dim < 1)
    throw ValidationError("num_heads, model_dim and ffn_dim must be positive");
  if (config.model_dim % config.num_heads != 0)
    throw ValidationError("model_dim " + std::to_string(config.model_dim) +
                          " is not divisible by num_heads " + std::to_string(config.num_heads));
  if (!(config.dropout_rate >= 0.0 && config.dropout_rate < 1.0))
    throw ValidationError("dropout_rate must lie in [0, 1)");
}

namespace {

Matrix glorot_uniform(DetRng& rng, int rows, int cols) {
  const double a = std::sqrt(6.0 / (rows + cols));
  Matrix m(rows, cols);
  for (double& v : m.data) v = rng.uniform(-a, a);
  return m;
}

Matrix constant_row(int cols, double value) {
  Matrix m(1, cols);
  for (double& v : m.data) v = value;
  return m;
}

constexpr double kLayerNormEps = 1e-5;

}  // namespace

std::pair<EncoderParameters, RelationEmbeddingTables> init_params(const EncoderConfig& config) {
  validate_config(config);
  DetRng rng(config.seed);
  const int d = config.model_dim;
  const int dh = config.head_dim();

  EncoderParameters params;
  params.layers.resize(config.num_layers);
  for (LayerParams& layer : params.layers) {
    for (int h = 0; h < config.num_heads; ++h) {
      layer.w_query.push_back(glorot_uniform(rng, d, dh));
      layer.w_key.push_back(glorot_uniform(rng, d, dh));
      layer.w_value.push_back(glorot_uniform(rng, d, dh));
    }
    layer.w_out = glorot_uniform(rng, d, d);
    layer.ffn_w1 = glorot_uniform(rng, d, config.ffn_dim);
    layer.ffn_b1 = constant_row(config.ffn_dim, 0.0);
    layer.ffn_w2 = glorot_uniform(rng, config.ffn_dim, d);
    layer.ffn_b2 = constant_row(d, 0.0);
    layer.ln1_gain = constant_row(d, 1.0);
    layer.ln1_bias = constant_row(d, 0.0);
    layer.ln2_gain = constant_row(d, 1.0);
    layer.ln2_bias = constant_row(d, 0.0);
  }

  RelationEmbeddingTables tables;
  tables.key_table = Matrix(kRelationLabelCount, dh);
  tables.value_table = Matrix(kRelationLabelCount, dh);
  for (double& v : tables.key_table.data) v = rng.uniform(-0.1, 0.1);
  for (double& v : tables.value_table.data) v = rng.uniform(-0.1, 0.1);
  return {std::move(params), std::move(tables)};
}

Matrix relation_embedding_matrix(const RelationEmbeddingTables& tables) {
  return stack_tables(tables.key_table, tables.value_table);
}

Matrix item_vectors(const FlattenedSequence& flattened, const EncoderConfig& config) {
  Matrix out(static_cast<int>(flattened.items.size()), config.model_dim);
  for (size_t i = 0; i < flattened.items.size(); ++i) {
    // Seed depends on the item text alone (plus the config seed), so equal
    // strings embed identically wherever they occur.
    DetRng rng(fnv1a64(flattened.items[i].text) ^ (config.seed * 0x9e3779b97f4a7c15ULL));
    for (int d = 0; d < config.model_dim; ++d)
      out(static_cast<int>(i), d) = rng.uniform(-0.5, 0.5);
  }
  return out;
}

Matrix embed_nodes(const FlattenedSequence& flattened, const EncoderConfig& config) {
  const Matrix items = item_vectors(flattened, config);
  Matrix out(static_cast<int>(flattened.node_spans.size()), config.model_dim);
  for (size_t node = 0; node < flattened.node_spans.size(); ++node) {
    const ItemSpan& span = flattened.node_spans[node];
    if (span.count < 1)
      throw ValidationError("node " + std::to_string(node) + " has an empty item span");
    for (int d = 0; d < config.model_dim; ++d) {
      double acc = 0.0;
      for (int k = 0; k < span.count; ++k) acc += items(span.begin + k, d);
      out(static_cast<int>(node), d) = acc / span.count;
    }
  }
  return out;
}

namespace {

struct LayerVars {
  std::vector<ad::Tape::Var> w_query, w_key, w_value;
  ad::Tape::Var w_out, ffn_w1, ffn_b1, ffn_w2, ffn_b2;
  ad::Tape::Var ln1_gain, ln1_bias, ln2_gain, ln2_bias;
};

struct ModelVars {
  ad::Tape tape;
  ad::Tape::Var x;
  std::vector<LayerVars> layers;
  ad::Tape::Var key_table, value_table;
  ad::Tape::Var out;
};

Matrix dropout_mask(DetRng& rng, int rows, int cols, double rate) {
  Matrix mask(rows, cols);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (double& v : mask.data) v = rng.uniform01() < rate ? 0.0 : keep_scale;
  return mask;
}

// Wires the forward computation for the first `layers_to_run` layers onto a
// fresh tape. Dropout masks are sampled only in training mode.
void build_model(ModelVars& mv, const Dense<RelationLabel>& labels, const Matrix& x,
                 const EncoderParameters& params, const RelationEmbeddingTables& tables,
                 const EncoderConfig& config, int layers_to_run, bool training) {
  if (x.cols != config.model_dim)
    throw ValidationError("node embeddings have width " + std::to_string(x.cols) +
                          " but model_dim is " + std::to_string(config.model_dim));
  if (labels.rows() != x.rows || labels.cols() != x.rows)
    throw ValidationError("relation matrix is " + std::to_string(labels.rows()) + "x" +
                          std::to_string(labels.cols()) + " for " + std::to_string(x.rows) +
                          " nodes");
  if (layers_to_run > static_cast<int>(params.layers.size()))
    throw ValidationError("requested " + std::to_string(layers_to_run) + " layers but only " +
                          std::to_string(params.layers.size()) + " are parameterized");
  if (tables.key_table.rows != kRelationLabelCount ||
      tables.value_table.rows != kRelationLabelCount)
    throw ValidationError("relation tables must have one row per relation label");

  if (layers_to_run > 0 && params.layers[0].w_query.at(0).rows != x.cols)
    throw ValidationError("parameters expect model_dim " +
                          std::to_string(params.layers[0].w_query[0].rows) +
                          " but node embeddings have width " + std::to_string(x.cols));

  ad::Tape& tape = mv.tape;
  mv.x = tape.input(x);
  mv.key_table = tape.input(tables.key_table);
  mv.value_table = tape.input(tables.value_table);

  DetRng dropout_rng(config.seed ^ 0xd50fd50fd50fd50fULL);
  const int n = x.rows;

  ad::Tape::Var current = mv.x;
  for (int l = 0; l < layers_to_run; ++l) {
    const LayerParams& lp = params.layers[l];
    LayerVars lv;
    std::vector<ad::Tape::Var> heads;
    for (int h = 0; h < config.num_heads; ++h) {
      const double scale = 1.0 / std::sqrt(static_cast<double>(lp.w_query[h].cols));
      lv.w_query.push_back(tape.input(lp.w_query[h]));
      lv.w_key.push_back(tape.input(lp.w_key[h]));
      lv.w_value.push_back(tape.input(lp.w_value[h]));
      const auto q = tape.matmul(current, lv.w_query[h]);
      const auto k = tape.matmul(current, lv.w_key[h]);
      const auto v = tape.matmul(current, lv.w_value[h]);
      const auto scores = tape.relation_scores(q, k, mv.key_table, &labels, scale);
      const auto alpha = tape.softmax_rows(scores);
      heads.push_back(tape.relation_values(alpha, v, mv.value_table, &labels));
    }
    lv.w_out = tape.input(lp.w_out);
    auto attn = tape.matmul(tape.concat_cols(heads), lv.w_out);
    if (training && config.dropout_rate > 0.0)
      attn = tape.mul_elements(
          attn, dropout_mask(dropout_rng, n, config.model_dim, config.dropout_rate));

    lv.ln1_gain = tape.input(lp.ln1_gain);
    lv.ln1_bias = tape.input(lp.ln1_bias);
    const auto normed1 =
        tape.layer_norm(tape.add(current, attn), lv.ln1_gain, lv.ln1_bias, kLayerNormEps);

    lv.ffn_w1 = tape.input(lp.ffn_w1);
    lv.ffn_b1 = tape.input(lp.ffn_b1);
    lv.ffn_w2 = tape.input(lp.ffn_w2);
    lv.ffn_b2 = tape.input(lp.ffn_b2);
    auto ffn = tape.relu(tape.add_row(tape.matmul(normed1, lv.ffn_w1), lv.ffn_b1));
    ffn = tape.add_row(tape.matmul(ffn, lv.ffn_w2), lv.ffn_b2);
    if (training && config.dropout_rate > 0.0)
      ffn = tape.mul_elements(
          ffn, dropout_mask(dropout_rng, n, config.model_dim, config.dropout_rate));

    lv.ln2_gain = tape.input(lp.ln2_gain);
    lv.ln2_bias = tape.input(lp.ln2_bias);
    current = tape.layer_norm(tape.add(normed1, ffn), lv.ln2_gain, lv.ln2_bias, kLayerNormEps);

    mv.layers.push_back(std::move(lv));
  }
  mv.out = current;
}

}  // namespace

Matrix attention_scores(const Matrix& x, const Dense<RelationLabel>& labels,
                        const EncoderParameters& params, const RelationEmbeddingTables& tables,
                        int layer, int head) {
  if (layer < 0 || layer >= static_cast<int>(params.layers.size()))
    throw std::out_of_range("layer " + std::to_string(layer) + " out of range");
  const LayerParams& lp = params.layers[layer];
  if (head < 0 || head >= static_cast<int>(lp.w_query.size()))
    throw std::out_of_range("head " + std::to_string(head) + " out of range");
  if (x.cols != lp.w_query[head].rows)
    throw ValidationError("node embeddings have width " + std::to_string(x.cols) +
                          " but w_query expects " + std::to_string(lp.w_query[head].rows));
  if (labels.rows() != x.rows || labels.cols() != x.rows)
    throw ValidationError("relation matrix shape does not match node count");

  ad::Tape tape;
  const auto xv = tape.input(x);
  const auto q = tape.matmul(xv, tape.input(lp.w_query[head]));
  const auto k = tape.matmul(xv, tape.input(lp.w_key[head]));
  const double scale = 1.0 / std::sqrt(static_cast<double>(lp.w_query[head].cols));
  const auto scores = tape.relation_scores(q, k, tape.input(tables.key_table), &labels, scale);
  return tape.value(scores);
}

Matrix rgat_layer(const Matrix& x, const Dense<RelationLabel>& labels,
                  const EncoderParameters& params, const RelationEmbeddingTables& tables,
                  int layer) {
  if (layer < 0 || layer >= static_cast<int>(params.layers.size()))
    throw std::out_of_range("layer " + std::to_string(layer) + " out of range");

  EncoderConfig config;
  config.num_layers = static_cast<int>(params.layers.size());
  config.num_heads = static_cast<int>(params.layers[layer].w_query.size());
  config.model_dim = x.cols;
  config.ffn_dim = params.layers[layer].ffn_w1.cols;
  config.dropout_rate = 0.0;

  // Single-layer forward starting at `layer`.
  EncoderParameters view;
  view.layers.push_back(params.layers[layer]);
  ModelVars mv;
  build_model(mv, labels, x, view, tables, config, 1, false);
  Matrix out = mv.tape.value(mv.out);
  if (!all_finite(out)) throw NumericError("rgat_layer produced non-finite values");
  return out;
}

Matrix encode(const Dense<RelationLabel>& labels, const Matrix& x,
              const EncoderParameters& params, const RelationEmbeddingTables& tables,
              const EncoderConfig& config, bool training) {
  validate_config(config);
  ModelVars mv;
  build_model(mv, labels, x, params, tables, config, config.num_layers, training);
  Matrix out = mv.tape.value(mv.out);
  if (!all_finite(out)) throw NumericError("encode produced non-finite values");
  return out;
}

namespace {

ad::Tape::Var loss_node(ModelVars& mv, double lambda_dc) {
  auto loss = mv.tape.mean_row_sq(mv.out);
  if (lambda_dc != 0.0) {
    const auto penalty = mv.tape.decoupling_penalty(mv.key_table, mv.value_table);
    loss = mv.tape.add_scaled(loss, penalty, lambda_dc);
  }
  return loss;
}

}  // namespace

double forward_loss(const Dense<RelationLabel>& labels, const Matrix& x,
                    const EncoderParameters& params, const RelationEmbeddingTables& tables,
                    const EncoderConfig& config, double lambda_dc) {
  if (lambda_dc < 0.0) throw std::invalid_argument("lambda_dc must be >= 0");
  validate_config(config);
  ModelVars mv;
  build_model(mv, labels, x, params, tables, config, config.num_layers, false);
  const double loss = mv.tape.value(loss_node(mv, lambda_dc))(0, 0);
  if (!std::isfinite(loss)) throw NumericError("loss is non-finite");
  return loss;
}

LossAndGradients loss_and_gradients(const Dense<RelationLabel>& labels, const Matrix& x,
                                    const EncoderParameters& params,
                                    const RelationEmbeddingTables& tables,
                                    const EncoderConfig& config, double lambda_dc) {
  if (lambda_dc < 0.0) throw std::invalid_argument("lambda_dc must be >= 0");
  validate_config(config);

  ModelVars mv;
  build_model(mv, labels, x, params, tables, config, config.num_layers, false);
  const auto loss = loss_node(mv, lambda_dc);

  LossAndGradients result;
  result.loss = mv.tape.value(loss)(0, 0);
  if (!std::isfinite(result.loss)) throw NumericError("loss is non-finite");

  mv.tape.backward(loss);

  result.grads.params.layers.resize(mv.layers.size());
  for (size_t l = 0; l < mv.layers.size(); ++l) {
    const LayerVars& lv = mv.layers[l];
    LayerParams& gl = result.grads.params.layers[l];
    for (size_t h = 0; h < lv.w_query.size(); ++h) {
      gl.w_query.push_back(mv.tape.grad(lv.w_query[h]));
      gl.w_key.push_back(mv.tape.grad(lv.w_key[h]));
      gl.w_value.push_back(mv.tape.grad(lv.w_value[h]));
    }
    gl.w_out = mv.tape.grad(lv.w_out);
    gl.ffn_w1 = mv.tape.grad(lv.ffn_w1);
    gl.ffn_b1 = mv.tape.grad(lv.ffn_b1);
    gl.ffn_w2 = mv.tape.grad(lv.ffn_w2);
    gl.ffn_b2 = mv.tape.grad(lv.ffn_b2);
    gl.ln1_gain = mv.tape.grad(lv.ln1_gain);
    gl.ln1_bias = mv.tape.grad(lv.ln1_bias);
    gl.ln2_gain = mv.tape.grad(lv.ln2_gain);
    gl.ln2_bias = mv.tape.grad(lv.ln2_bias);
  }
  result.grads.tables.key_table = mv.tape.grad(mv.key_table);
  result.grads.tables.value_table = mv.tape.grad(mv.value_table);
  return result;
}

std::vector<std::pair<std::string, Matrix*>> parameter_tensors(EncoderParameters& params,
                                                               RelationEmbeddingTables& tables) {
  std::vector<std::pair<std::string, Matrix*>> out;
  for (size_t l = 0; l < params.layers.size(); ++l) {
    LayerParams& layer = params.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    for (size_t h = 0; h < layer.w_query.size(); ++h) {
      const std::string head = "head" + std::to_string(h) + ".";
      out.emplace_back(prefix + head + "w_query", &layer.w_query[h]);
      out.emplace_back(prefix + head + "w_key", &layer.w_key[h]);
      out.emplace_back(prefix + head + "w_value", &layer.w_value[h]);
    }
    out.emplace_back(prefix + "w_out", &layer.w_out);
    out.emplace_back(prefix + "ffn_w1", &layer.ffn_w1);
    out.emplace_back(prefix + "ffn_b1", &layer.ffn_b1);
    out.emplace_back(prefix + "ffn_w2", &layer.ffn_w2);
    out.emplace_back(prefix + "ffn_b2", &layer.ffn_b2);
    out.emplace_back(prefix + "ln1_gain", &layer.ln1_gain);
    out.emplace_back(prefix + "ln1_bias", &layer.ln1_bias);
    out.emplace_back(prefix + "ln2_gain", &layer.ln2_gain);
    out.emplace_back(prefix + "ln2_bias", &layer.ln2_bias);
  }
  out.emplace_back("relation.key_table", &tables.key_table);
  out.emplace_back("relation.value_table", &tables.value_table);
  return out;
}

std::vector<std::pair<std::string, const Matrix*>> parameter_tensors(
    const EncoderParameters& params, const RelationEmbeddingTables& tables) {
  const auto views = parameter_tensors(const_cast<EncoderParameters&>(params),
                                       const_cast<RelationEmbeddingTables&>(tables));
  std::vector<std::pair<std::string, const Matrix*>> out;
  out.reserve(views.size());
  for (const auto& [name, tensor] : views) out.emplace_back(name, tensor);
  return out;
}

SyntheticInstance make_synthetic_instance(int nodes, int model_dim, std::uint64_t seed) {
  if (nodes < 1) throw ValidationError("synthetic instance needs at least one node");
  DetRng rng(seed ^ 0x5caff01d5caff01dULL);
  SyntheticInstance instance;
  instance.labels = Dense<RelationLabel>(nodes, nodes, RelationLabel::Self);
  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      if (i == j) continue;
      // Any non-Self ordinal; the encoder does not police block purity here.
      instance.labels.at(i, j) =
          static_cast<RelationLabel>(1 + rng.uniform_int(kRelationLabelCount - 1));
    }
  }
  instance.x = Matrix(nodes, model_dim);
  for (double& v : instance.x.data) v = rng.uniform(-0.5, 0.5);
  return instance;
}

GradCheckResult grad_check(const EncoderConfig& config, int nodes, double lambda_dc,
                           int probes_per_tensor, double step, bool corrupt) {
  validate_config(config);
  if (probes_per_tensor < 1) throw ValidationError("probes_per_tensor must be >= 1");
  if (step <= 0.0) throw ValidationError("finite-difference step must be positive");

  const SyntheticInstance instance = make_synthetic_instance(nodes, config.model_dim, config.seed);

  auto [params, tables] = init_params(config);
  LossAndGradients analytic =
      loss_and_gradients(instance.labels, instance.x, params, tables, config, lambda_dc);
  // Negative control: shift every key-table gradient entry so any probe of
  // that tensor sees a wrong analytic value.
  if (corrupt)
    for (double& v : analytic.grads.tables.key_table.data) v += 1.0;

  const auto grad_views = parameter_tensors(analytic.grads.params, analytic.grads.tables);
  const auto param_views = parameter_tensors(params, tables);

  // Relative error with an absolute floor: zero-gradient coordinates (e.g.
  // relation rows absent from the instance) would otherwise divide noise by
  // noise.
  constexpr double kDenomFloor = 1e-4;

  DetRng probe_rng(config.seed ^ 0x9d0be5c0ffee1234ULL);
  GradCheckResult result;
  for (size_t t = 0; t < param_views.size(); ++t) {
    Matrix& tensor = *param_views[t].second;
    const Matrix& grad = *grad_views[t].second;
    const int entries = static_cast<int>(tensor.size());
    for (int p = 0; p < probes_per_tensor; ++p) {
      const int idx = probe_rng.uniform_int(entries);
      const double saved = tensor.data[idx];

      tensor.data[idx] = saved + step;
      const double plus =
          forward_loss(instance.labels, instance.x, params, tables, config, lambda_dc);
      tensor.data[idx] = saved - step;
      const double minus =
          forward_loss(instance.labels, instance.x, params, tables, config, lambda_dc);
      tensor.data[idx] = saved;

      const double numeric = (plus - minus) / (2.0 * step);
      const double analytic_value = grad.data[idx];
      const double denom =
          std::max({std::fabs(numeric), std::fabs(analytic_value), kDenomFloor});
      const double rel_err = std::fabs(numeric - analytic_value) / denom;
      ++result.probes;
      if (rel_err > result.max_rel_err) {
        result.max_rel_err = rel_err;
        result.worst_tensor = param_views[t].first;
      }
    }
  }
  return result;
}

namespace {

json tensor_to_json(const Matrix& m) {
  json entry;
  entry["shape"] = {m.rows, m.cols};
  entry["data"] = m.data;
  return entry;
}

Matrix tensor_from_json(const json& entry, const std::string& name) {
  const auto& shape = entry.at("shape");
  if (!shape.is_array() || shape.size() != 2)
    throw ValidationError("tensor '" + name + "' has a malformed shape");
  Matrix m(shape[0].get<int>(), shape[1].get<int>());
  const auto& data = entry.at("data");
  if (data.size() != m.data.size())
    throw ValidationError("tensor '" + name + "' declares shape " + shape.dump() + " but has " +
                          std::to_string(data.size()) + " values");
  for (size_t i = 0; i < m.data.size(); ++i) m.data[i] = data[i].get<double>();
  if (!all_finite(m)) throw ValidationError("tensor '" + name + "' contains non-finite values");
  return m;
}

}  // namespace

std::string save_params(const EncoderConfig& config, const EncoderParameters& params,
                        const RelationEmbeddingTables& tables, const json* manifest) {
  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "syntagraph-params";
  if (manifest != nullptr) doc["manifest"] = *manifest;
  doc["config"] = {{"num_layers", config.num_layers},   {"num_heads", config.num_heads},
                   {"model_dim", config.model_dim},     {"ffn_dim", config.ffn_dim},
                   {"dropout_rate", config.dropout_rate}, {"seed", config.seed}};
  json labels = json::array();
  for (int i = 0; i < kRelationLabelCount; ++i)
    labels.push_back(relation_name(static_cast<RelationLabel>(i)));
  doc["relation_labels"] = std::move(labels);

  json tensors;
  for (const auto& [name, tensor] : parameter_tensors(params, tables))
    tensors[name] = tensor_to_json(*tensor);
  doc["tensors"] = std::move(tensors);
  return doc.dump(1) + "\n";
}

LoadedParams load_params(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("params document: ") + e.what());
  }

  LoadedParams loaded;
  try {
    if (doc.at("kind").get<std::string>() != "syntagraph-params")
      throw ParseError("params document: unexpected kind '" +
                       doc.at("kind").get<std::string>() + "'");
    if (doc.at("format_version").get<int>() != 1)
      throw ParseError("params document: unsupported format_version " +
                       doc.at("format_version").dump());

    const auto& cfg = doc.at("config");
    loaded.config.num_layers = cfg.at("num_layers").get<int>();
    loaded.config.num_heads = cfg.at("num_heads").get<int>();
    loaded.config.model_dim = cfg.at("model_dim").get<int>();
    loaded.config.ffn_dim = cfg.at("ffn_dim").get<int>();
    loaded.config.dropout_rate = cfg.at("dropout_rate").get<double>();
    loaded.config.seed = cfg.at("seed").get<std::uint64_t>();
    validate_config(loaded.config);

    const auto& labels = doc.at("relation_labels");
    if (static_cast<int>(labels.size()) != kRelationLabelCount)
      throw ValidationError("params document: checkpoint declares " +
                            std::to_string(labels.size()) + " relation labels, expected " +
                            std::to_string(kRelationLabelCount));
    for (int i = 0; i < kRelationLabelCount; ++i) {
      if (labels[i].get<std::string>() != relation_name(static_cast<RelationLabel>(i)))
        throw ValidationError("params document: relation label " + std::to_string(i) +
                              " is '" + labels[i].get<std::string>() + "', expected '" +
                              std::string(relation_name(static_cast<RelationLabel>(i))) + "'");
    }

    // Allocate the declared geometry, then fill every tensor by name.
    auto [params, tables] = init_params(loaded.config);
    loaded.params = std::move(params);
    loaded.tables = std::move(tables);
    const auto views = parameter_tensors(loaded.params, loaded.tables);
    const auto& tensors = doc.at("tensors");
    if (tensors.size() != views.size())
      throw ValidationError("params document: expected " + std::to_string(views.size()) +
                            " tensors, found " + std::to_string(tensors.size()));
    for (const auto& [name, tensor] : views) {
      if (!tensors.contains(name))
        throw ValidationError("params document: missing tensor '" + name + "'");
      Matrix loaded_tensor = tensor_from_json(tensors.at(name), name);
      if (!loaded_tensor.same_shape(*tensor))
        throw ValidationError("params document: tensor '" + name + "' has shape " +
                              std::to_string(loaded_tensor.rows) + "x" +
                              std::to_string(loaded_tensor.cols) + ", expected " +
                              std::to_string(tensor->rows) + "x" + std::to_string(tensor->cols));
      *tensor = std::move(loaded_tensor);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("params document: ") + e.what());
  }
  return loaded;
}

std::string export_encoding(const Matrix& z, const json* manifest) {
  json doc;
  doc["format_version"] = 1;
  doc["kind"] = "syntagraph-encoding";
  if (manifest != nullptr) doc["manifest"] = *manifest;
  doc["num_nodes"] = z.rows;
  doc["model_dim"] = z.cols;
  json rows = json::array();
  for (int i = 0; i < z.rows; ++i) {
    json row = json::array();
    for (int j = 0; j < z.cols; ++j) row.push_back(z(i, j));
    rows.push_back(std::move(row));
  }
  doc["z"] = std::move(rows);
  return doc.dump(1) + "\n";
}

}  // namespace syntagraph
