#ifndef SYNTAGRAPH_ENCODER_HPP
#define SYNTAGRAPH_ENCODER_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "graph.hpp"
#include "matrix.hpp"
#include "relations.hpp"
#include "util.hpp"

namespace syntagraph {

struct EncoderConfig {
  int num_layers = 8;
  int num_heads = 8;
  int model_dim = 256;
  int ffn_dim = 1024;
  double dropout_rate = 0.1;  // training mode only
  std::uint64_t seed = 0;

  int head_dim() const { return model_dim / num_heads; }
  bool operator==(const EncoderConfig&) const = default;
};

void validate_config(const EncoderConfig& config);  // throws ValidationError

struct LayerParams {
  std::vector<Matrix> w_query, w_key, w_value;  // per head: model_dim x head_dim
  Matrix w_out;                                 // model_dim x model_dim
  Matrix ffn_w1, ffn_b1;                        // model_dim x ffn_dim, 1 x ffn_dim
  Matrix ffn_w2, ffn_b2;                        // ffn_dim x model_dim, 1 x model_dim
  Matrix ln1_gain, ln1_bias, ln2_gain, ln2_bias;  // 1 x model_dim

  bool operator==(const LayerParams&) const = default;
};

struct EncoderParameters {
  std::vector<LayerParams> layers;

  bool operator==(const EncoderParameters&) const = default;
};

// Learnable edge embeddings, shared across heads and layers. Row ordinal ==
// RelationLabel ordinal.
struct RelationEmbeddingTables {
  Matrix key_table;    // k x head_dim
  Matrix value_table;  // k x head_dim

  bool operator==(const RelationEmbeddingTables&) const = default;
};

// Glorot-uniform weights, zero biases, unit layer-norm gains, relation
// embeddings uniform in [-0.1, 0.1]. Bit-identical for a given config.
std::pair<EncoderParameters, RelationEmbeddingTables> init_params(const EncoderConfig& config);

// d_r x k matrix with column j = [key row j ; value row j].
Matrix relation_embedding_matrix(const RelationEmbeddingTables& tables);

// One deterministic hash-seeded vector per sequence item.
Matrix item_vectors(const FlattenedSequence& flattened, const EncoderConfig& config);
// Node embedding = mean of the node's span of item vectors.
Matrix embed_nodes(const FlattenedSequence& flattened, const EncoderConfig& config);

// Raw pre-softmax scores e^(h) for one layer and head over input x.
Matrix attention_scores(const Matrix& x, const Dense<RelationLabel>& labels,
                        const EncoderParameters& params, const RelationEmbeddingTables& tables,
                        int layer, int head);

// One full relational attention block in eval mode: multi-head attention with
// relation biases, output projection, residual + layer norm, feed-forward,
// residual + layer norm.
Matrix rgat_layer(const Matrix& x, const Dense<RelationLabel>& labels,
                  const EncoderParameters& params, const RelationEmbeddingTables& tables,
                  int layer);

Matrix encode(const Dense<RelationLabel>& labels, const Matrix& x,
              const EncoderParameters& params, const RelationEmbeddingTables& tables,
              const EncoderConfig& config, bool training = false);

struct EncoderGradients {
  EncoderParameters params;
  RelationEmbeddingTables tables;
};

struct LossAndGradients {
  double loss = 0.0;
  EncoderGradients grads;
};

// Surrogate training loss: mean squared row norm of the final representations
// plus lambda_dc times the decoupling penalty on the stacked relation tables.
// Gradients cover every trainable tensor; evaluation is in eval mode.
LossAndGradients loss_and_gradients(const Dense<RelationLabel>& labels, const Matrix& x,
                                    const EncoderParameters& params,
                                    const RelationEmbeddingTables& tables,
                                    const EncoderConfig& config, double lambda_dc);

// Forward-only value of the same loss; the probe side of the gradient check.
double forward_loss(const Dense<RelationLabel>& labels, const Matrix& x,
                    const EncoderParameters& params, const RelationEmbeddingTables& tables,
                    const EncoderConfig& config, double lambda_dc);

// Named views over every trainable tensor, iteration order fixed. Works for
// parameter and gradient storage alike.
std::vector<std::pair<std::string, Matrix*>> parameter_tensors(EncoderParameters& params,
                                                               RelationEmbeddingTables& tables);
std::vector<std::pair<std::string, const Matrix*>> parameter_tensors(
    const EncoderParameters& params, const RelationEmbeddingTables& tables);

// Deterministic synthetic instance for gradient checking: labels with Self on
// the diagonal and uniformly random off-diagonal ordinals, uniform node
// embeddings.
struct SyntheticInstance {
  Dense<RelationLabel> labels;
  Matrix x;
};
SyntheticInstance make_synthetic_instance(int nodes, int model_dim, std::uint64_t seed);

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_tensor;
  int probes = 0;
};

// Central-difference verification of loss_and_gradients over every tensor.
// `corrupt` perturbs one analytic entry as a negative control.
GradCheckResult grad_check(const EncoderConfig& config, int nodes, double lambda_dc,
                           int probes_per_tensor, double step, bool corrupt);

// Versioned JSON checkpoint with named tensors and shapes.
std::string save_params(const EncoderConfig& config, const EncoderParameters& params,
                        const RelationEmbeddingTables& tables,
                        const nlohmann::json* manifest = nullptr);
struct LoadedParams {
  EncoderConfig config;
  EncoderParameters params;
  RelationEmbeddingTables tables;
};
LoadedParams load_params(std::string_view document);

// Encoding output document: final representations plus shape metadata.
std::string export_encoding(const Matrix& z, const nlohmann::json* manifest = nullptr);

}  // namespace syntagraph

#endif
