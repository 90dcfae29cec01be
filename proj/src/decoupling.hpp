#ifndef SYNTAGRAPH_DECOUPLING_HPP
#define SYNTAGRAPH_DECOUPLING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "matrix.hpp"

namespace syntagraph {

// Relation embedding matrix convention: r is d_r x k with one column per
// relation label; column j stacks the key-table row over the value-table row.
Matrix stack_tables(const Matrix& key_table, const Matrix& value_table);

// || r^T r  (.) (1 - I) ||_F^2 : squared off-diagonal Gram mass. Zero exactly
// when the columns are mutually orthogonal.
double dc_loss(const Matrix& r);

// d/dr of dc_loss: 4 * r * (r^T r (.) (1 - I)).
Matrix dc_grad(const Matrix& r);

struct SimilarityReport {
  Matrix cosine;  // k x k
  double max_offdiag_abs = 0.0;
  double mean_offdiag_abs = 0.0;

  bool operator==(const SimilarityReport&) const = default;
};

// Pairwise cosine of columns. Zero-norm columns are rejected by index.
SimilarityReport similarity_matrix(const Matrix& r);

struct DecouplingRun {
  SimilarityReport with_dc;
  SimilarityReport without_dc;
  std::vector<double> loss_trajectory;  // with-DC arm, dc_loss before step 1
                                        // and after each step (steps + 1 entries)
};

// Shared uniform [-0.1, 0.1] initialization; the with-DC arm runs plain
// gradient descent on lambda_dc * dc_loss, the without-DC arm is left at the
// initialization.
DecouplingRun decoupling_experiment(int k, int d_r, int steps, double learning_rate,
                                    double lambda_dc, std::uint64_t seed);

// CSV with one long-format row per record: loss trajectory, both cosine
// matrices, and the two report statistics.
std::string decoupling_run_csv(const DecouplingRun& run, const nlohmann::json* manifest = nullptr);

// k x k matrix as CSV under a header row of the given column names.
std::string similarity_csv(const SimilarityReport& report,
                           const std::vector<std::string>& column_names,
                           const nlohmann::json* manifest = nullptr);

}  // namespace syntagraph

#endif
