#include "decoupling.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace syntagraph {

using nlohmann::json;

Matrix stack_tables(const Matrix& key_table, const Matrix& value_table) {
  const int k = key_table.rows;
  const int dh = key_table.cols;
  Matrix r(2 * dh, k);
  for (int j = 0; j < k; ++j) {
    for (int d = 0; d < dh; ++d) {
      r(d, j) = key_table(j, d);
      r(dh + d, j) = value_table(j, d);
    }
  }
  return r;
}

namespace {

void require_finite(const Matrix& r, const char* what) {
  if (!all_finite(r)) throw NumericError(std::string(what) + ": non-finite input");
}

// Gram matrix with the diagonal zeroed: r^T r (.) (1 - I).
Matrix masked_gram(const Matrix& r) {
  Matrix gram = matmul_tn(r, r);
  for (int i = 0; i < gram.rows; ++i) gram(i, i) = 0.0;
  return gram;
}

}  // namespace

double dc_loss(const Matrix& r) {
  if (r.cols < 1) throw ValidationError("dc_loss requires at least one embedding column");
  require_finite(r, "dc_loss");
  const Matrix gram = masked_gram(r);
  double acc = 0.0;
  for (double v : gram.data) acc += v * v;
  return acc;
}

Matrix dc_grad(const Matrix& r) {
  if (r.cols < 1) throw ValidationError("dc_grad requires at least one embedding column");
  require_finite(r, "dc_grad");
  Matrix grad = matmul(r, masked_gram(r));
  for (double& v : grad.data) v *= 4.0;
  return grad;
}

SimilarityReport similarity_matrix(const Matrix& r) {
  require_finite(r, "similarity_matrix");
  const int k = r.cols;
  std::vector<double> norms(k);
  for (int j = 0; j < k; ++j) {
    double acc = 0.0;
    for (int d = 0; d < r.rows; ++d) acc += r(d, j) * r(d, j);
    norms[j] = std::sqrt(acc);
    if (norms[j] == 0.0)
      throw ValidationError("similarity_matrix: column " + std::to_string(j) + " has zero norm");
  }

  SimilarityReport report;
  report.cosine = Matrix(k, k);
  double sum_abs = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double dot = 0.0;
      for (int d = 0; d < r.rows; ++d) dot += r(d, i) * r(d, j);
      const double cos = dot / (norms[i] * norms[j]);
      report.cosine(i, j) = cos;
      if (i != j) {
        report.max_offdiag_abs = std::max(report.max_offdiag_abs, std::fabs(cos));
        sum_abs += std::fabs(cos);
      }
    }
  }
  report.mean_offdiag_abs = k > 1 ? sum_abs / (static_cast<double>(k) * (k - 1)) : 0.0;
  return report;
}

DecouplingRun decoupling_experiment(int k, int d_r, int steps, double learning_rate,
                                    double lambda_dc, std::uint64_t seed) {
  if (k < 1 || d_r < 1) throw ValidationError("decoupling experiment requires k >= 1 and d >= 1");
  if (k > d_r)
    throw ValidationError("decoupling experiment: k = " + std::to_string(k) +
                          " exceeds embedding dimension d = " + std::to_string(d_r) +
                          "; orthogonality is unachievable");
  if (steps < 1) throw ValidationError("decoupling experiment requires steps >= 1");

  DetRng rng(seed);
  Matrix r(d_r, k);
  for (double& v : r.data) v = rng.uniform(-0.1, 0.1);

  DecouplingRun run;
  run.without_dc = similarity_matrix(r);

  run.loss_trajectory.reserve(steps + 1);
  run.loss_trajectory.push_back(dc_loss(r));
  for (int s = 0; s < steps; ++s) {
    const Matrix grad = dc_grad(r);
    axpy_in_place(r, -learning_rate * lambda_dc, grad);
    run.loss_trajectory.push_back(dc_loss(r));
  }
  run.with_dc = similarity_matrix(r);
  return run;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void append_manifest_comment(std::string& out, const json* manifest) {
  if (manifest != nullptr) {
    out += "# manifest ";
    out += manifest->dump();
    out += "\n";
  }
}

void append_report(std::string& out, const char* arm, const SimilarityReport& report) {
  const int k = report.cosine.rows;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      out += "cosine,";
      out += arm;
      out += ",";
      out += std::to_string(i);
      out += ",";
      out += std::to_string(j);
      out += ",";
      out += format_double(report.cosine(i, j));
      out += "\n";
    }
  }
  for (const auto& [stat, value] :
       {std::pair<const char*, double>{"max_offdiag_abs", report.max_offdiag_abs},
        std::pair<const char*, double>{"mean_offdiag_abs", report.mean_offdiag_abs}}) {
    out += "stat,";
    out += arm;
    out += ",";
    out += stat;
    out += ",,";
    out += format_double(value);
    out += "\n";
  }
}

}  // namespace

std::string decoupling_run_csv(const DecouplingRun& run, const json* manifest) {
  std::string out;
  append_manifest_comment(out, manifest);
  out += "record,arm,a,b,value\n";
  for (size_t s = 0; s < run.loss_trajectory.size(); ++s) {
    out += "loss,with_dc,";
    out += std::to_string(s);
    out += ",,";
    out += format_double(run.loss_trajectory[s]);
    out += "\n";
  }
  append_report(out, "with_dc", run.with_dc);
  append_report(out, "without_dc", run.without_dc);
  return out;
}

std::string similarity_csv(const SimilarityReport& report,
                           const std::vector<std::string>& column_names, const json* manifest) {
  const int k = report.cosine.rows;
  if (static_cast<int>(column_names.size()) != k)
    throw ValidationError("similarity_csv: " + std::to_string(column_names.size()) +
                          " column names for " + std::to_string(k) + " embeddings");
  std::string out;
  append_manifest_comment(out, manifest);
  for (int j = 0; j < k; ++j) {
    if (j) out += ",";
    out += column_names[j];
  }
  out += "\n";
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (j) out += ",";
      out += format_double(report.cosine(i, j));
    }
    out += "\n";
  }
  return out;
}

}  // namespace syntagraph
