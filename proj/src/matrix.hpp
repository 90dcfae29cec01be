#ifndef SYNTAGRAPH_MATRIX_HPP
#define SYNTAGRAPH_MATRIX_HPP

#include <cstddef>
#include <vector>

namespace syntagraph {

// Small dense row-major matrix of doubles. Row vectors are 1 x d matrices so
// parameters, gradients and activations share one shape vocabulary.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  bool empty() const { return data.empty(); }
  size_t size() const { return data.size(); }
  bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }

  bool operator==(const Matrix&) const = default;
};

Matrix matmul(const Matrix& a, const Matrix& b);     // a(n,m) * b(m,p)
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a(n,m) * b(p,m)^T
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a(m,n)^T * b(m,p)

void add_in_place(Matrix& dst, const Matrix& src);
void axpy_in_place(Matrix& dst, double alpha, const Matrix& src);  // dst += alpha * src
Matrix transpose(const Matrix& a);

bool all_finite(const Matrix& a);
double max_abs(const Matrix& a);

}  // namespace syntagraph

#endif
