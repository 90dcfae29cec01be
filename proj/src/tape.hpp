#ifndef SYNTAGRAPH_TAPE_HPP
#define SYNTAGRAPH_TAPE_HPP

#include <functional>
#include <vector>

#include "matrix.hpp"
#include "relations.hpp"
#include "util.hpp"

namespace syntagraph::ad {

// Reverse-mode tape over Matrix values. Leaves are registered with input();
// backward() seeds the scalar loss with 1 and accumulates gradients into
// every node in reverse creation order. Label matrices passed to the
// relation ops are captured by pointer and must outlive the tape.
class Tape {
 public:
  struct Var {
    int id = -1;
  };

  Var input(Matrix value);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  // Gradient of the last backward() target; zero matrix if the node does not
  // influence it.
  const Matrix& grad(Var v);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var add_row(Var a, Var row);  // broadcast a 1 x d row over every row of a
  Var scale(Var a, double c);
  Var add_scaled(Var a, Var b, double c);  // a + c * b
  Var relu(Var a);
  Var softmax_rows(Var a);
  Var layer_norm(Var a, Var gain, Var bias, double eps);
  Var concat_cols(const std::vector<Var>& parts);
  Var mul_elements(Var a, const Matrix& mask);  // constant mask (dropout)

  // e(i,j) = scale * q_i . (k_j + key_table[label(i,j)])
  Var relation_scores(Var q, Var k, Var key_table, const Dense<RelationLabel>* labels,
                      double scale);
  // z(i,:) = sum_j alpha(i,j) * (v_j + value_table[label(i,j)])
  Var relation_values(Var alpha, Var v, Var value_table, const Dense<RelationLabel>* labels);

  // 1x1: mean over rows of the squared row norm.
  Var mean_row_sq(Var a);
  // 1x1: decoupling penalty over columns built by stacking key_table and
  // value_table rows per label.
  Var decoupling_penalty(Var key_table, Var value_table);

  void backward(Var loss);

 private:
  struct Node {
    Matrix value;
    Matrix grad;  // lazily sized during backward
    std::function<void(Tape&, Node&)> back;
  };

  Matrix& grad_buffer(int id);
  Var emplace(Matrix value, std::function<void(Tape&, Node&)> back);

  std::vector<Node> nodes_;
};

}  // namespace syntagraph::ad

#endif
