#include "tape.hpp"

#include <cassert>
#include <cmath>

#include "decoupling.hpp"

namespace syntagraph::ad {

Tape::Var Tape::input(Matrix value) { return emplace(std::move(value), nullptr); }

Tape::Var Tape::emplace(Matrix value, std::function<void(Tape&, Node&)> back) {
  nodes_.push_back(Node{std::move(value), Matrix{}, std::move(back)});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Matrix& Tape::grad_buffer(int id) {
  Node& node = nodes_[id];
  if (node.grad.empty()) node.grad = Matrix(node.value.rows, node.value.cols);
  return node.grad;
}

const Matrix& Tape::grad(Var v) { return grad_buffer(v.id); }

Tape::Var Tape::matmul(Var a, Var b) {
  Matrix out = syntagraph::matmul(nodes_[a.id].value, nodes_[b.id].value);
  return emplace(std::move(out), [a, b](Tape& t, Node& self) {
    add_in_place(t.grad_buffer(a.id), matmul_nt(self.grad, t.nodes_[b.id].value));
    add_in_place(t.grad_buffer(b.id), matmul_tn(t.nodes_[a.id].value, self.grad));
  });
}

Tape::Var Tape::add(Var a, Var b) {
  Matrix out = nodes_[a.id].value;
  add_in_place(out, nodes_[b.id].value);
  return emplace(std::move(out), [a, b](Tape& t, Node& self) {
    add_in_place(t.grad_buffer(a.id), self.grad);
    add_in_place(t.grad_buffer(b.id), self.grad);
  });
}

Tape::Var Tape::add_row(Var a, Var row) {
  const Matrix& av = nodes_[a.id].value;
  const Matrix& rv = nodes_[row.id].value;
  assert(rv.rows == 1 && rv.cols == av.cols);
  Matrix out = av;
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out(i, j) += rv(0, j);
  return emplace(std::move(out), [a, row](Tape& t, Node& self) {
    add_in_place(t.grad_buffer(a.id), self.grad);
    Matrix& rg = t.grad_buffer(row.id);
    for (int i = 0; i < self.grad.rows; ++i)
      for (int j = 0; j < self.grad.cols; ++j) rg(0, j) += self.grad(i, j);
  });
}

Tape::Var Tape::scale(Var a, double c) {
  Matrix out = nodes_[a.id].value;
  for (double& v : out.data) v *= c;
  return emplace(std::move(out), [a, c](Tape& t, Node& self) {
    axpy_in_place(t.grad_buffer(a.id), c, self.grad);
  });
}

Tape::Var Tape::add_scaled(Var a, Var b, double c) {
  Matrix out = nodes_[a.id].value;
  axpy_in_place(out, c, nodes_[b.id].value);
  return emplace(std::move(out), [a, b, c](Tape& t, Node& self) {
    add_in_place(t.grad_buffer(a.id), self.grad);
    axpy_in_place(t.grad_buffer(b.id), c, self.grad);
  });
}

Tape::Var Tape::relu(Var a) {
  Matrix out = nodes_[a.id].value;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return emplace(std::move(out), [a](Tape& t, Node& self) {
    Matrix& ag = t.grad_buffer(a.id);
    const Matrix& av = t.nodes_[a.id].value;
    for (size_t i = 0; i < ag.data.size(); ++i)
      if (av.data[i] > 0.0) ag.data[i] += self.grad.data[i];
  });
}

Tape::Var Tape::softmax_rows(Var a) {
  const Matrix& av = nodes_[a.id].value;
  Matrix out(av.rows, av.cols);
  for (int i = 0; i < av.rows; ++i) {
    double row_max = av(i, 0);
    for (int j = 1; j < av.cols; ++j) row_max = std::max(row_max, av(i, j));
    double denom = 0.0;
    for (int j = 0; j < av.cols; ++j) {
      out(i, j) = std::exp(av(i, j) - row_max);
      denom += out(i, j);
    }
    for (int j = 0; j < av.cols; ++j) out(i, j) /= denom;
  }
  return emplace(std::move(out), [a](Tape& t, Node& self) {
    Matrix& ag = t.grad_buffer(a.id);
    const Matrix& s = self.value;
    for (int i = 0; i < s.rows; ++i) {
      double dot = 0.0;
      for (int j = 0; j < s.cols; ++j) dot += self.grad(i, j) * s(i, j);
      for (int j = 0; j < s.cols; ++j) ag(i, j) += s(i, j) * (self.grad(i, j) - dot);
    }
  });
}

Tape::Var Tape::layer_norm(Var a, Var gain, Var bias, double eps) {
  const Matrix& av = nodes_[a.id].value;
  const Matrix& g = nodes_[gain.id].value;
  const Matrix& b = nodes_[bias.id].value;
  assert(g.rows == 1 && g.cols == av.cols && b.rows == 1 && b.cols == av.cols);
  const int d = av.cols;
  Matrix out(av.rows, d);
  for (int i = 0; i < av.rows; ++i) {
    double mean = 0.0;
    for (int j = 0; j < d; ++j) mean += av(i, j);
    mean /= d;
    double var = 0.0;
    for (int j = 0; j < d; ++j) var += (av(i, j) - mean) * (av(i, j) - mean);
    var /= d;
    const double inv_std = 1.0 / std::sqrt(var + eps);
    for (int j = 0; j < d; ++j) out(i, j) = g(0, j) * (av(i, j) - mean) * inv_std + b(0, j);
  }
  return emplace(std::move(out), [a, gain, bias, eps](Tape& t, Node& self) {
    const Matrix& av = t.nodes_[a.id].value;
    const Matrix& g = t.nodes_[gain.id].value;
    Matrix& ag = t.grad_buffer(a.id);
    Matrix& gg = t.grad_buffer(gain.id);
    Matrix& bg = t.grad_buffer(bias.id);
    const int d = av.cols;
    std::vector<double> xhat(d), dxhat(d);
    for (int i = 0; i < av.rows; ++i) {
      double mean = 0.0;
      for (int j = 0; j < d; ++j) mean += av(i, j);
      mean /= d;
      double var = 0.0;
      for (int j = 0; j < d; ++j) var += (av(i, j) - mean) * (av(i, j) - mean);
      var /= d;
      const double inv_std = 1.0 / std::sqrt(var + eps);
      double mean_dxhat = 0.0;
      double mean_dxhat_xhat = 0.0;
      for (int j = 0; j < d; ++j) {
        xhat[j] = (av(i, j) - mean) * inv_std;
        dxhat[j] = self.grad(i, j) * g(0, j);
        gg(0, j) += self.grad(i, j) * xhat[j];
        bg(0, j) += self.grad(i, j);
        mean_dxhat += dxhat[j];
        mean_dxhat_xhat += dxhat[j] * xhat[j];
      }
      mean_dxhat /= d;
      mean_dxhat_xhat /= d;
      for (int j = 0; j < d; ++j)
        ag(i, j) += inv_std * (dxhat[j] - mean_dxhat - xhat[j] * mean_dxhat_xhat);
    }
  });
}

Tape::Var Tape::concat_cols(const std::vector<Var>& parts) {
  assert(!parts.empty());
  const int rows = nodes_[parts.front().id].value.rows;
  int total_cols = 0;
  for (Var p : parts) total_cols += nodes_[p.id].value.cols;
  Matrix out(rows, total_cols);
  int offset = 0;
  for (Var p : parts) {
    const Matrix& pv = nodes_[p.id].value;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < pv.cols; ++j) out(i, offset + j) = pv(i, j);
    offset += pv.cols;
  }
  return emplace(std::move(out), [parts](Tape& t, Node& self) {
    int offset = 0;
    for (Var p : parts) {
      Matrix& pg = t.grad_buffer(p.id);
      for (int i = 0; i < pg.rows; ++i)
        for (int j = 0; j < pg.cols; ++j) pg(i, j) += self.grad(i, offset + j);
      offset += pg.cols;
    }
  });
}

Tape::Var Tape::mul_elements(Var a, const Matrix& mask) {
  const Matrix& av = nodes_[a.id].value;
  assert(av.same_shape(mask));
  Matrix out = av;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= mask.data[i];
  Matrix mask_copy = mask;
  return emplace(std::move(out), [a, mask_copy](Tape& t, Node& self) {
    Matrix& ag = t.grad_buffer(a.id);
    for (size_t i = 0; i < ag.data.size(); ++i)
      ag.data[i] += self.grad.data[i] * mask_copy.data[i];
  });
}

Tape::Var Tape::relation_scores(Var q, Var k, Var key_table, const Dense<RelationLabel>* labels,
                                double scale) {
  const Matrix& qv = nodes_[q.id].value;
  const Matrix& kv = nodes_[k.id].value;
  const Matrix& rk = nodes_[key_table.id].value;
  const int n = qv.rows;
  const int dh = qv.cols;
  assert(kv.rows == n && kv.cols == dh && rk.cols == dh);
  assert(labels->rows() == n && labels->cols() == n);

  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int label = static_cast<int>(labels->at(i, j));
      double acc = 0.0;
      for (int d = 0; d < dh; ++d) acc += qv(i, d) * (kv(j, d) + rk(label, d));
      out(i, j) = scale * acc;
    }
  }
  return emplace(std::move(out), [q, k, key_table, labels, scale](Tape& t, Node& self) {
    const Matrix& qv = t.nodes_[q.id].value;
    const Matrix& kv = t.nodes_[k.id].value;
    const Matrix& rk = t.nodes_[key_table.id].value;
    Matrix& qg = t.grad_buffer(q.id);
    Matrix& kg = t.grad_buffer(k.id);
    Matrix& rkg = t.grad_buffer(key_table.id);
    const int n = qv.rows;
    const int dh = qv.cols;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double g = scale * self.grad(i, j);
        if (g == 0.0) continue;
        const int label = static_cast<int>(labels->at(i, j));
        for (int d = 0; d < dh; ++d) {
          qg(i, d) += g * (kv(j, d) + rk(label, d));
          kg(j, d) += g * qv(i, d);
          rkg(label, d) += g * qv(i, d);
        }
      }
    }
  });
}

Tape::Var Tape::relation_values(Var alpha, Var v, Var value_table,
                                const Dense<RelationLabel>* labels) {
  const Matrix& av = nodes_[alpha.id].value;
  const Matrix& vv = nodes_[v.id].value;
  const Matrix& rv = nodes_[value_table.id].value;
  const int n = av.rows;
  const int dh = vv.cols;
  assert(av.cols == n && vv.rows == n && rv.cols == dh);

  Matrix out(n, dh);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = av(i, j);
      const int label = static_cast<int>(labels->at(i, j));
      for (int d = 0; d < dh; ++d) out(i, d) += a * (vv(j, d) + rv(label, d));
    }
  }
  return emplace(std::move(out), [alpha, v, value_table, labels](Tape& t, Node& self) {
    const Matrix& av = t.nodes_[alpha.id].value;
    const Matrix& vv = t.nodes_[v.id].value;
    const Matrix& rv = t.nodes_[value_table.id].value;
    Matrix& ag = t.grad_buffer(alpha.id);
    Matrix& vg = t.grad_buffer(v.id);
    Matrix& rvg = t.grad_buffer(value_table.id);
    const int n = av.rows;
    const int dh = vv.cols;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const int label = static_cast<int>(labels->at(i, j));
        const double a = av(i, j);
        double dot = 0.0;
        for (int d = 0; d < dh; ++d) {
          const double gz = self.grad(i, d);
          dot += gz * (vv(j, d) + rv(label, d));
          vg(j, d) += a * gz;
          rvg(label, d) += a * gz;
        }
        ag(i, j) += dot;
      }
    }
  });
}

Tape::Var Tape::mean_row_sq(Var a) {
  const Matrix& av = nodes_[a.id].value;
  double acc = 0.0;
  for (double v : av.data) acc += v * v;
  Matrix out(1, 1);
  out(0, 0) = acc / av.rows;
  return emplace(std::move(out), [a](Tape& t, Node& self) {
    const Matrix& av = t.nodes_[a.id].value;
    Matrix& ag = t.grad_buffer(a.id);
    const double g = self.grad(0, 0) * 2.0 / av.rows;
    for (size_t i = 0; i < ag.data.size(); ++i) ag.data[i] += g * av.data[i];
  });
}

Tape::Var Tape::decoupling_penalty(Var key_table, Var value_table) {
  const Matrix& rk = nodes_[key_table.id].value;
  const Matrix& rv = nodes_[value_table.id].value;
  assert(rk.rows == rv.rows && rk.cols == rv.cols);
  const Matrix r = stack_tables(rk, rv);
  Matrix out(1, 1);
  out(0, 0) = dc_loss(r);
  return emplace(std::move(out), [key_table, value_table](Tape& t, Node& self) {
    const Matrix& rk = t.nodes_[key_table.id].value;
    const Matrix& rv = t.nodes_[value_table.id].value;
    const Matrix r = stack_tables(rk, rv);
    const Matrix dr = dc_grad(r);
    Matrix& rkg = t.grad_buffer(key_table.id);
    Matrix& rvg = t.grad_buffer(value_table.id);
    const double g = self.grad(0, 0);
    const int dh = rk.cols;
    for (int label = 0; label < rk.rows; ++label) {
      for (int d = 0; d < dh; ++d) {
        rkg(label, d) += g * dr(d, label);
        rvg(label, d) += g * dr(dh + d, label);
      }
    }
  });
}

void Tape::backward(Var loss) {
  assert(nodes_[loss.id].value.rows == 1 && nodes_[loss.id].value.cols == 1);
  grad_buffer(loss.id)(0, 0) = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& node = nodes_[id];
    if (node.back && !node.grad.empty()) node.back(*this, node);
  }
}

}  // namespace syntagraph::ad
