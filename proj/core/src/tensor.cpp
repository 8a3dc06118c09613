#include "grapes/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "grapes/error.hpp"

namespace grapes {

namespace {

using Node = Tensor::Node;

std::shared_ptr<Node> make_node(int rows, int cols) {
  auto n = std::make_shared<Node>();
  n->rows = rows;
  n->cols = cols;
  n->value.assign(static_cast<size_t>(rows) * cols, 0.0);
  return n;
}

// Attaches parents and a backward rule, but only if some parent can receive
// gradients; otherwise the node stays a constant and the record is pruned.
void link(const std::shared_ptr<Node>& out, std::vector<std::shared_ptr<Node>> parents,
          std::function<void(Node&)> rule) {
  bool any = false;
  for (const auto& p : parents) any = any || p->grad_path;
  if (!any) return;
  out->grad_path = true;
  out->parents = std::move(parents);
  out->backward_rule = std::move(rule);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw shape_error(std::string(what) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()) + ")");
}

}  // namespace

Tensor Tensor::zeros(int rows, int cols, bool requires_grad) {
  auto n = make_node(rows, cols);
  n->requires_grad = requires_grad;
  n->grad_path = requires_grad;
  return Tensor(n);
}

Tensor Tensor::constant(int rows, int cols, std::vector<double> data) {
  if (static_cast<size_t>(rows) * cols != data.size())
    throw shape_error("Tensor::constant: data length does not match shape");
  auto n = make_node(rows, cols);
  n->value = std::move(data);
  return Tensor(n);
}

Tensor Tensor::scalar(double v) { return constant(1, 1, {v}); }

Tensor Tensor::param(int rows, int cols, std::vector<double> data) {
  Tensor t = constant(rows, cols, std::move(data));
  t.node()->requires_grad = true;
  t.node()->grad_path = true;
  return t;
}

double Tensor::value() const {
  if (!is_scalar()) throw shape_error("Tensor::value: tensor is not scalar");
  return node_->value[0];
}

const std::vector<double>& Tensor::grad() const {
  node_->ensure_grad();
  return node_->grad;
}

double Tensor::grad_at(int i, int j) const {
  node_->ensure_grad();
  return node_->grad[static_cast<size_t>(i) * cols() + j];
}

void Tensor::zero_grad() { node_->grad.assign(node_->value.size(), 0.0); }

// --- kernels ----------------------------------------------------------------

namespace {

// C += A * B, all row-major dense.
void gemm_acc(const double* a, int ar, int ac, const double* b, int bc, double* c) {
  for (int i = 0; i < ar; ++i) {
    const double* arow = a + static_cast<size_t>(i) * ac;
    double* crow = c + static_cast<size_t>(i) * bc;
    for (int k = 0; k < ac; ++k) {
      const double av = arow[k];
      if (av == 0.0) continue;
      const double* brow = b + static_cast<size_t>(k) * bc;
      for (int j = 0; j < bc; ++j) crow[j] += av * brow[j];
    }
  }
}

// C += A^T * B with A of shape ar x ac: result ac x bc.
void gemm_at_b_acc(const double* a, int ar, int ac, const double* b, int bc, double* c) {
  for (int i = 0; i < ar; ++i) {
    const double* arow = a + static_cast<size_t>(i) * ac;
    const double* brow = b + static_cast<size_t>(i) * bc;
    for (int k = 0; k < ac; ++k) {
      const double av = arow[k];
      if (av == 0.0) continue;
      double* crow = c + static_cast<size_t>(k) * bc;
      for (int j = 0; j < bc; ++j) crow[j] += av * brow[j];
    }
  }
}

// C += A * B^T with B of shape br x bc: result ar x br.
void gemm_a_bt_acc(const double* a, int ar, int ac, const double* b, int br, double* c) {
  for (int i = 0; i < ar; ++i) {
    const double* arow = a + static_cast<size_t>(i) * ac;
    double* crow = c + static_cast<size_t>(i) * br;
    for (int j = 0; j < br; ++j) {
      const double* brow = b + static_cast<size_t>(j) * ac;
      double acc = 0.0;
      for (int k = 0; k < ac; ++k) acc += arow[k] * brow[k];
      crow[j] += acc;
    }
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw shape_error("matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                      std::to_string(b.rows()) + ")");
  auto out = make_node(a.rows(), b.cols());
  gemm_acc(a.data().data(), a.rows(), a.cols(), b.data().data(), b.cols(), out->value.data());
  auto pa = a.shared_node();
  auto pb = b.shared_node();
  link(out, {pa, pb}, [pa, pb](Node& self) {
    if (pa->grad_path) {
      pa->ensure_grad();
      gemm_a_bt_acc(self.grad.data(), self.rows, self.cols, pb->value.data(), pa->cols,
                    pa->grad.data());
    }
    if (pb->grad_path) {
      pb->ensure_grad();
      gemm_at_b_acc(pa->value.data(), pa->rows, pa->cols, self.grad.data(), self.cols,
                    pb->grad.data());
    }
  });
  return Tensor(out);
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  auto out = make_node(a.rows(), a.cols());
  for (size_t i = 0; i < out->value.size(); ++i) out->value[i] = a.data()[i] + b.data()[i];
  auto pa = a.shared_node();
  auto pb = b.shared_node();
  link(out, {pa, pb}, [pa, pb](Node& self) {
    for (const auto& p : {pa, pb}) {
      if (!p->grad_path) continue;
      p->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i];
    }
  });
  return Tensor(out);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  auto out = make_node(a.rows(), a.cols());
  for (size_t i = 0; i < out->value.size(); ++i) out->value[i] = a.data()[i] * b.data()[i];
  auto pa = a.shared_node();
  auto pb = b.shared_node();
  link(out, {pa, pb}, [pa, pb](Node& self) {
    if (pa->grad_path) {
      pa->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i) pa->grad[i] += self.grad[i] * pb->value[i];
    }
    if (pb->grad_path) {
      pb->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i) pb->grad[i] += self.grad[i] * pa->value[i];
    }
  });
  return Tensor(out);
}

Tensor affine(const Tensor& t, double s, double shift) {
  auto out = make_node(t.rows(), t.cols());
  for (size_t i = 0; i < out->value.size(); ++i) out->value[i] = s * t.data()[i] + shift;
  auto p = t.shared_node();
  link(out, {p}, [p, s](Node& self) {
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += s * self.grad[i];
  });
  return Tensor(out);
}

Tensor scale(const Tensor& t, double factor) { return affine(t, factor, 0.0); }

Tensor add_rowvec(const Tensor& t, const Tensor& row) {
  if (row.rows() != 1 || row.cols() != t.cols())
    throw shape_error("add_rowvec: row vector shape mismatch");
  auto out = make_node(t.rows(), t.cols());
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j)
      out->value[static_cast<size_t>(i) * t.cols() + j] = t.at(i, j) + row.at(0, j);
  auto pt = t.shared_node();
  auto pr = row.shared_node();
  link(out, {pt, pr}, [pt, pr](Node& self) {
    if (pt->grad_path) {
      pt->ensure_grad();
      for (size_t i = 0; i < self.grad.size(); ++i) pt->grad[i] += self.grad[i];
    }
    if (pr->grad_path) {
      pr->ensure_grad();
      for (int i = 0; i < self.rows; ++i)
        for (int j = 0; j < self.cols; ++j)
          pr->grad[j] += self.grad[static_cast<size_t>(i) * self.cols + j];
    }
  });
  return Tensor(out);
}

Tensor relu(const Tensor& t) {
  auto out = make_node(t.rows(), t.cols());
  for (size_t i = 0; i < out->value.size(); ++i) out->value[i] = std::max(0.0, t.data()[i]);
  auto p = t.shared_node();
  link(out, {p}, [p](Node& self) {
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i)
      if (p->value[i] > 0.0) p->grad[i] += self.grad[i];  // subgradient 0 at 0
  });
  return Tensor(out);
}

Tensor sigmoid(const Tensor& t) {
  auto out = make_node(t.rows(), t.cols());
  for (size_t i = 0; i < out->value.size(); ++i) {
    const double x = t.data()[i];
    out->value[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  auto p = t.shared_node();
  link(out, {p}, [p](Node& self) {
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) {
      const double s = self.value[i];
      p->grad[i] += self.grad[i] * s * (1.0 - s);
    }
  });
  return Tensor(out);
}

Tensor clamp(const Tensor& t, double lo, double hi) {
  auto out = make_node(t.rows(), t.cols());
  for (size_t i = 0; i < out->value.size(); ++i)
    out->value[i] = std::min(hi, std::max(lo, t.data()[i]));
  auto p = t.shared_node();
  link(out, {p}, [p, lo, hi](Node& self) {
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) {
      const double x = p->value[i];
      if (x > lo && x < hi) p->grad[i] += self.grad[i];
    }
  });
  return Tensor(out);
}

Tensor log(const Tensor& t) {
  auto out = make_node(t.rows(), t.cols());
  for (size_t i = 0; i < out->value.size(); ++i) out->value[i] = std::log(t.data()[i]);
  auto p = t.shared_node();
  link(out, {p}, [p](Node& self) {
    p->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += self.grad[i] / p->value[i];
  });
  return Tensor(out);
}

Tensor sum(const Tensor& t) {
  auto out = make_node(1, 1);
  double acc = 0.0;
  for (double v : t.data()) acc += v;
  out->value[0] = acc;
  auto p = t.shared_node();
  link(out, {p}, [p](Node& self) {
    p->ensure_grad();
    const double g = self.grad[0];
    for (size_t i = 0; i < p->grad.size(); ++i) p->grad[i] += g;
  });
  return Tensor(out);
}

Tensor mean_rows(const Tensor& t) {
  auto out = make_node(1, t.cols());
  const double inv = 1.0 / t.rows();
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j) out->value[j] += t.at(i, j) * inv;
  auto p = t.shared_node();
  link(out, {p}, [p, inv](Node& self) {
    p->ensure_grad();
    for (int i = 0; i < p->rows; ++i)
      for (int j = 0; j < p->cols; ++j)
        p->grad[static_cast<size_t>(i) * p->cols + j] += self.grad[j] * inv;
  });
  return Tensor(out);
}

Tensor gather_rows(const Tensor& t, std::vector<int> indices) {
  for (int i : indices)
    if (i < 0 || i >= t.rows()) throw shape_error("gather_rows: row index out of range");
  auto out = make_node(static_cast<int>(indices.size()), t.cols());
  const int c = t.cols();
  for (size_t r = 0; r < indices.size(); ++r)
    std::copy_n(t.data().data() + static_cast<size_t>(indices[r]) * c, c,
                out->value.data() + r * c);
  auto p = t.shared_node();
  link(out, {p}, [p, idx = std::move(indices)](Node& self) {
    p->ensure_grad();
    for (size_t r = 0; r < idx.size(); ++r)
      for (int j = 0; j < self.cols; ++j)
        p->grad[static_cast<size_t>(idx[r]) * self.cols + j] +=
            self.grad[r * self.cols + j];
  });
  return Tensor(out);
}

namespace {

void check_spmm_shapes(const SparseMatrix& adj, const Tensor& h, bool transposed) {
  const int expected = transposed ? adj.rows : adj.cols;
  if (h.rows() != expected)
    throw shape_error("spmm: adjacency expects " + std::to_string(expected) +
                      " input rows, got " + std::to_string(h.rows()));
}

}  // namespace

Tensor spmm(const SparseMatrix& adj, const Tensor& h) {
  check_spmm_shapes(adj, h, false);
  auto out = make_node(adj.rows, h.cols());
  const int c = h.cols();
  for (int i = 0; i < adj.rows; ++i) {
    double* orow = out->value.data() + static_cast<size_t>(i) * c;
    for (int e = adj.row_offsets[i]; e < adj.row_offsets[i + 1]; ++e) {
      const double v = adj.values[e];
      const double* hrow = h.data().data() + static_cast<size_t>(adj.col_indices[e]) * c;
      for (int j = 0; j < c; ++j) orow[j] += v * hrow[j];
    }
  }
  auto p = h.shared_node();
  auto mat = std::make_shared<SparseMatrix>(adj);  // own a copy: graph may outlive caller's block
  link(out, {p}, [p, mat](Node& self) {
    p->ensure_grad();
    const int c = self.cols;
    for (int i = 0; i < mat->rows; ++i) {
      const double* grow = self.grad.data() + static_cast<size_t>(i) * c;
      for (int e = mat->row_offsets[i]; e < mat->row_offsets[i + 1]; ++e) {
        const double v = mat->values[e];
        double* prow = p->grad.data() + static_cast<size_t>(mat->col_indices[e]) * c;
        for (int j = 0; j < c; ++j) prow[j] += v * grow[j];
      }
    }
  });
  return Tensor(out);
}

Tensor spmm_transposed(const SparseMatrix& adj, const Tensor& h) {
  check_spmm_shapes(adj, h, true);
  auto out = make_node(adj.cols, h.cols());
  const int c = h.cols();
  for (int i = 0; i < adj.rows; ++i) {
    const double* hrow = h.data().data() + static_cast<size_t>(i) * c;
    for (int e = adj.row_offsets[i]; e < adj.row_offsets[i + 1]; ++e) {
      const double v = adj.values[e];
      double* orow = out->value.data() + static_cast<size_t>(adj.col_indices[e]) * c;
      for (int j = 0; j < c; ++j) orow[j] += v * hrow[j];
    }
  }
  auto p = h.shared_node();
  auto mat = std::make_shared<SparseMatrix>(adj);
  link(out, {p}, [p, mat](Node& self) {
    p->ensure_grad();
    const int c = self.cols;
    for (int i = 0; i < mat->rows; ++i) {
      double* prow = p->grad.data() + static_cast<size_t>(i) * c;
      for (int e = mat->row_offsets[i]; e < mat->row_offsets[i + 1]; ++e) {
        const double v = mat->values[e];
        const double* grow = self.grad.data() + static_cast<size_t>(mat->col_indices[e]) * c;
        for (int j = 0; j < c; ++j) prow[j] += v * grow[j];
      }
    }
  });
  return Tensor(out);
}

Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& class_ids) {
  const int n = logits.rows();
  const int c = logits.cols();
  if (static_cast<int>(class_ids.size()) != n)
    throw shape_error("softmax_cross_entropy: one class id per logits row required");
  for (int id : class_ids)
    if (id < 0 || id >= c) throw shape_error("softmax_cross_entropy: class id out of range");

  auto probs = std::make_shared<std::vector<double>>(static_cast<size_t>(n) * c);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* row = logits.data().data() + static_cast<size_t>(i) * c;
    double m = row[0];
    for (int j = 1; j < c; ++j) m = std::max(m, row[j]);
    double z = 0.0;
    for (int j = 0; j < c; ++j) z += std::exp(row[j] - m);
    const double lse = m + std::log(z);
    for (int j = 0; j < c; ++j) (*probs)[static_cast<size_t>(i) * c + j] = std::exp(row[j] - lse);
    total += lse - row[class_ids[i]];
  }

  auto out = make_node(1, 1);
  out->value[0] = total / n;
  auto p = logits.shared_node();
  link(out, {p}, [p, probs, ids = class_ids, n, c](Node& self) {
    p->ensure_grad();
    const double g = self.grad[0] / n;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < c; ++j) {
        const double soft = (*probs)[static_cast<size_t>(i) * c + j];
        const double onehot = j == ids[i] ? 1.0 : 0.0;
        p->grad[static_cast<size_t>(i) * c + j] += g * (soft - onehot);
      }
    }
  });
  return Tensor(out);
}

Tensor binary_cross_entropy(const Tensor& logits, const Tensor& targets) {
  check_same_shape(logits, targets, "binary_cross_entropy");
  const size_t count = logits.data().size();
  double total = 0.0;
  for (size_t i = 0; i < count; ++i) {
    const double x = logits.data()[i];
    const double y = targets.data()[i];
    total += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
  }
  auto out = make_node(1, 1);
  out->value[0] = total / count;
  auto p = logits.shared_node();
  auto pt = targets.shared_node();
  link(out, {p}, [p, pt, count](Node& self) {
    p->ensure_grad();
    const double g = self.grad[0] / count;
    for (size_t i = 0; i < count; ++i) {
      const double x = p->value[i];
      const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
      p->grad[i] += g * (s - pt->value[i]);
    }
  });
  return Tensor(out);
}

void backward(const Tensor& loss) {
  if (!loss.is_scalar()) throw shape_error("backward: loss must be a 1x1 tensor");
  Node* root = loss.node();
  if (!root->grad_path) return;  // no parameters reachable

  // Iterative post-order over the grad-carrying subgraph.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    bool descended = false;
    while (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->grad_path && !visited.count(parent)) {
        visited.insert(parent);
        stack.emplace_back(parent, 0);
        descended = true;
        break;
      }
    }
    if (!descended && (stack.back().second >= stack.back().first->parents.size())) {
      order.push_back(stack.back().first);
      stack.pop_back();
    }
  }

  root->ensure_grad();
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward_rule) {
      node->ensure_grad();
      node->backward_rule(*node);
    }
  }
}

Tensor glorot_param(int rows, int cols, std::mt19937_64& rng) {
  const double s = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-s, s);
  std::vector<double> data(static_cast<size_t>(rows) * cols);
  for (double& v : data) v = dist(rng);
  return Tensor::param(rows, cols, std::move(data));
}

}  // namespace grapes
