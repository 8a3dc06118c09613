#pragma once

#include <functional>
#include <memory>
#include <random>
#include <vector>

#include "grapes/graph.hpp"

namespace grapes {

// Dense 2-D real tensor participating in a reverse-accumulation record.
// Tensor is a shared handle: copies alias the same node. Every operation
// below appends a node with a backward rule; backward() replays the record
// in reverse topological order. Gradients accumulate across backward calls
// until zero_grad().
class Tensor {
 public:
  struct Node {
    int rows = 0;
    int cols = 0;
    std::vector<double> value;
    std::vector<double> grad;  // materialized on demand, same shape as value
    bool requires_grad = false;       // leaf parameter flag
    bool grad_path = false;           // this node or an ancestor requires grad
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_rule;  // adds into parents' grads

    size_t size() const { return value.size(); }
    void ensure_grad() {
      if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
    }
  };

  Tensor() = default;

  static Tensor zeros(int rows, int cols, bool requires_grad = false);
  static Tensor constant(int rows, int cols, std::vector<double> data);
  static Tensor scalar(double v);
  static Tensor param(int rows, int cols, std::vector<double> data);

  bool defined() const { return node_ != nullptr; }
  int rows() const { return node_->rows; }
  int cols() const { return node_->cols; }
  bool is_scalar() const { return node_->rows == 1 && node_->cols == 1; }
  bool requires_grad() const { return node_->requires_grad; }
  bool on_grad_path() const { return node_->grad_path; }

  double at(int i, int j) const { return node_->value[static_cast<size_t>(i) * cols() + j]; }
  double value() const;  // scalar convenience accessor

  std::vector<double>& data() { return node_->value; }
  const std::vector<double>& data() const { return node_->value; }
  const std::vector<double>& grad() const;
  double grad_at(int i, int j) const;

  void zero_grad();

  Node* node() const { return node_.get(); }
  std::shared_ptr<Node> shared_node() const { return node_; }

  explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}

 private:
  std::shared_ptr<Node> node_;
};

// --- operations -----------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);        // same shape
Tensor mul(const Tensor& a, const Tensor& b);        // elementwise
Tensor affine(const Tensor& t, double scale, double shift);  // scale*t + shift
Tensor scale(const Tensor& t, double factor);
Tensor add_rowvec(const Tensor& t, const Tensor& row);  // broadcast 1 x c over rows
Tensor relu(const Tensor& t);
Tensor sigmoid(const Tensor& t);
Tensor clamp(const Tensor& t, double lo, double hi);  // gradient gated to (lo, hi)
Tensor log(const Tensor& t);
Tensor sum(const Tensor& t);        // 1x1
Tensor mean_rows(const Tensor& t);  // 1 x c
Tensor gather_rows(const Tensor& t, std::vector<int> indices);

// y = A h (sparse-dense). Adjacency values are constants: backward reaches h only.
Tensor spmm(const SparseMatrix& adj, const Tensor& h);
// y = A^T h without materializing the transpose.
Tensor spmm_transposed(const SparseMatrix& adj, const Tensor& h);

// Mean over rows of -log softmax(logits)[class_id], stabilized by row-max
// subtraction.
Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& class_ids);

// Mean over entries of the stable logit-form binary cross entropy. Targets
// must be a constant tensor of {0,1} with the same shape.
Tensor binary_cross_entropy(const Tensor& logits, const Tensor& targets);

// Reverse accumulation from a scalar loss. Repeated calls accumulate.
void backward(const Tensor& loss);

// --- parameter helpers ------------------------------------------------------

// Uniform Glorot-style init: U(-s, s) with s = sqrt(6 / (fan_in + fan_out)).
Tensor glorot_param(int rows, int cols, std::mt19937_64& rng);

}  // namespace grapes
