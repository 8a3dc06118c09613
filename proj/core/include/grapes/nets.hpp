#pragma once

#include <random>
#include <string>
#include <vector>

#include "grapes/graph.hpp"
#include "grapes/subgraph.hpp"
#include "grapes/tensor.hpp"

namespace grapes {

struct GcnConfig {
  int num_layers = 2;
  int hidden_dim = 256;
  int input_dim = 0;
  int output_dim = 0;
};

// Plain GCN classifier. The sampled forward pass runs deepest layer set
// first: step t aggregates into K(L-t) from K(L-t+1) through the transposed
// block, so the target rows come out last with an L-hop receptive field.
// ReLU after every layer except the last.
class ClassifierGcn {
 public:
  ClassifierGcn(const GcnConfig& cfg, std::mt19937_64& rng);

  // Logits aligned with the target rows (layer set 0).
  Tensor forward(const SampledSubgraph& sub, const FeatureMatrix& x) const;

  // Full-batch forward over the whole graph; logits for every node.
  Tensor forward_full(const NormalizedAdjacency& adj, const FeatureMatrix& x) const;

  const GcnConfig& config() const { return cfg_; }
  std::vector<Tensor>& params() { return weights_; }
  const std::vector<Tensor>& params() const { return weights_; }

 private:
  GcnConfig cfg_;
  std::vector<Tensor> weights_;
};

struct SamplerConfig {
  int num_layers = 2;
  int hidden_dim = 256;
  int feature_dim = 0;
  int indicator_dim = 0;  // L+1 one-hot slots appended to the features
};

// Sampling-policy network: produces one inclusion logit per candidate node.
// Each layer combines a per-node self transform with aggregation over the
// normalized frontier block (rows = frontier + candidates, cols = frontier).
// Aggregating over the frontier only, rather than the full induced subgraph,
// keeps candidate scores conditioned on the nodes they are candidates of;
// symmetric aggregation over a dense induced subgraph would average the
// frontier's features away entirely.
class SamplerGcn {
 public:
  SamplerGcn(const SamplerConfig& cfg, std::mt19937_64& rng);
  static SamplerGcn zero_initialized(const SamplerConfig& cfg);

  // Logits for candidates(g, targets ∪ prev_sampled), ordered by node id
  // (one column). Empty tensor when there are no candidates. layer_index is
  // the 1-based layer being sampled; the indicator slot is 0 for targets,
  // layer_index-1 for previously sampled nodes, layer_index for candidates.
  Tensor logits(const Graph& g, const FeatureMatrix& x, const std::vector<int>& targets,
                const std::vector<int>& prev_sampled, int layer_index) const;

  const SamplerConfig& config() const { return cfg_; }
  std::vector<Tensor>& params() { return params_; }
  const std::vector<Tensor>& params() const { return params_; }

 private:
  SamplerGcn() = default;

  SamplerConfig cfg_;
  std::vector<Tensor> self_weights_;
  std::vector<Tensor> neighbor_weights_;
  Tensor head_weight_;
  Tensor head_bias_;
  std::vector<Tensor> params_;  // flat view of the above

  void collect_params();
};

// Predicts the log-partition scalar from the target nodes: one GCN layer on
// the target-induced subgraph, mean pooling, affine map.
class ZNet {
 public:
  ZNet(int feature_dim, int hidden_dim, std::mt19937_64& rng);

  Tensor forward(const Graph& g, const FeatureMatrix& x, const std::vector<int>& targets) const;

  std::vector<Tensor>& params() { return params_; }
  const std::vector<Tensor>& params() const { return params_; }

 private:
  Tensor gcn_weight_;
  Tensor head_weight_;
  Tensor head_bias_;
  std::vector<Tensor> params_;
};

// Feature rows gathered into a constant tensor.
Tensor feature_rows(const FeatureMatrix& x, const std::vector<int>& nodes);

}  // namespace grapes
