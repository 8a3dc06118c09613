#include "grapes/nets.hpp"

#include <algorithm>
#include <string>

#include "grapes/error.hpp"

namespace grapes {

Tensor feature_rows(const FeatureMatrix& x, const std::vector<int>& nodes) {
  std::vector<double> data;
  data.reserve(nodes.size() * x.cols);
  for (int v : nodes) {
    if (v < 0 || v >= x.rows) throw shape_error("feature_rows: node id out of range");
    const double* row = x.data.data() + static_cast<size_t>(v) * x.cols;
    data.insert(data.end(), row, row + x.cols);
  }
  return Tensor::constant(static_cast<int>(nodes.size()), x.cols, std::move(data));
}

// --- ClassifierGcn ----------------------------------------------------------

ClassifierGcn::ClassifierGcn(const GcnConfig& cfg, std::mt19937_64& rng) : cfg_(cfg) {
  if (cfg.num_layers < 1) throw config_error("ClassifierGcn: num_layers must be >= 1");
  if (cfg.input_dim <= 0 || cfg.output_dim <= 0 || cfg.hidden_dim <= 0)
    throw config_error("ClassifierGcn: dimensions must be positive");
  for (int l = 0; l < cfg.num_layers; ++l) {
    const int in = l == 0 ? cfg.input_dim : cfg.hidden_dim;
    const int out = l == cfg.num_layers - 1 ? cfg.output_dim : cfg.hidden_dim;
    weights_.push_back(glorot_param(in, out, rng));
  }
}

Tensor ClassifierGcn::forward(const SampledSubgraph& sub, const FeatureMatrix& x) const {
  const int depth = cfg_.num_layers;
  if (sub.depth() != depth || static_cast<int>(sub.layer_sets.size()) != depth + 1)
    throw shape_error("ClassifierGcn::forward: subgraph depth " + std::to_string(sub.depth()) +
                      " does not match network depth " + std::to_string(depth));
  if (x.cols != cfg_.input_dim)
    throw shape_error("ClassifierGcn::forward: feature width mismatch");

  Tensor h = feature_rows(x, sub.layer_sets[depth]);
  for (int t = 1; t <= depth; ++t) {
    const LayerAdjacency& block = sub.blocks[depth - t];  // block L-t+1
    if (block.mat.rows != static_cast<int>(sub.layer_sets[depth - t + 1].size()))
      throw shape_error("ClassifierGcn::forward: block rows do not match layer set");
    h = matmul(spmm_transposed(block.mat, h), weights_[t - 1]);
    if (t < depth) h = relu(h);
  }
  return h;
}

Tensor ClassifierGcn::forward_full(const NormalizedAdjacency& adj, const FeatureMatrix& x) const {
  if (x.cols != cfg_.input_dim)
    throw shape_error("ClassifierGcn::forward_full: feature width mismatch");
  Tensor h = Tensor::constant(x.rows, x.cols, x.data);
  for (int l = 0; l < cfg_.num_layers; ++l) {
    h = matmul(spmm(adj.mat, h), weights_[l]);
    if (l < cfg_.num_layers - 1) h = relu(h);
  }
  return h;
}

// --- SamplerGcn ---------------------------------------------------------------

SamplerGcn::SamplerGcn(const SamplerConfig& cfg, std::mt19937_64& rng) {
  cfg_ = cfg;
  if (cfg.num_layers < 1) throw config_error("SamplerGcn: num_layers must be >= 1");
  if (cfg.feature_dim <= 0 || cfg.indicator_dim < 2 || cfg.hidden_dim <= 0)
    throw config_error("SamplerGcn: bad dimensions");
  const int in0 = cfg.feature_dim + cfg.indicator_dim;
  for (int l = 0; l < cfg.num_layers; ++l) {
    const int in = l == 0 ? in0 : cfg.hidden_dim;
    self_weights_.push_back(glorot_param(in, cfg.hidden_dim, rng));
    neighbor_weights_.push_back(glorot_param(in, cfg.hidden_dim, rng));
  }
  head_weight_ = glorot_param(cfg.hidden_dim, 1, rng);
  head_bias_ = Tensor::zeros(1, 1, true);
  collect_params();
}

SamplerGcn SamplerGcn::zero_initialized(const SamplerConfig& cfg) {
  SamplerGcn net;
  net.cfg_ = cfg;
  const int in0 = cfg.feature_dim + cfg.indicator_dim;
  for (int l = 0; l < cfg.num_layers; ++l) {
    const int in = l == 0 ? in0 : cfg.hidden_dim;
    net.self_weights_.push_back(Tensor::zeros(in, cfg.hidden_dim, true));
    net.neighbor_weights_.push_back(Tensor::zeros(in, cfg.hidden_dim, true));
  }
  net.head_weight_ = Tensor::zeros(cfg.hidden_dim, 1, true);
  net.head_bias_ = Tensor::zeros(1, 1, true);
  net.collect_params();
  return net;
}

void SamplerGcn::collect_params() {
  params_.clear();
  for (size_t l = 0; l < self_weights_.size(); ++l) {
    params_.push_back(self_weights_[l]);
    params_.push_back(neighbor_weights_[l]);
  }
  params_.push_back(head_weight_);
  params_.push_back(head_bias_);
}

Tensor SamplerGcn::logits(const Graph& g, const FeatureMatrix& x, const std::vector<int>& targets,
                          const std::vector<int>& prev_sampled, int layer_index) const {
  if (layer_index < 1 || layer_index >= cfg_.indicator_dim)
    throw shape_error("SamplerGcn::logits: layer index outside indicator range");
  if (x.cols != cfg_.feature_dim) throw shape_error("SamplerGcn::logits: feature width mismatch");

  std::vector<int> frontier = targets;
  frontier.insert(frontier.end(), prev_sampled.begin(), prev_sampled.end());
  std::sort(frontier.begin(), frontier.end());
  frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());

  const std::vector<int> cand = candidates(g, frontier);
  if (cand.empty()) return Tensor::zeros(0, 1);

  // All scored nodes, ordered by id; frontier and candidates are disjoint.
  std::vector<int> scored = frontier;
  scored.insert(scored.end(), cand.begin(), cand.end());
  std::sort(scored.begin(), scored.end());

  std::vector<char> is_target(g.num_nodes, 0), is_prev(g.num_nodes, 0), is_cand(g.num_nodes, 0);
  for (int v : targets) is_target[v] = 1;
  for (int v : prev_sampled) is_prev[v] = 1;
  for (int v : cand) is_cand[v] = 1;

  const int width = cfg_.feature_dim + cfg_.indicator_dim;
  std::vector<double> aug(scored.size() * static_cast<size_t>(width), 0.0);
  for (size_t i = 0; i < scored.size(); ++i) {
    const int v = scored[i];
    double* row = aug.data() + i * width;
    std::copy_n(x.data.data() + static_cast<size_t>(v) * x.cols, x.cols, row);
    int slot = layer_index;  // candidates being scored
    if (is_target[v]) slot = 0;
    else if (is_prev[v]) slot = layer_index - 1;
    row[cfg_.feature_dim + slot] = 1.0;
  }
  Tensor h = Tensor::constant(static_cast<int>(scored.size()), width, std::move(aug));

  std::vector<int> frontier_pos, cand_pos;
  for (size_t i = 0; i < scored.size(); ++i) {
    if (is_target[scored[i]] || is_prev[scored[i]]) frontier_pos.push_back(static_cast<int>(i));
    if (is_cand[scored[i]]) cand_pos.push_back(static_cast<int>(i));
  }

  const LayerAdjacency block = layer_adjacency(g, scored, frontier);
  for (int l = 0; l < cfg_.num_layers; ++l) {
    Tensor from_frontier = spmm(block.mat, matmul(gather_rows(h, frontier_pos),
                                                  neighbor_weights_[l]));
    h = relu(add(matmul(h, self_weights_[l]), from_frontier));
  }
  Tensor all_logits = add_rowvec(matmul(h, head_weight_), head_bias_);
  return gather_rows(all_logits, cand_pos);
}

// --- ZNet ---------------------------------------------------------------------

ZNet::ZNet(int feature_dim, int hidden_dim, std::mt19937_64& rng) {
  if (feature_dim <= 0 || hidden_dim <= 0) throw config_error("ZNet: bad dimensions");
  gcn_weight_ = glorot_param(feature_dim, hidden_dim, rng);
  head_weight_ = glorot_param(hidden_dim, 1, rng);
  head_bias_ = Tensor::zeros(1, 1, true);
  params_ = {gcn_weight_, head_weight_, head_bias_};
}

Tensor ZNet::forward(const Graph& g, const FeatureMatrix& x,
                     const std::vector<int>& targets) const {
  if (targets.empty()) throw input_error("ZNet::forward: empty target set");
  std::vector<int> nodes = targets;
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  const LayerAdjacency block = layer_adjacency(g, nodes, nodes);
  Tensor h = relu(spmm(block.mat, matmul(feature_rows(x, nodes), gcn_weight_)));
  return add(matmul(mean_rows(h), head_weight_), head_bias_);
}

}  // namespace grapes
