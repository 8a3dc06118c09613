#include "grapes/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grapes/error.hpp"

namespace grapes {

int Graph::max_degree() const {
  int best = 0;
  for (int v = 0; v < num_nodes; ++v) best = std::max(best, degree(v));
  return best;
}

bool Graph::has_edge(int u, int v) const {
  return std::binary_search(neighbors_begin(u), neighbors_end(u), v);
}

Graph build_csr(const std::vector<std::pair<int, int>>& edge_list, int num_nodes) {
  if (num_nodes < 0) throw input_error("build_csr: negative node count");
  std::vector<std::pair<int, int>> directed;
  directed.reserve(edge_list.size() * 2);
  for (const auto& [u, v] : edge_list) {
    if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes) {
      throw input_error("build_csr: node id out of range: (" + std::to_string(u) + ", " +
                        std::to_string(v) + ") with num_nodes=" + std::to_string(num_nodes));
    }
    if (u == v) continue;  // self-loops are added at normalization time only
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.num_nodes = num_nodes;
  g.num_edges = static_cast<int>(directed.size() / 2);
  g.row_offsets.assign(num_nodes + 1, 0);
  g.col_indices.reserve(directed.size());
  for (const auto& [u, v] : directed) g.row_offsets[u + 1]++;
  for (int i = 0; i < num_nodes; ++i) g.row_offsets[i + 1] += g.row_offsets[i];
  for (const auto& [u, v] : directed) g.col_indices.push_back(v);
  return g;
}

std::vector<int> candidates(const Graph& g, const std::vector<int>& frontier) {
  std::vector<char> in_frontier(g.num_nodes, 0);
  for (int v : frontier) {
    if (v < 0 || v >= g.num_nodes) throw input_error("candidates: node id out of range");
    in_frontier[v] = 1;
  }
  std::vector<char> seen(g.num_nodes, 0);
  std::vector<int> out;
  for (int v : frontier) {
    for (const int* it = g.neighbors_begin(v); it != g.neighbors_end(v); ++it) {
      if (!in_frontier[*it] && !seen[*it]) {
        seen[*it] = 1;
        out.push_back(*it);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

NormalizedAdjacency normalize_full(const Graph& g) {
  const int n = g.num_nodes;
  std::vector<double> inv_sqrt_deg(n);
  for (int v = 0; v < n; ++v) inv_sqrt_deg[v] = 1.0 / std::sqrt(g.degree(v) + 1.0);

  NormalizedAdjacency adj;
  adj.mat.rows = n;
  adj.mat.cols = n;
  adj.mat.row_offsets.assign(n + 1, 0);
  adj.mat.col_indices.reserve(g.col_indices.size() + n);
  adj.mat.values.reserve(g.col_indices.size() + n);
  for (int i = 0; i < n; ++i) {
    bool diag_placed = false;
    for (const int* it = g.neighbors_begin(i); it != g.neighbors_end(i); ++it) {
      if (!diag_placed && *it > i) {
        adj.mat.col_indices.push_back(i);
        adj.mat.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[i]);
        diag_placed = true;
      }
      adj.mat.col_indices.push_back(*it);
      adj.mat.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[*it]);
    }
    if (!diag_placed) {
      adj.mat.col_indices.push_back(i);
      adj.mat.values.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[i]);
    }
    adj.mat.row_offsets[i + 1] = static_cast<int>(adj.mat.col_indices.size());
  }
  return adj;
}

LayerAdjacency layer_adjacency(const Graph& g, const std::vector<int>& rows,
                               const std::vector<int>& cols) {
  LayerAdjacency block;
  block.rows = rows;
  block.cols = cols;

  std::vector<int> col_pos(g.num_nodes, -1);
  for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
    if (cols[j] < 0 || cols[j] >= g.num_nodes)
      throw input_error("layer_adjacency: column node id out of range");
    col_pos[cols[j]] = j;
  }

  const int m = static_cast<int>(rows.size());
  const int n = static_cast<int>(cols.size());
  block.mat.rows = m;
  block.mat.cols = n;
  block.mat.row_offsets.assign(m + 1, 0);

  std::vector<int> entry_cols;
  std::vector<int> scratch;
  for (int i = 0; i < m; ++i) {
    const int u = rows[i];
    if (u < 0 || u >= g.num_nodes) throw input_error("layer_adjacency: row node id out of range");
    scratch.clear();
    if (col_pos[u] >= 0) scratch.push_back(col_pos[u]);  // diagonal from A+I
    for (const int* it = g.neighbors_begin(u); it != g.neighbors_end(u); ++it) {
      if (col_pos[*it] >= 0) scratch.push_back(col_pos[*it]);
    }
    std::sort(scratch.begin(), scratch.end());
    entry_cols.insert(entry_cols.end(), scratch.begin(), scratch.end());
    block.mat.row_offsets[i + 1] = static_cast<int>(entry_cols.size());
  }
  block.mat.col_indices = std::move(entry_cols);

  // Within-block degrees; rows with no entries stay all-zero.
  std::vector<int> col_deg(n, 0);
  for (int j : block.mat.col_indices) col_deg[j]++;
  block.mat.values.resize(block.mat.col_indices.size());
  for (int i = 0; i < m; ++i) {
    const int row_deg = block.mat.row_offsets[i + 1] - block.mat.row_offsets[i];
    if (row_deg == 0) continue;
    const double ri = 1.0 / std::sqrt(static_cast<double>(row_deg));
    for (int e = block.mat.row_offsets[i]; e < block.mat.row_offsets[i + 1]; ++e) {
      block.mat.values[e] = ri / std::sqrt(static_cast<double>(col_deg[block.mat.col_indices[e]]));
    }
  }

  for (int j = 0; j < static_cast<int>(cols.size()); ++j) col_pos[cols[j]] = -1;
  return block;
}

namespace {

double jaccard(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() && b.empty()) return 1.0;  // identical (empty) sets
  size_t ia = 0, ib = 0, inter = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] == b[ib]) {
      ++inter;
      ++ia;
      ++ib;
    } else if (a[ia] < b[ib]) {
      ++ia;
    } else {
      ++ib;
    }
  }
  const size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

double edge_homophily(const Graph& g, const LabelData& labels) {
  if (g.num_edges == 0) throw input_error("edge_homophily: graph has no edges");
  if (labels.num_nodes() != g.num_nodes)
    throw input_error("edge_homophily: labels do not cover all nodes");

  double total = 0.0;
  for (int u = 0; u < g.num_nodes; ++u) {
    for (const int* it = g.neighbors_begin(u); it != g.neighbors_end(u); ++it) {
      const int v = *it;
      if (v <= u) continue;  // count each undirected edge once
      if (labels.task == LabelTask::MultiClass) {
        total += labels.class_ids[u] == labels.class_ids[v] ? 1.0 : 0.0;
      } else {
        total += jaccard(labels.label_sets[u], labels.label_sets[v]);
      }
    }
  }
  return total / g.num_edges;
}

}  // namespace grapes
