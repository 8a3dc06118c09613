#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace grapes {

// Immutable undirected graph in CSR form. Symmetric storage: every edge
// {i,j} appears in both row i and row j. Self-loops are never stored; they
// enter only through normalization (A+I).
struct Graph {
  int num_nodes = 0;
  int num_edges = 0;  // undirected edge count
  std::vector<int> row_offsets;  // length num_nodes+1
  std::vector<int> col_indices;  // length 2*num_edges, sorted within each row

  int degree(int v) const { return row_offsets[v + 1] - row_offsets[v]; }
  int max_degree() const;

  // Neighbors of v as a contiguous range [begin, end).
  const int* neighbors_begin(int v) const { return col_indices.data() + row_offsets[v]; }
  const int* neighbors_end(int v) const { return col_indices.data() + row_offsets[v + 1]; }

  bool has_edge(int u, int v) const;
};

// General sparse real matrix in CSR form. Backs both the full normalized
// adjacency and per-layer adjacency blocks.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_offsets;
  std::vector<int> col_indices;
  std::vector<double> values;

  int nnz() const { return static_cast<int>(col_indices.size()); }
};

// Symmetric normalized adjacency with self-loops: entry (i,j) of
// (D+I)^{-1/2} (A+I) (D+I)^{-1/2}.
struct NormalizedAdjacency {
  SparseMatrix mat;  // square, num_nodes x num_nodes
};

// Normalized bipartite block between an ordered row node list and an ordered
// column node list. Entry (i,j) is nonzero iff the original graph has edge
// {rows[i], cols[j]} or rows[i] == cols[j]; values are symmetrically
// normalized by within-block degrees. Zero-degree rows stay all-zero.
struct LayerAdjacency {
  std::vector<int> rows;
  std::vector<int> cols;
  SparseMatrix mat;  // |rows| x |cols|
};

enum class LabelTask { MultiClass, MultiLabel };

// Task labels: one class id per node (multi-class) or a sorted label-id set
// per node (multi-label).
struct LabelData {
  LabelTask task = LabelTask::MultiClass;
  int num_classes = 0;
  std::vector<int> class_ids;                 // multi-class, size num_nodes
  std::vector<std::vector<int>> label_sets;   // multi-label, size num_nodes

  int num_nodes() const {
    return task == LabelTask::MultiClass ? static_cast<int>(class_ids.size())
                                         : static_cast<int>(label_sets.size());
  }
};

// Dense node feature matrix, row-major, one row per node.
struct FeatureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  double at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
  double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
};

// Builds a deduplicated, symmetrized CSR graph from an edge list. Self-loops
// are stripped. Throws on node ids outside [0, num_nodes).
Graph build_csr(const std::vector<std::pair<int, int>>& edge_list, int num_nodes);

// N(K) \ K, ordered by node id. K must contain valid, duplicate-free ids.
std::vector<int> candidates(const Graph& g, const std::vector<int>& frontier);

NormalizedAdjacency normalize_full(const Graph& g);

LayerAdjacency layer_adjacency(const Graph& g, const std::vector<int>& rows,
                               const std::vector<int>& cols);

// Multi-class: fraction of undirected edges whose endpoints share the class.
// Multi-label: mean edge-wise Jaccard similarity of the endpoint label sets
// (two empty sets count as identical). Throws on an edgeless graph.
double edge_homophily(const Graph& g, const LabelData& labels);

}  // namespace grapes
