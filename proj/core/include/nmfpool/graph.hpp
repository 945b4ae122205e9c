#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nmfpool/matrix.hpp"

namespace nmfpool {

// One classification sample. Edges are undirected, deduplicated, stored once
// with first < second, no self-loops.
struct Graph {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;
  std::optional<std::vector<int>> node_labels;
  std::optional<std::vector<std::vector<double>>> node_attributes;
  int graph_label = 0;
};

struct FeatureSpec {
  enum class Mode { kOneHotLabels, kDegree, kConstantOne };
  Mode mode = Mode::kConstantOne;
  std::vector<int> label_vocabulary;  // sorted, dataset-wide
  int degree_cap = 10;
};

// Symmetric 0/1 adjacency with zero diagonal.
DenseMatrix adjacency(const Graph& g);

// D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
DenseMatrix normalize_adjacency(const DenseMatrix& a);

// Materializes the initial node signal matrix (n x d).
DenseMatrix node_features(const Graph& g, const FeatureSpec& spec);

}  // namespace nmfpool
