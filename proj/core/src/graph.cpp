#include "nmfpool/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nmfpool {

DenseMatrix adjacency(const Graph& g) {
  if (g.num_nodes < 1) {
    throw std::invalid_argument("adjacency: graph must have at least one node");
  }
  DenseMatrix a(static_cast<std::size_t>(g.num_nodes),
                static_cast<std::size_t>(g.num_nodes));
  for (const auto& [i, j] : g.edges) {
    a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = 1.0;
    a(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = 1.0;
  }
  return a;
}

DenseMatrix normalize_adjacency(const DenseMatrix& a) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("normalize_adjacency: square matrix required, got " +
                                a.shape_str());
  }
  const std::size_t n = a.rows();
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 1.0;  // self-loop from A + I
    for (std::size_t j = 0; j < n; ++j) deg += a(i, j);
    inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
  }
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double hat = a(i, j) + (i == j ? 1.0 : 0.0);
      out(i, j) = hat * inv_sqrt_deg[i] * inv_sqrt_deg[j];
    }
  }
  return out;
}

DenseMatrix node_features(const Graph& g, const FeatureSpec& spec) {
  const std::size_t n = static_cast<std::size_t>(g.num_nodes);
  switch (spec.mode) {
    case FeatureSpec::Mode::kConstantOne:
      return DenseMatrix(n, 1, 1.0);

    case FeatureSpec::Mode::kOneHotLabels: {
      if (!g.node_labels) {
        throw std::invalid_argument("node_features: onehot mode requires node labels");
      }
      DenseMatrix x(n, spec.label_vocabulary.size());
      for (std::size_t i = 0; i < n; ++i) {
        const int label = (*g.node_labels)[i];
        auto it = std::lower_bound(spec.label_vocabulary.begin(),
                                   spec.label_vocabulary.end(), label);
        if (it == spec.label_vocabulary.end() || *it != label) {
          throw std::invalid_argument("node_features: node label " +
                                      std::to_string(label) + " not in vocabulary");
        }
        x(i, static_cast<std::size_t>(it - spec.label_vocabulary.begin())) = 1.0;
      }
      return x;
    }

    case FeatureSpec::Mode::kDegree: {
      if (spec.degree_cap < 1) {
        throw std::invalid_argument("node_features: degree_cap must be >= 1");
      }
      std::vector<int> degree(n, 0);
      for (const auto& [i, j] : g.edges) {
        ++degree[static_cast<std::size_t>(i)];
        ++degree[static_cast<std::size_t>(j)];
      }
      DenseMatrix x(n, static_cast<std::size_t>(spec.degree_cap) + 1);
      for (std::size_t i = 0; i < n; ++i) {
        x(i, static_cast<std::size_t>(std::min(degree[i], spec.degree_cap))) = 1.0;
      }
      return x;
    }
  }
  throw std::logic_error("node_features: unknown mode");
}

}  // namespace nmfpool
