#pragma once

// Shared synthetic dataset for the training and CLI tests: class 0 graphs
// are rings, class 1 graphs are stars. Degree features make the task easy,
// so a small model should reach high accuracy quickly.

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "nmfpool/dataset.hpp"

namespace testutil {

inline nmfpool::Graph ring_graph(int n, int label) {
  nmfpool::Graph g;
  g.num_nodes = n;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    g.edges.emplace_back(std::min(i, j), std::max(i, j));
  }
  g.graph_label = label;
  return g;
}

inline nmfpool::Graph star_graph(int n, int label) {
  nmfpool::Graph g;
  g.num_nodes = n;
  for (int i = 1; i < n; ++i) g.edges.emplace_back(0, i);
  g.graph_label = label;
  return g;
}

inline nmfpool::DatasetBundle rings_vs_stars(int per_class, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(6, 12);
  nmfpool::DatasetBundle bundle;
  bundle.name = "RINGSTAR";
  bundle.num_classes = 2;
  for (int i = 0; i < per_class; ++i) {
    bundle.graphs.push_back(ring_graph(size(rng), 0));
    bundle.graphs.push_back(star_graph(size(rng), 1));
  }
  bundle.stats = nmfpool::dataset_stats(bundle);
  return bundle;
}

// Writes the bundle in TU format so CLI subcommands can ingest it.
inline void write_tu_files(const nmfpool::DatasetBundle& bundle,
                           const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / bundle.name);
  const std::string base =
      (fs::path(dir) / bundle.name / bundle.name).string();

  std::ofstream a_file(base + "_A.txt");
  std::ofstream indicator(base + "_graph_indicator.txt");
  std::ofstream labels(base + "_graph_labels.txt");
  int offset = 1;  // node ids are global and 1-based
  for (std::size_t gi = 0; gi < bundle.graphs.size(); ++gi) {
    const auto& g = bundle.graphs[gi];
    for (const auto& [i, j] : g.edges) {
      a_file << offset + i << ", " << offset + j << "\n";
      a_file << offset + j << ", " << offset + i << "\n";
    }
    for (int v = 0; v < g.num_nodes; ++v) indicator << gi + 1 << "\n";
    labels << g.graph_label + 1 << "\n";
    offset += g.num_nodes;
  }
}

}  // namespace testutil
