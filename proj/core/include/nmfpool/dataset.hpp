#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmfpool/graph.hpp"

namespace nmfpool {

struct DatasetStats {
  double avg_nodes = 0.0;
  double avg_edges = 0.0;
};

struct DatasetBundle {
  std::string name;
  std::vector<Graph> graphs;
  int num_classes = 0;
  std::vector<int> label_vocabulary;  // node label ids, sorted, dataset-wide
  DatasetStats stats;
  std::vector<std::string> warnings;
};

// k disjoint stratified index lists plus a per-fold validation holdout taken
// from each fold's training portion.
struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> folds;
  std::vector<std::vector<int>> val_holdout;
};

// Reads {name}_A.txt, {name}_graph_indicator.txt, {name}_graph_labels.txt and
// the optional node label / attribute files from root_dir/name/.
DatasetBundle parse_tu_dataset(const std::string& root_dir, const std::string& name);

DatasetStats dataset_stats(const DatasetBundle& bundle);

// k1 = floor(avg_nodes * p), k2 = floor(k1 / 2); first `depth` entries.
std::vector<int> pool_sizes(double avg_nodes, double p, int depth);

FoldPlan stratified_folds(const DatasetBundle& bundle, int k, std::uint64_t seed,
                          double val_fraction = 0.1);

// Training indices of one fold: everything outside the fold and its holdout.
std::vector<int> fold_train_indices(const DatasetBundle& bundle, const FoldPlan& plan,
                                    int fold);

// Default featurization: one-hot node labels when present, capped degree
// one-hot otherwise.
FeatureSpec default_feature_spec(const DatasetBundle& bundle, int degree_cap = 10);

}  // namespace nmfpool
