#include "nmfpool/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nmfpool {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void parse_fail(const std::string& file, std::size_t line,
                             const std::string& why) {
  throw std::runtime_error("parse error: " + file + ":" + std::to_string(line) + ": " +
                           why);
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Reads a text file into trimmed lines; trailing blank lines dropped.
std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(strip(line));
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

long parse_long(const std::string& tok, const std::string& file, std::size_t line) {
  try {
    std::size_t pos = 0;
    long v = std::stol(tok, &pos);
    if (pos != tok.size()) parse_fail(file, line, "trailing characters in '" + tok + "'");
    return v;
  } catch (const std::invalid_argument&) {
    parse_fail(file, line, "expected integer, got '" + tok + "'");
  } catch (const std::out_of_range&) {
    parse_fail(file, line, "integer out of range: '" + tok + "'");
  }
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(strip(tok));
  return out;
}

std::string locate(const std::string& root, const std::string& name,
                   const std::string& suffix, bool required) {
  const std::string nested = (fs::path(root) / name / (name + suffix)).string();
  if (fs::exists(nested)) return nested;
  const std::string flat = (fs::path(root) / (name + suffix)).string();
  if (fs::exists(flat)) return flat;
  if (required) {
    throw std::runtime_error("missing dataset file " + name + suffix + " under " + root);
  }
  return {};
}

}  // namespace

DatasetBundle parse_tu_dataset(const std::string& root_dir, const std::string& name) {
  DatasetBundle bundle;
  bundle.name = name;

  const std::string indicator_path = locate(root_dir, name, "_graph_indicator.txt", true);
  const std::string edges_path = locate(root_dir, name, "_A.txt", true);
  const std::string labels_path = locate(root_dir, name, "_graph_labels.txt", true);
  const std::string node_labels_path = locate(root_dir, name, "_node_labels.txt", false);
  const std::string node_attrs_path = locate(root_dir, name, "_node_attributes.txt", false);

  // Graph indicator: 1-based graph id per global node, monotone-contiguous.
  const auto indicator_lines = read_lines(indicator_path);
  const std::size_t total_nodes = indicator_lines.size();
  std::vector<int> node_graph(total_nodes);
  int num_graphs = 0;
  for (std::size_t t = 0; t < total_nodes; ++t) {
    const long gid = parse_long(indicator_lines[t], indicator_path, t + 1);
    if (gid < 1) parse_fail(indicator_path, t + 1, "graph id must be >= 1");
    if (t == 0 && gid != 1) parse_fail(indicator_path, 1, "graph ids must start at 1");
    if (t > 0 && (gid < node_graph[t - 1] || gid > node_graph[t - 1] + 1)) {
      parse_fail(indicator_path, t + 1, "graph indicator not monotone-contiguous");
    }
    node_graph[t] = static_cast<int>(gid);
    num_graphs = std::max(num_graphs, static_cast<int>(gid));
  }

  std::vector<int> first_node(num_graphs + 1, -1);  // global 0-based start per graph
  std::vector<int> graph_size(num_graphs, 0);
  for (std::size_t t = 0; t < total_nodes; ++t) {
    const int g = node_graph[t] - 1;
    if (first_node[g] == -1) first_node[g] = static_cast<int>(t);
    ++graph_size[g];
  }

  bundle.graphs.resize(num_graphs);
  for (int g = 0; g < num_graphs; ++g) bundle.graphs[g].num_nodes = graph_size[g];

  // Edges: one "i, j" per line, 1-based global ids; directed duplicates merged.
  std::vector<std::map<std::pair<int, int>, int>> edge_count(num_graphs);
  const auto edge_lines = read_lines(edges_path);
  std::size_t dropped_self_loops = 0;
  for (std::size_t ln = 0; ln < edge_lines.size(); ++ln) {
    if (edge_lines[ln].empty()) continue;
    const auto toks = split_commas(edge_lines[ln]);
    if (toks.size() != 2) parse_fail(edges_path, ln + 1, "expected 'i, j'");
    const long u = parse_long(toks[0], edges_path, ln + 1);
    const long v = parse_long(toks[1], edges_path, ln + 1);
    if (u < 1 || v < 1 || u > static_cast<long>(total_nodes) ||
        v > static_cast<long>(total_nodes)) {
      parse_fail(edges_path, ln + 1, "node id out of range");
    }
    if (u == v) {
      ++dropped_self_loops;
      continue;
    }
    const int gu = node_graph[u - 1], gv = node_graph[v - 1];
    if (gu != gv) parse_fail(edges_path, ln + 1, "edge crosses graph boundary");
    const int g = gu - 1;
    int a = static_cast<int>(u - 1) - first_node[g];
    int b = static_cast<int>(v - 1) - first_node[g];
    if (a > b) std::swap(a, b);
    ++edge_count[g][{a, b}];
  }
  std::size_t one_directional = 0;
  for (int g = 0; g < num_graphs; ++g) {
    for (const auto& [e, count] : edge_count[g]) {
      bundle.graphs[g].edges.push_back(e);
      if (count == 1) ++one_directional;
    }
  }
  if (one_directional > 0) {
    bundle.warnings.push_back(std::to_string(one_directional) +
                              " edge(s) listed in one direction only; symmetrized");
  }
  if (dropped_self_loops > 0) {
    bundle.warnings.push_back(std::to_string(dropped_self_loops) +
                              " self-loop(s) dropped");
  }

  // Graph labels, remapped to contiguous 0..C-1 in sorted raw order.
  const auto label_lines = read_lines(labels_path);
  if (label_lines.size() != static_cast<std::size_t>(num_graphs)) {
    parse_fail(labels_path, label_lines.size(),
               "expected " + std::to_string(num_graphs) + " graph labels, got " +
                   std::to_string(label_lines.size()));
  }
  std::vector<long> raw_labels(num_graphs);
  std::set<long> distinct;
  for (int g = 0; g < num_graphs; ++g) {
    raw_labels[g] = parse_long(label_lines[g], labels_path, g + 1);
    distinct.insert(raw_labels[g]);
  }
  std::map<long, int> remap;
  for (long raw : distinct) remap[raw] = static_cast<int>(remap.size());
  for (int g = 0; g < num_graphs; ++g) {
    bundle.graphs[g].graph_label = remap[raw_labels[g]];
  }
  bundle.num_classes = static_cast<int>(distinct.size());

  // Optional node labels.
  if (!node_labels_path.empty()) {
    const auto nl_lines = read_lines(node_labels_path);
    if (nl_lines.size() != total_nodes) {
      parse_fail(node_labels_path, nl_lines.size(), "node label count mismatch");
    }
    std::set<int> vocab;
    std::vector<std::vector<int>> per_graph(num_graphs);
    for (int g = 0; g < num_graphs; ++g) per_graph[g].reserve(graph_size[g]);
    for (std::size_t t = 0; t < total_nodes; ++t) {
      const int label =
          static_cast<int>(parse_long(nl_lines[t], node_labels_path, t + 1));
      per_graph[node_graph[t] - 1].push_back(label);
      vocab.insert(label);
    }
    for (int g = 0; g < num_graphs; ++g) {
      bundle.graphs[g].node_labels = std::move(per_graph[g]);
    }
    bundle.label_vocabulary.assign(vocab.begin(), vocab.end());
  }

  // Optional node attributes; unreadable content degrades to absent.
  if (!node_attrs_path.empty()) {
    try {
      const auto attr_lines = read_lines(node_attrs_path);
      if (attr_lines.size() != total_nodes) {
        throw std::runtime_error("node attribute count mismatch");
      }
      std::vector<std::vector<std::vector<double>>> per_graph(num_graphs);
      for (std::size_t t = 0; t < total_nodes; ++t) {
        std::vector<double> row;
        for (const auto& tok : split_commas(attr_lines[t])) {
          row.push_back(std::stod(tok));
        }
        per_graph[node_graph[t] - 1].push_back(std::move(row));
      }
      for (int g = 0; g < num_graphs; ++g) {
        bundle.graphs[g].node_attributes = std::move(per_graph[g]);
      }
    } catch (const std::exception& e) {
      bundle.warnings.push_back(std::string("node attributes ignored: ") + e.what());
    }
  }

  bundle.stats = dataset_stats(bundle);
  return bundle;
}

DatasetStats dataset_stats(const DatasetBundle& bundle) {
  if (bundle.graphs.empty()) throw std::invalid_argument("dataset_stats: empty bundle");
  DatasetStats s;
  for (const Graph& g : bundle.graphs) {
    s.avg_nodes += g.num_nodes;
    s.avg_edges += static_cast<double>(g.edges.size());
  }
  s.avg_nodes /= static_cast<double>(bundle.graphs.size());
  s.avg_edges /= static_cast<double>(bundle.graphs.size());
  return s;
}

std::vector<int> pool_sizes(double avg_nodes, double p, int depth) {
  if (p <= 0.0 || p >= 1.0) {
    throw std::invalid_argument("pool_sizes: fraction must be in (0, 1)");
  }
  if (depth < 1 || depth > 2) {
    throw std::invalid_argument("pool_sizes: depth must be 1 or 2");
  }
  const int k1 = static_cast<int>(std::floor(avg_nodes * p));
  const int k2 = k1 / 2;
  std::vector<int> out{k1};
  if (depth == 2) out.push_back(k2);
  for (int k : out) {
    if (k < 1) {
      throw std::invalid_argument("pool_sizes: fraction " + std::to_string(p) +
                                  " yields pool size < 1");
    }
  }
  return out;
}

FoldPlan stratified_folds(const DatasetBundle& bundle, int k, std::uint64_t seed,
                          double val_fraction) {
  if (k < 2) throw std::invalid_argument("stratified_folds: k must be >= 2");

  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < bundle.graphs.size(); ++i) {
    by_class[bundle.graphs[i].graph_label].push_back(static_cast<int>(i));
  }
  for (const auto& [cls, members] : by_class) {
    if (static_cast<int>(members.size()) < k) {
      throw std::invalid_argument("stratified_folds: class " + std::to_string(cls) +
                                  " has " + std::to_string(members.size()) +
                                  " members, fewer than k=" + std::to_string(k));
    }
  }

  std::mt19937_64 rng(seed);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);
  plan.val_holdout.resize(k);

  // Round-robin deal of each shuffled class; a rolling cursor spreads the
  // remainders across folds so every per-class histogram deviates by <= 1.
  int cursor = 0;
  std::map<int, std::vector<int>> shuffled = by_class;
  for (auto& [cls, members] : shuffled) {
    std::shuffle(members.begin(), members.end(), rng);
    for (int idx : members) {
      plan.folds[cursor % k].push_back(idx);
      ++cursor;
    }
    cursor %= k;
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());

  // Per-fold validation holdout, stratified over the training portion.
  for (int f = 0; f < k; ++f) {
    std::set<int> test_set(plan.folds[f].begin(), plan.folds[f].end());
    for (const auto& [cls, members] : shuffled) {
      std::vector<int> train;
      for (int idx : members) {
        if (!test_set.count(idx)) train.push_back(idx);
      }
      std::size_t take = static_cast<std::size_t>(
          std::floor(val_fraction * static_cast<double>(train.size())));
      if (take == 0 && train.size() >= 2) take = 1;
      if (take >= train.size()) take = train.size() - 1;
      plan.val_holdout[f].insert(plan.val_holdout[f].end(), train.begin(),
                                 train.begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(plan.val_holdout[f].begin(), plan.val_holdout[f].end());
  }
  return plan;
}

std::vector<int> fold_train_indices(const DatasetBundle& bundle, const FoldPlan& plan,
                                    int fold) {
  std::set<int> excluded(plan.folds[fold].begin(), plan.folds[fold].end());
  excluded.insert(plan.val_holdout[fold].begin(), plan.val_holdout[fold].end());
  std::vector<int> train;
  for (std::size_t i = 0; i < bundle.graphs.size(); ++i) {
    if (!excluded.count(static_cast<int>(i))) train.push_back(static_cast<int>(i));
  }
  return train;
}

FeatureSpec default_feature_spec(const DatasetBundle& bundle, int degree_cap) {
  FeatureSpec spec;
  const bool all_labeled =
      std::all_of(bundle.graphs.begin(), bundle.graphs.end(),
                  [](const Graph& g) { return g.node_labels.has_value(); });
  if (all_labeled && !bundle.label_vocabulary.empty()) {
    spec.mode = FeatureSpec::Mode::kOneHotLabels;
    spec.label_vocabulary = bundle.label_vocabulary;
  } else {
    spec.mode = FeatureSpec::Mode::kDegree;
    spec.degree_cap = degree_cap;
  }
  return spec;
}

}  // namespace nmfpool
