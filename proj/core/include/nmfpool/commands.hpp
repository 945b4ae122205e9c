#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nmfpool/train.hpp"

namespace nmfpool {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Parsed invocation of one CLI subcommand.
struct RunSpec {
  std::string command;
  std::string dataset_dir;
  std::string dataset_name;
  ModelConfig config;
  double pool_fraction = 0.25;
  int folds = 3;
  int jobs = 1;
  std::string output_path;
  bool corrupt = false;  // gradcheck self-test
};

// Each command returns its JSON report; errors are thrown
// (std::invalid_argument for validation, std::runtime_error otherwise).
std::string cmd_stats(const RunSpec& spec);
std::string cmd_cv(const RunSpec& spec);
std::string cmd_train(const RunSpec& spec);
std::string cmd_coarsen(const RunSpec& spec);
std::string cmd_gradcheck(const RunSpec& spec, bool& pass);

// The fixed 8-node graph behind `gradcheck` and the gradcheck test suite.
Graph gradcheck_toy_graph();

// Named configs exercised by `gradcheck`: plain stacks, pooled stacks and a
// Chebyshev variant.
std::vector<std::pair<std::string, ModelConfig>> gradcheck_suite(std::uint64_t seed);

// Plain-text matrix io (one row per line, space separated).
void write_matrix_file(const std::string& path, const DenseMatrix& m);
DenseMatrix read_matrix_file(const std::string& path);

}  // namespace nmfpool
