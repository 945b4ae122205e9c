#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nmfpool/commands.hpp"

namespace {

using nmfpool::ModelConfig;
using nmfpool::RunSpec;

// 0 success, 1 validation error, 2 runtime failure.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::vector<int> parse_pool_list(const std::string& pools) {
  std::vector<int> ks;
  std::stringstream ss(pools);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    ks.push_back(std::stoi(tok));
  }
  return ks;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NMF-based graph pooling: TU dataset stats, training and coarsening"};
  app.require_subcommand(1);

  RunSpec spec;
  std::string pools;
  std::string conv = "gcn";
  int layers = 1;

  if (const char* env = std::getenv("NMFPOOL_DATA")) spec.dataset_dir = env;

  auto add_dataset_flags = [&](CLI::App* cmd) {
    cmd->add_option("--dataset-dir", spec.dataset_dir,
                    "Dataset root (default: $NMFPOOL_DATA)");
    cmd->add_option("--dataset", spec.dataset_name, "Dataset name, e.g. ENZYMES")
        ->required();
  };
  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--layers", layers, "Number of graph convolution layers");
    cmd->add_option("--pools", pools, "Comma list of pool sizes, e.g. 8,4");
    cmd->add_option("--hidden", spec.config.hidden_dim, "Hidden width");
    cmd->add_option("--conv", conv, "Convolution kind: gcn or cheb:K");
    cmd->add_option("--folds", spec.folds, "Number of CV folds");
    cmd->add_option("--jobs", spec.jobs, "Fold worker pool size");
    cmd->add_option("--max-epochs", spec.config.max_epochs, "Epoch cap");
    cmd->add_option("--batch", spec.config.batch_size, "Mini-batch size in graphs");
    cmd->add_flag("--renormalize-pooled", spec.config.renormalize_pooled,
                  "Re-normalize pooled adjacency between layers");
  };

  auto* stats = app.add_subcommand("stats", "Dataset statistics and pool sizes");
  add_dataset_flags(stats);
  stats->add_option("--pool-fraction", spec.pool_fraction, "Fraction for k1");

  auto* cv = app.add_subcommand("cv", "Stratified cross-validation run");
  add_dataset_flags(cv);
  add_model_flags(cv);

  auto* train = app.add_subcommand("train", "Train a single fold");
  add_dataset_flags(train);
  add_model_flags(train);

  auto* coarsen = app.add_subcommand("coarsen", "Dump pooled adjacency/assignments");
  add_dataset_flags(coarsen);
  coarsen->add_option("--pools", pools, "Comma list of pool sizes")->required();

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gradcheck->add_flag("--corrupt", spec.corrupt, "Plant a gradient bug (self-test)");

  for (auto* cmd : {stats, cv, train, coarsen, gradcheck}) {
    cmd->add_option("--seed", spec.config.seed, "PRNG seed");
    cmd->add_option("--out", spec.output_path, "Output path (default: stdout)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    spec.config.pool_ks = parse_pool_list(pools);
    spec.config.pool_layers = static_cast<int>(spec.config.pool_ks.size());
    spec.config.conv_layers =
        spec.config.pool_layers > 0 ? spec.config.pool_layers + 1 : layers;
    if (conv == "gcn") {
      spec.config.conv_kind = ModelConfig::ConvKind::kGcn;
    } else if (conv.rfind("cheb:", 0) == 0) {
      spec.config.conv_kind = ModelConfig::ConvKind::kCheb;
      spec.config.cheb_order = std::stoi(conv.substr(5));
    } else {
      throw std::invalid_argument("unknown --conv value '" + conv +
                                  "': expected gcn or cheb:K");
    }

    if (stats->parsed()) {
      spec.command = "stats";
      emit(nmfpool::cmd_stats(spec), spec.output_path);
    } else if (cv->parsed()) {
      spec.command = "cv";
      emit(nmfpool::cmd_cv(spec), spec.output_path);
    } else if (train->parsed()) {
      spec.command = "train";
      emit(nmfpool::cmd_train(spec), spec.output_path);
    } else if (coarsen->parsed()) {
      spec.command = "coarsen";
      const std::string out_dir = spec.output_path;
      if (out_dir.empty()) throw std::invalid_argument("coarsen requires --out");
      spec.output_path = out_dir;
      std::cout << nmfpool::cmd_coarsen(spec);
    } else if (gradcheck->parsed()) {
      spec.command = "gradcheck";
      bool pass = false;
      emit(nmfpool::cmd_gradcheck(spec, pass), spec.output_path);
      return pass ? kExitOk : kExitRuntime;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
