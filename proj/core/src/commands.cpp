#include "nmfpool/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nmfpool {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

double round6(double x) { return std::round(x * 1e6) / 1e6; }

DatasetBundle load_bundle(const RunSpec& spec) {
  if (spec.dataset_dir.empty() || spec.dataset_name.empty()) {
    throw std::invalid_argument("dataset directory and name are required");
  }
  return parse_tu_dataset(spec.dataset_dir, spec.dataset_name);
}

ModelConfig resolve_config(const RunSpec& spec, const DatasetBundle& bundle) {
  ModelConfig cfg = spec.config;
  cfg.feature_spec = default_feature_spec(bundle);
  validate_config(cfg);
  return cfg;
}

json config_json(const ModelConfig& cfg) {
  json j;
  j["conv_layers"] = cfg.conv_layers;
  j["pool_layers"] = cfg.pool_layers;
  j["pool_ks"] = cfg.pool_ks;
  j["hidden_dim"] = cfg.hidden_dim;
  j["conv"] = cfg.conv_kind == ModelConfig::ConvKind::kGcn
                  ? "gcn"
                  : "cheb:" + std::to_string(cfg.cheb_order);
  j["lr0"] = round6(cfg.lr0);
  j["lr_decay"] = round6(cfg.lr_decay);
  j["patience"] = cfg.patience;
  j["max_epochs"] = cfg.max_epochs;
  j["batch_size"] = cfg.batch_size;
  j["seed"] = cfg.seed;
  j["renormalize_pooled"] = cfg.renormalize_pooled;
  return j;
}

json report_json(const TrainReport& report) {
  json j;
  j["dataset"] = report.dataset;
  j["config"] = config_json(report.config_echo);
  j["folds"] = json::array();
  for (const auto& fm : report.per_fold) {
    json fold;
    fold["test_accuracy"] = round6(fm.test_accuracy);
    fold["epochs"] = fm.epochs_run;
    fold["best_epoch"] = fm.best_epoch;
    fold["seconds"] = round6(fm.seconds);
    j["folds"].push_back(fold);
  }
  j["mean_accuracy"] = round6(report.mean_accuracy);
  j["std_over_folds"] = round6(report.std_accuracy);
  j["artifact_version"] = kArtifactVersion;
  return j;
}

}  // namespace

std::string cmd_stats(const RunSpec& spec) {
  const DatasetBundle bundle = load_bundle(spec);
  json j;
  j["dataset"] = bundle.name;
  j["graphs"] = bundle.graphs.size();
  j["classes"] = bundle.num_classes;
  j["avg_nodes"] = round6(bundle.stats.avg_nodes);
  j["avg_edges"] = round6(bundle.stats.avg_edges);
  j["pool_fraction"] = round6(spec.pool_fraction);
  try {
    j["k1"] = pool_sizes(bundle.stats.avg_nodes, spec.pool_fraction, 1)[0];
    j["k2"] = pool_sizes(bundle.stats.avg_nodes, spec.pool_fraction, 2)[1];
  } catch (const std::invalid_argument& e) {
    j["pool_size_error"] = e.what();
  }
  j["warnings"] = bundle.warnings;
  return j.dump(2) + "\n";
}

std::string cmd_cv(const RunSpec& spec) {
  const DatasetBundle bundle = load_bundle(spec);
  const ModelConfig cfg = resolve_config(spec, bundle);
  const TrainReport report = cross_validate(bundle, cfg, spec.folds, spec.jobs);
  return report_json(report).dump(2) + "\n";
}

std::string cmd_train(const RunSpec& spec) {
  const DatasetBundle bundle = load_bundle(spec);
  const ModelConfig cfg = resolve_config(spec, bundle);
  const FoldPlan plan =
      stratified_folds(bundle, spec.folds, cfg.seed, cfg.val_fraction);
  const FoldMetrics fm = train_fold(bundle, plan, 0, cfg);

  json j;
  j["dataset"] = bundle.name;
  j["config"] = config_json(cfg);
  j["fold"] = 0;
  j["test_accuracy"] = round6(fm.test_accuracy);
  j["epochs"] = fm.epochs_run;
  j["best_epoch"] = fm.best_epoch;
  j["seconds"] = round6(fm.seconds);
  j["train_curve"] = json::array();
  j["val_curve"] = json::array();
  for (double v : fm.train_curve) j["train_curve"].push_back(round6(v));
  for (double v : fm.val_curve) j["val_curve"].push_back(round6(v));
  j["artifact_version"] = kArtifactVersion;
  return j.dump(2) + "\n";
}

std::string cmd_coarsen(const RunSpec& spec) {
  const DatasetBundle bundle = load_bundle(spec);
  if (spec.config.pool_ks.empty()) {
    throw std::invalid_argument("coarsen requires --pools");
  }
  if (spec.output_path.empty()) {
    throw std::invalid_argument("coarsen requires --out");
  }
  const FeatureSpec feature_spec = default_feature_spec(bundle);

  std::size_t files_written = 0;
  for (std::size_t gi = 0; gi < bundle.graphs.size(); ++gi) {
    const Graph& g = bundle.graphs[gi];
    DenseMatrix a = normalize_adjacency(adjacency(g));
    DenseMatrix z = node_features(g, feature_spec);
    for (std::size_t level = 0; level < spec.config.pool_ks.size(); ++level) {
      NmfConfig nmf_cfg;
      nmf_cfg.seed = spec.config.seed + gi * 131 + level;
      const PoolForward out =
          nmfpool_forward(a, z, spec.config.pool_ks[level], nmf_cfg);

      const fs::path dir = fs::path(spec.output_path) /
                           ("graph_" + std::to_string(gi)) /
                           ("level_" + std::to_string(level));
      fs::create_directories(dir);
      write_matrix_file((dir / "A.txt").string(), out.a_next);
      write_matrix_file((dir / "S.txt").string(), out.trace.s);
      files_written += 2;

      a = out.a_next;
      z = out.z_next;
    }
  }

  json j;
  j["dataset"] = bundle.name;
  j["graphs"] = bundle.graphs.size();
  j["levels"] = spec.config.pool_ks.size();
  j["files_written"] = files_written;
  j["output_path"] = spec.output_path;
  return j.dump(2) + "\n";
}

Graph gradcheck_toy_graph() {
  Graph g;
  g.num_nodes = 8;
  g.edges = {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {3, 4},
             {4, 5}, {5, 6}, {6, 7}, {4, 7}, {2, 6}};
  g.graph_label = 1;
  return g;
}

std::vector<std::pair<std::string, ModelConfig>> gradcheck_suite(std::uint64_t seed) {
  ModelConfig base;
  base.hidden_dim = 16;
  base.seed = seed;
  base.feature_spec.mode = FeatureSpec::Mode::kDegree;
  base.feature_spec.degree_cap = 3;

  std::vector<std::pair<std::string, ModelConfig>> suite;

  ModelConfig gc1 = base;
  gc1.conv_layers = 1;
  suite.emplace_back("1-gc", gc1);

  ModelConfig gc2 = base;
  gc2.conv_layers = 2;
  suite.emplace_back("2-gc", gc2);

  ModelConfig pool1 = base;
  pool1.conv_layers = 2;
  pool1.pool_layers = 1;
  pool1.pool_ks = {3};
  suite.emplace_back("2-gc-1-pool", pool1);

  ModelConfig pool2 = base;
  pool2.conv_layers = 3;
  pool2.pool_layers = 2;
  pool2.pool_ks = {3, 2};
  suite.emplace_back("3-gc-2-pool", pool2);

  ModelConfig cheb = base;
  cheb.conv_layers = 1;
  cheb.conv_kind = ModelConfig::ConvKind::kCheb;
  cheb.cheb_order = 3;
  suite.emplace_back("cheb-k3", cheb);

  return suite;
}

std::string cmd_gradcheck(const RunSpec& spec, bool& pass) {
  const Graph toy = gradcheck_toy_graph();
  constexpr double kTolerance = 1e-5;

  json checks = json::array();
  double worst = 0.0;
  for (const auto& [name, cfg] : gradcheck_suite(spec.config.seed)) {
    const double err = gradcheck_model(cfg, toy, 2, 1e-6, spec.corrupt);
    worst = std::max(worst, err);
    json c;
    c["name"] = name;
    c["max_rel_error"] = err;
    c["pass"] = err < kTolerance;
    checks.push_back(c);
  }

  pass = worst < kTolerance;
  json j;
  j["checks"] = checks;
  j["max_rel_error"] = worst;
  j["tolerance"] = kTolerance;
  j["pass"] = pass;
  return j.dump(2) + "\n";
}

void write_matrix_file(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty matrix file: " + path);
  DenseMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) {
      throw std::runtime_error("ragged matrix file: " + path);
    }
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace nmfpool
