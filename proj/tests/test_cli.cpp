#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <regex>
#include <string>

#include <json.hpp>

#include "nmfpool/commands.hpp"
#include "nmfpool/graph.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = NMFPOOL_CLI_PATH;
const std::string kDataDir = NMFPOOL_TEST_DATA_DIR;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>&1";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    res.output.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string scrub_timing(std::string text) {
  return std::regex_replace(text, std::regex("\"seconds\": [0-9.eE+-]+"),
                            "\"seconds\": X");
}

}  // namespace

TEST_CASE("stats on the toy fixture") {
  const auto res =
      run_cli("stats --dataset-dir " + kDataDir + " --dataset TOY2 --pool-fraction 0.5");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.output);
  CHECK(j["graphs"] == 2);
  CHECK(j["classes"] == 2);
  CHECK(j["avg_nodes"] == doctest::Approx(2.5));
  CHECK(j["avg_edges"] == doctest::Approx(1.5));
  CHECK(j["k1"] == 1);
}

TEST_CASE("stats failure modes") {
  CHECK(run_cli("stats --dataset-dir " + kDataDir + " --dataset NOPE").exit_code == 2);
  CHECK(run_cli("stats --dataset TOY2 --no-such-flag 1").exit_code == 1);
}

TEST_CASE("gradcheck subcommand and its self-test") {
  const auto ok = run_cli("gradcheck --seed 3");
  REQUIRE(ok.exit_code == 0);
  const json j = json::parse(ok.output);
  CHECK(j["pass"] == true);
  CHECK(j["max_rel_error"].get<double>() < 1e-5);
  CHECK(j["checks"].size() == 5);

  const auto corrupt = run_cli("gradcheck --seed 3 --corrupt");
  CHECK(corrupt.exit_code != 0);
  CHECK(json::parse(corrupt.output)["pass"] == false);
}

TEST_CASE("cv end-to-end on a synthetic TU dataset") {
  const fs::path dir = fs::temp_directory_path() / "nmfpool_cli_ds";
  fs::remove_all(dir);
  testutil::write_tu_files(testutil::rings_vs_stars(12), dir.string());

  const std::string args = "cv --dataset-dir " + dir.string() +
                           " --dataset RINGSTAR --layers 2 --hidden 16"
                           " --max-epochs 15 --batch 8 --seed 5";
  const auto res = run_cli(args);
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.output);
  CHECK(j["dataset"] == "RINGSTAR");
  REQUIRE(j["folds"].size() == 3);

  double mean = 0.0;
  for (const auto& fold : j["folds"]) mean += fold["test_accuracy"].get<double>();
  CHECK(j["mean_accuracy"].get<double>() ==
        doctest::Approx(mean / 3.0).epsilon(1e-9));

  // byte-identical reruns modulo timing
  const auto again = run_cli(args);
  REQUIRE(again.exit_code == 0);
  CHECK(scrub_timing(res.output) == scrub_timing(again.output));

  fs::remove_all(dir);
}

TEST_CASE("cv with a pooling layer") {
  const fs::path dir = fs::temp_directory_path() / "nmfpool_cli_pool_ds";
  fs::remove_all(dir);
  testutil::write_tu_files(testutil::rings_vs_stars(8), dir.string());

  const auto res = run_cli("cv --dataset-dir " + dir.string() +
                           " --dataset RINGSTAR --pools 3 --hidden 16"
                           " --max-epochs 10 --batch 8 --seed 5");
  REQUIRE(res.exit_code == 0);
  const json j = json::parse(res.output);
  CHECK(j["config"]["pool_ks"] == json::array({3}));
  CHECK(j["config"]["conv_layers"] == 2);
  fs::remove_all(dir);
}

TEST_CASE("coarsen emits round-trip-consistent files") {
  const fs::path out = fs::temp_directory_path() / "nmfpool_coarsen_out";
  fs::remove_all(out);

  const auto res = run_cli("coarsen --dataset-dir " + kDataDir +
                           " --dataset TOY2 --pools 2 --seed 1 --out " + out.string());
  REQUIRE(res.exit_code == 0);

  using namespace nmfpool;
  const DatasetBundle bundle = parse_tu_dataset(kDataDir, "TOY2");
  for (std::size_t gi = 0; gi < bundle.graphs.size(); ++gi) {
    const fs::path dir = out / ("graph_" + std::to_string(gi)) / "level_0";
    REQUIRE(fs::exists(dir / "A.txt"));
    REQUIRE(fs::exists(dir / "S.txt"));

    const DenseMatrix a_out = read_matrix_file((dir / "A.txt").string());
    const DenseMatrix s = read_matrix_file((dir / "S.txt").string());
    CHECK(max_abs_diff(a_out, transpose(a_out)) < 1e-10);

    // recompute S^T A S from the parsed graph and the emitted assignment
    const DenseMatrix a_in = normalize_adjacency(adjacency(bundle.graphs[gi]));
    CHECK(s.rows() == (std::size_t)bundle.graphs[gi].num_nodes);
    DenseMatrix recon = matmul(transpose(s), matmul(a_in, s));
    recon = scaled(add(recon, transpose(recon)), 0.5);
    CHECK(max_abs_diff(recon, a_out) < 1e-9);
  }
  fs::remove_all(out);
}
