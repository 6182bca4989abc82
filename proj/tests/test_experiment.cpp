#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "expsketch/experiment.hpp"
#include "expsketch/util.hpp"

using namespace expsketch;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config(const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.num_vertices = 6;
  cfg.degree = 4;
  cfg.delta = 0.0625;  // delta0 = 0.5, order 2; trial sparsity floor(delta*N*d) = 1
  cfg.seed = 5;
  cfg.trials = 3;
  cfg.eta_list = {0.0, 0.1};
  cfg.sparsity_model = "exact-sparse";
  cfg.output_dir = out_dir;
  cfg.attempts = 400;
  return cfg;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("experiment configs parse from JSON with defaults") {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(R"({
    "N": 10, "d": 4, "delta": 0.0625, "seed": 9, "trials": 2,
    "eta_list": [0.0], "output_dir": "/tmp/x"
  })");
  CHECK(cfg.num_vertices == 10);
  CHECK(cfg.degree == 4);
  CHECK(cfg.sparsity_model == "exact-sparse");
  CHECK(cfg.rho0 == doctest::Approx(0.3));
  cfg.validate();
}

TEST_CASE("experiment config validation names the broken field") {
  ExperimentConfig cfg = tiny_config("/tmp/out");
  cfg.delta = 0.001;  // floor(delta0*d) = 0
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("delta0"), std::invalid_argument);
  cfg = tiny_config("/tmp/out");
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config("/tmp/out");
  cfg.sparsity_model = "bogus";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_config("");
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("experiments write artifacts and a parsable report") {
  TempDir dir("expsketch_experiment_test");
  ExperimentConfig cfg = tiny_config(dir.path.string());
  ExperimentOutcome outcome = run_experiment(cfg);

  for (const char* name : {"graph.txt", "inner_code.txt", "inner_code.txt.cert.json",
                           "matrix.mtx", "matrix.mtx.provenance.json", "report.json"}) {
    CHECK(fs::exists(dir.path / name));
  }

  auto report = nlohmann::json::parse(outcome.report_json);
  REQUIRE(report.contains("deterministic"));
  REQUIRE(report.contains("timings"));
  const auto& det = report["deterministic"];
  CHECK(det["rows"].size() == 6);  // trials x eta values
  CHECK(det["pipeline"]["structure"]["rows"] == det["pipeline"]["k"].get<int>() * 2 * 6);
  CHECK(det["aggregate"]["total"] == 6);
  // paths and timings stay out of the deterministic section
  CHECK(outcome.deterministic_json.find(dir.path.string()) == std::string::npos);
  CHECK_FALSE(det.contains("timings"));

  auto prov = nlohmann::json::parse(
      read_text_file((dir.path / "matrix.mtx.provenance.json").string()));
  CHECK(prov["N"] == 6);
  CHECK(prov["input_hashes"].contains("graph"));
  CHECK(prov["input_hashes"]["graph"] ==
        file_hash_hex((dir.path / "graph.txt").string()));
}

TEST_CASE("reports are byte-identical across reruns of the same config") {
  TempDir dir_a("expsketch_experiment_det_a");
  TempDir dir_b("expsketch_experiment_det_b");
  ExperimentConfig cfg_a = tiny_config(dir_a.path.string());
  ExperimentConfig cfg_b = tiny_config(dir_b.path.string());
  cfg_b.threads = 2;  // worker count must not leak into results
  ExperimentOutcome a = run_experiment(cfg_a);
  ExperimentOutcome b = run_experiment(cfg_b);
  CHECK(a.deterministic_json == b.deterministic_json);
}

TEST_CASE("noiseless exact-sparse trials on a tiny pipeline recover exactly") {
  TempDir dir("expsketch_experiment_exact");
  ExperimentConfig cfg = tiny_config(dir.path.string());
  cfg.eta_list = {0.0};
  cfg.trials = 5;
  ExperimentOutcome outcome = run_experiment(cfg);
  auto det = nlohmann::json::parse(outcome.deterministic_json);
  for (const auto& row : det["rows"]) {
    CHECK(row["pass"].get<bool>());
    CHECK(row["err_linf"].get<double>() <= 1e-6);
  }
  CHECK_FALSE(outcome.failed_on_certified_pipeline);
}
