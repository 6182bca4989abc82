#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

#include "expsketch/tanner.hpp"
#include "expsketch/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cli_path() {
  const char* env = std::getenv("EXPANDER_SKETCH_BIN");
  REQUIRE_MESSAGE(env != nullptr, "EXPANDER_SKETCH_BIN must point at the CLI binary");
  return env;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args, const std::string& capture_to = "") {
  std::string cmd = cli_path() + " " + args;
  if (!capture_to.empty()) cmd += " > " + capture_to + " 2>&1";
  else cmd += " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("gen-graph rejects odd N*d with exit code 2 and a parity message") {
  TempDir dir("expsketch_cli_parity");
  std::string log = dir.file("log.txt");
  int code = run("gen-graph --n 3 --d 1 --out " + dir.file("g.txt"), log);
  CHECK(code == 2);
  std::string text = expsketch::read_text_file(log);
  CHECK(text.find("even") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.file("g.txt")));
}

TEST_CASE("missing input files exit with a nonzero actionable error") {
  TempDir dir("expsketch_cli_missing");
  int code = run("build --graph " + dir.file("nope.txt") + " --inner-code " +
                 dir.file("nope2.txt") + " --out " + dir.file("a.mtx"), dir.file("log.txt"));
  CHECK(code == 1);
  std::string text = expsketch::read_text_file(dir.file("log.txt"));
  CHECK(text.find("nope") != std::string::npos);
}

TEST_CASE("the full pipeline runs end to end through the CLI") {
  TempDir dir("expsketch_cli_pipeline");
  const std::string graph = dir.file("graph.txt");
  const std::string code_file = dir.file("code.txt");
  const std::string matrix = dir.file("A.mtx");

  CHECK(run("--seed 11 gen-graph --n 10 --d 4 --out " + graph) == 0);
  CHECK(fs::exists(graph));
  CHECK(fs::exists(graph + ".cert.json"));
  auto cert = json::parse(expsketch::read_text_file(graph + ".cert.json"));
  CHECK(cert["N"] == 10);
  CHECK(cert["certified_lambda"].get<double>() < 4.0);

  CHECK(run("--seed 3 find-inner-code --d 4 --delta0 0.5 --rho0 0.3 --weight-cap 1 "
            "--row-cap 4 --attempts 500 --out " + code_file) == 0);
  CHECK(fs::exists(code_file));
  CHECK(fs::exists(code_file + ".cert.json"));

  CHECK(run("build --graph " + graph + " --inner-code " + code_file + " --out " + matrix) == 0);
  CHECK(fs::exists(matrix));
  CHECK(fs::exists(matrix + ".provenance.json"));
  auto prov = json::parse(expsketch::read_text_file(matrix + ".provenance.json"));
  CHECK(prov["N"] == 10);
  CHECK(prov["input_hashes"]["graph"] == expsketch::file_hash_hex(graph));

  // make a 1-sparse instance by hand: y = A e_j scaled
  expsketch::SparseBinaryMatrix a = expsketch::import_matrix_market(matrix);
  expsketch::Vec x(a.cols, 0.0);
  x[2] = 1.5;
  expsketch::Vec y = a.apply(x);
  json inst;
  inst["matrix_path"] = "A.mtx";
  inst["y"] = y;
  inst["eta"] = 0.0;
  inst["s"] = 1;
  inst["x_true"] = x;
  expsketch::atomic_write_file(dir.file("instance.json"), inst.dump());

  const std::string result = dir.file("result.json");
  CHECK(run("recover --instance " + dir.file("instance.json") + " --out " + result) == 0);
  auto res = json::parse(expsketch::read_text_file(result));
  CHECK(res["pass"].get<bool>());
  CHECK(res["residual"].get<double>() <= 1e-8);
  CHECK(res["C1"].is_number());  // constants lifted from the provenance sidecar
  expsketch::Vec z = res["z"].get<expsketch::Vec>();
  REQUIRE(z.size() == x.size());
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(z[i] == doctest::Approx(x[i]).epsilon(1e-7));
}

TEST_CASE("recover accepts direct flags and honors the noise budget") {
  TempDir dir("expsketch_cli_recover_flags");
  const std::string graph = dir.file("graph.txt");
  const std::string code_file = dir.file("code.txt");
  const std::string matrix = dir.file("A.mtx");
  REQUIRE(run("--seed 11 gen-graph --n 10 --d 4 --out " + graph) == 0);
  REQUIRE(run("--seed 3 find-inner-code --d 4 --delta0 0.5 --rho0 0.3 --weight-cap 1 "
              "--row-cap 4 --attempts 500 --out " + code_file) == 0);
  REQUIRE(run("build --graph " + graph + " --inner-code " + code_file + " --out " + matrix) == 0);

  expsketch::SparseBinaryMatrix a = expsketch::import_matrix_market(matrix);
  expsketch::Vec x(a.cols, 0.0);
  x[5] = -2.0;
  expsketch::Vec y = a.apply(x);
  // perturb within an eta budget of 0.4
  y[0] += 0.15;
  y[1] -= 0.15;
  json jy;
  jy["y"] = y;
  expsketch::atomic_write_file(dir.file("y.json"), jy.dump());

  const std::string result = dir.file("result.json");
  CHECK(run("recover --matrix " + matrix + " --y " + dir.file("y.json") +
            " --eta 0.4 --out " + result) == 0);
  auto res = json::parse(expsketch::read_text_file(result));
  CHECK(res["residual"].get<double>() <= 0.4 + 1e-8);
  CHECK(res["pass"].get<bool>());
  CHECK(res["objective"].get<double>() <= 2.0 + 1e-6);  // never worse than x itself
}

TEST_CASE("experiment subcommand writes a report and exits zero on success") {
  TempDir dir("expsketch_cli_experiment");
  json cfg;
  cfg["N"] = 6;
  cfg["d"] = 4;
  cfg["delta"] = 0.0625;
  cfg["seed"] = 5;
  cfg["trials"] = 2;
  cfg["eta_list"] = {0.0};
  cfg["output_dir"] = (dir.path / "out").string();
  cfg["attempts"] = 400;
  expsketch::atomic_write_file(dir.file("config.json"), cfg.dump());

  const std::string stdout_file = dir.file("stdout.json");
  CHECK(run("--json experiment --config " + dir.file("config.json"), stdout_file) == 0);
  CHECK(fs::exists(dir.path / "out" / "report.json"));
  auto printed = json::parse(expsketch::read_text_file(stdout_file));
  CHECK(printed.contains("deterministic"));
  auto report = json::parse(expsketch::read_text_file((dir.path / "out" / "report.json").string()));
  CHECK(report["deterministic"] == printed["deterministic"]);
}
