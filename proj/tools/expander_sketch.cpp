// Command-line front end: generate expander graphs, certify their spectra,
// search inner codes, assemble measurement matrices, run basis-pursuit
// recovery, and drive seeded end-to-end experiments.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "expsketch/analysis.hpp"
#include "expsketch/experiment.hpp"
#include "expsketch/graphs.hpp"
#include "expsketch/inner_code.hpp"
#include "expsketch/recovery.hpp"
#include "expsketch/tanner.hpp"
#include "expsketch/util.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace expsketch;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  double lp_tol = 1e-8;
  std::uint64_t budget = 1u << 20;
  bool json_stdout = false;
};

void emit(const GlobalOpts& g, const std::string& json_text, const std::string& human) {
  if (g.json_stdout)
    std::cout << json_text << std::endl;
  else
    std::cout << human << std::endl;
}

int cmd_gen_graph(const GlobalOpts& g, int n, int d, const std::string& out,
                  double eig_tol, long eig_iters) {
  if (n > 0 && d > 0 && (static_cast<long long>(n) * d) % 2 != 0) {
    std::cerr << "error: N*d must be even (N=" << n << ", d=" << d
              << " gives an odd number of half-edges)" << std::endl;
    return 2;
  }
  RegularGraph graph = random_regular(n, d, g.seed);
  SpectralEstimate est = certify_expansion(graph, eig_tol, eig_iters);
  double lambda_hat = est.lambda_hat;
  write_graph_file(graph, out);

  ordered_json cert;
  cert["N"] = n;
  cert["d"] = d;
  cert["seed"] = g.seed;
  cert["tol"] = eig_tol;
  cert["lambda_hat"] = lambda_hat;
  cert["certified_lambda"] = graph.certified_lambda.value();
  cert["iterations"] = est.iterations;
  cert["residual"] = est.residual;
  ordered_json hashes;
  hashes["params"] = fnv1a64_hex(std::to_string(n) + " " + std::to_string(d) + " " +
                                 std::to_string(g.seed));
  hashes["graph"] = file_hash_hex(out);
  cert["input_hashes"] = hashes;
  atomic_write_file(out + ".cert.json", cert.dump(2) + "\n");
  emit(g, cert.dump(2),
       "wrote " + out + " (lambda_hat=" + std::to_string(lambda_hat) +
           ", certified " + std::to_string(graph.certified_lambda.value()) + ")");
  return 0;
}

int cmd_find_inner_code(const GlobalOpts& g, int d, double delta0, double rho0,
                        int weight_cap, int row_cap, int attempts, const std::string& out) {
  if (weight_cap <= 0)
    weight_cap = static_cast<int>(std::ceil(100.0 * std::log2(1.0 / delta0)));
  if (row_cap <= 0) {
    double cap = std::ceil(100.0 * delta0 * std::log2(1.0 / delta0) * d);
    row_cap = static_cast<int>(std::min<double>(d, std::max(1.0, cap)));
  }
  InnerCode code = search_inner_code(d, delta0, rho0, weight_cap, row_cap, attempts,
                                     g.seed, g.lp_tol, g.budget);
  write_inner_code_file(code, out);

  RnspOutcome audit = verify_rnsp(code.matrix.to_dense(), code.order(), code.rho0,
                                  code.tau0, g.lp_tol, g.budget);
  if (!audit.certified) throw std::runtime_error("internal error: found code failed its audit");
  ordered_json meta;
  meta["k"] = code.k;
  meta["d"] = code.d;
  meta["delta0"] = code.delta0;
  meta["rho0"] = code.rho0;
  meta["tau0"] = code.tau0;
  meta["column_weight"] = code.column_weight;
  meta["seed"] = g.seed;
  meta["certificate"] = ordered_json::parse(certificate_to_json(audit.certificate));
  ordered_json hashes;
  hashes["params"] = fnv1a64_hex(std::to_string(d) + " " + std::to_string(delta0) + " " +
                                 std::to_string(rho0) + " " + std::to_string(g.seed));
  hashes["inner_code"] = file_hash_hex(out);
  meta["input_hashes"] = hashes;
  atomic_write_file(out + ".cert.json", meta.dump(2) + "\n");
  emit(g, meta.dump(2),
       "wrote " + out + " (k=" + std::to_string(code.k) + ", tau0=" + std::to_string(code.tau0) + ")");
  return 0;
}

int cmd_build(const GlobalOpts& g, const std::string& graph_path,
              const std::string& code_path, const std::string& out) {
  RegularGraph graph = read_graph_file(graph_path);
  fs::path cert_path = graph_path + ".cert.json";
  std::optional<std::uint64_t> graph_seed;
  if (fs::exists(cert_path)) {
    ordered_json cert = ordered_json::parse(read_text_file(cert_path.string()));
    if (cert.contains("certified_lambda") && cert["certified_lambda"].is_number())
      graph.certified_lambda = cert["certified_lambda"].get<double>();
    if (cert.contains("seed") && cert["seed"].is_number())
      graph_seed = cert["seed"].get<std::uint64_t>();
  }
  InnerCode code = read_inner_code_file(code_path);
  TannerMatrix tanner = assemble(double_cover(graph), code);
  export_matrix_market(tanner.matrix, out);
  std::string prov = provenance_json(graph, code, graph_seed,
                                     {{"graph", file_hash_hex(graph_path)},
                                      {"inner_code", file_hash_hex(code_path)}});
  atomic_write_file(out + ".provenance.json", prov);
  StructureReport rep = structure_report(tanner.matrix);
  ordered_json j = ordered_json::parse(prov);
  j["rows"] = rep.rows;
  j["cols"] = rep.cols;
  j["nnz"] = rep.nnz;
  emit(g, j.dump(2),
       "wrote " + out + " (" + std::to_string(rep.rows) + "x" + std::to_string(rep.cols) +
           ", nnz=" + std::to_string(rep.nnz) + ")");
  return 0;
}

Vec parse_vector_file(const std::string& path, const char* key) {
  ordered_json j = ordered_json::parse(read_text_file(path));
  if (j.is_array()) return j.get<Vec>();
  if (j.contains(key)) return j.at(key).get<Vec>();
  throw std::runtime_error(std::string(path) + ": expected a JSON array or an object with \"" +
                           key + "\"");
}

int cmd_recover(const GlobalOpts& g, std::string matrix_path, std::string y_path,
                double eta, int s, const std::string& instance_path,
                const std::string& x_true_path, double rho, double tau,
                const std::string& out) {
  Vec y;
  std::optional<Vec> x_true;
  std::vector<std::pair<std::string, std::string>> hashes;
  if (!instance_path.empty()) {
    ordered_json inst = ordered_json::parse(read_text_file(instance_path));
    fs::path base = fs::path(instance_path).parent_path();
    matrix_path = (base / inst.at("matrix_path").get<std::string>()).string();
    y = inst.at("y").get<Vec>();
    eta = inst.at("eta").get<double>();
    if (inst.contains("s")) s = inst.at("s").get<int>();
    if (inst.contains("x_true")) x_true = inst.at("x_true").get<Vec>();
    hashes.emplace_back("instance", file_hash_hex(instance_path));
  } else {
    if (matrix_path.empty() || y_path.empty())
      throw std::invalid_argument("recover: need --instance, or --matrix and --y");
    y = parse_vector_file(y_path, "y");
    hashes.emplace_back("y", file_hash_hex(y_path));
  }
  hashes.emplace_back("matrix", file_hash_hex(matrix_path));
  if (!x_true_path.empty()) {
    x_true = parse_vector_file(x_true_path, "x_true");
    hashes.emplace_back("x_true", file_hash_hex(x_true_path));
  }

  // recovery constants: flags win, else the matrix provenance sidecar
  std::optional<std::pair<double, double>> constants;
  if (rho > 0.0 && tau > 0.0) constants = {{rho, tau}};
  if (!constants) {
    fs::path prov_path = matrix_path + ".provenance.json";
    if (fs::exists(prov_path)) {
      ordered_json prov = ordered_json::parse(read_text_file(prov_path.string()));
      if (prov.contains("rho0") && prov.contains("tau0"))
        constants = lift_constants(prov["rho0"].get<double>(), prov["tau0"].get<double>());
    }
  }

  SparseBinaryMatrix matrix = import_matrix_market(matrix_path);
  RecoveryResult rec = l1_minimize(matrix.to_dense(), y, eta, g.lp_tol);

  ordered_json j;
  j["z"] = rec.z;
  j["objective"] = rec.objective;
  j["residual"] = rec.residual;
  bool pass = rec.residual <= eta + g.lp_tol;
  if (constants) {
    j["C1"] = 2.0 * (1.0 + constants->first) / (1.0 - constants->first);
    j["C2"] = 4.0 * constants->second / (1.0 - constants->first);
  } else {
    j["C1"] = nullptr;
    j["C2"] = nullptr;
  }
  if (x_true) {
    if (s <= 0) throw std::invalid_argument("recover: --s is required when ground truth is given");
    if (!constants)
      throw std::invalid_argument(
          "recover: need --rho/--tau or a provenance sidecar to check the guarantee");
    GuaranteeReport rep = guarantee_check(rec.z, *x_true, s, eta, constants->first,
                                          constants->second);
    j["guarantee_slack"] = rep.rhs - rep.lhs;
    pass = rep.pass;
  }
  j["pass"] = pass;
  ordered_json jh;
  for (const auto& [name, hex] : hashes) jh[name] = hex;
  j["input_hashes"] = jh;
  atomic_write_file(out, j.dump(2) + "\n");
  emit(g, j.dump(2),
       "wrote " + out + " (objective=" + std::to_string(rec.objective) +
           ", residual=" + std::to_string(rec.residual) + ", pass=" + (pass ? "yes" : "no") + ")");
  return 0;
}

int cmd_experiment(const GlobalOpts& g, const std::string& config_path,
                   const std::string& out_dir_override) {
  ExperimentConfig cfg = ExperimentConfig::from_json_text(read_text_file(config_path));
  if (!out_dir_override.empty()) cfg.output_dir = out_dir_override;
  ExperimentOutcome outcome = run_experiment(cfg);
  emit(g, outcome.report_json,
       std::string("experiment ") +
           (outcome.any_guarantee_failure ? "had guarantee failures" : "passed all trials") +
           " (certified pipeline: " + (outcome.certified_pipeline ? "yes" : "no") +
           "); report in " + cfg.output_dir);
  if (outcome.failed_on_certified_pipeline) {
    std::cerr << "error: guarantee check failed on a certified pipeline" << std::endl;
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse binary measurement matrices from expander double covers, "
               "with basis-pursuit recovery"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "RNG seed for generation/search subcommands");
  app.add_option("--lp-tol", g.lp_tol, "LP feasibility/optimality tolerance");
  app.add_option("--budget", g.budget, "enumeration budget for certification (C(n,s)*2^s)");
  app.add_flag("--json", g.json_stdout, "print machine-readable JSON to stdout");

  auto* gen = app.add_subcommand("gen-graph", "sample a random regular graph and certify its spectrum");
  int gen_n = 0, gen_d = 0;
  double gen_tol = 1e-6;
  long gen_iters = 200000;
  std::string gen_out;
  gen->add_option("--n", gen_n, "vertex count N")->required();
  gen->add_option("--d", gen_d, "degree d")->required();
  gen->add_option("--out", gen_out, "output graph file")->required();
  gen->add_option("--eig-tol", gen_tol, "certification tolerance");
  gen->add_option("--eig-iters", gen_iters, "power iteration cap");

  auto* find = app.add_subcommand("find-inner-code", "search a small certified binary code");
  int find_d = 0, find_weight = 0, find_rows = 0, find_attempts = 300;
  double find_delta0 = 0.0, find_rho0 = 0.3;
  std::string find_out;
  find->add_option("--d", find_d, "columns d")->required();
  find->add_option("--delta0", find_delta0, "order fraction delta0 (order = floor(delta0*d))")->required();
  find->add_option("--rho0", find_rho0, "null space constant rho0, must be < 1/3");
  find->add_option("--weight-cap", find_weight, "exact ones per column (0 = ceil(100*log2(1/delta0)))");
  find->add_option("--row-cap", find_rows, "max rows k (0 = spec default capped at d)");
  find->add_option("--attempts", find_attempts, "candidates per row count");
  find->add_option("--out", find_out, "output inner code file")->required();

  auto* build = app.add_subcommand("build", "assemble the measurement matrix from graph + inner code");
  std::string build_graph, build_code, build_out;
  build->add_option("--graph", build_graph, "graph file")->required();
  build->add_option("--inner-code", build_code, "inner code file")->required();
  build->add_option("--out", build_out, "output Matrix Market file")->required();

  auto* rec = app.add_subcommand("recover", "basis-pursuit recovery from a sketch");
  std::string rec_matrix, rec_y, rec_instance, rec_xtrue, rec_out;
  double rec_eta = 0.0, rec_rho = 0.0, rec_tau = 0.0;
  int rec_s = 0;
  rec->add_option("--matrix", rec_matrix, "Matrix Market file");
  rec->add_option("--y", rec_y, "JSON file with the measurement vector");
  rec->add_option("--eta", rec_eta, "noise budget eta");
  rec->add_option("--instance", rec_instance, "instance JSON {matrix_path, y, eta, s, [x_true]}");
  rec->add_option("--s", rec_s, "sparsity order for the guarantee");
  rec->add_option("--x-true", rec_xtrue, "JSON file with ground truth (enables the guarantee check)");
  rec->add_option("--rho", rec_rho, "null space rho (else read from provenance sidecar)");
  rec->add_option("--tau", rec_tau, "null space tau (else read from provenance sidecar)");
  rec->add_option("--out", rec_out, "output result JSON")->required();

  auto* exp = app.add_subcommand("experiment", "seeded end-to-end recovery experiment");
  std::string exp_config, exp_outdir;
  exp->add_option("--config", exp_config, "experiment config JSON")->required();
  exp->add_option("--out-dir", exp_outdir, "override output_dir from the config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_graph(g, gen_n, gen_d, gen_out, gen_tol, gen_iters);
    if (find->parsed())
      return cmd_find_inner_code(g, find_d, find_delta0, find_rho0, find_weight, find_rows,
                                 find_attempts, find_out);
    if (build->parsed()) return cmd_build(g, build_graph, build_code, build_out);
    if (rec->parsed())
      return cmd_recover(g, rec_matrix, rec_y, rec_eta, rec_s, rec_instance, rec_xtrue,
                         rec_rho, rec_tau, rec_out);
    if (exp->parsed()) return cmd_experiment(g, exp_config, exp_outdir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
