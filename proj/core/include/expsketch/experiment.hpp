#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "expsketch/graphs.hpp"
#include "expsketch/inner_code.hpp"

namespace expsketch {

/// End-to-end experiment: generate and certify a graph, search an inner
/// code, assemble the measurement matrix, then run recovery trials against
/// the l1/l1 guarantee.
struct ExperimentConfig {
  int num_vertices = 0;  // N
  int degree = 0;        // d
  double delta = 0.0;    // target sparsity fraction; delta0 = 2 sqrt(delta)
  std::uint64_t seed = 0;
  int trials = 1;
  // noise budgets as fractions of ||x||_1 (0 = noiseless)
  std::vector<double> eta_list{0.0};
  std::string sparsity_model = "exact-sparse";  // or "power-law"
  double lp_tol = 1e-8;
  std::string output_dir;

  // pipeline knobs
  double rho0 = 0.3;
  int weight_cap = 3;
  int row_cap = 0;  // 0 means d
  int attempts = 300;
  std::uint64_t cert_budget = 1u << 20;
  double eig_tol = 1e-6;
  long eig_iters = 200000;
  int threads = 0;  // 0 means EXPANDER_SKETCH_THREADS / hardware

  void validate() const;
  static ExperimentConfig from_json_text(const std::string& text);
};

struct ExperimentOutcome {
  std::string report_json;         // {"deterministic": {...}, "timings": {...}}
  std::string deterministic_json;  // the deterministic section alone, byte-stable per (config, seed)
  bool certified_pipeline = false;
  bool any_guarantee_failure = false;
  // nonzero exit is warranted iff both of the above hold
  bool failed_on_certified_pipeline = false;
};

/// Runs the pipeline, writes graph/inner-code/matrix artifacts plus
/// report.json into config.output_dir, and returns the report. Trials run on
/// a worker pool; every trial's randomness is derived from (seed, trial,
/// eta index), so reports are independent of scheduling. Timings and paths
/// live in the non-deterministic section only.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Provenance sidecar content: {N, d, lambda_certified, k, delta0, rho0,
/// tau0, seed} plus content hashes of the inputs it was built from.
std::string provenance_json(const RegularGraph& g, const InnerCode& code,
                            std::optional<std::uint64_t> seed,
                            const std::vector<std::pair<std::string, std::string>>& input_hashes);

}  // namespace expsketch
