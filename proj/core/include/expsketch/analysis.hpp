#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "expsketch/graphs.hpp"
#include "expsketch/inner_code.hpp"
#include "expsketch/linalg.hpp"
#include "expsketch/tanner.hpp"

namespace expsketch {

struct PeelingStep {
  int index = 0;   // 1-based
  char side = 'L';  // 'L' on odd steps, 'R' on even
  std::vector<int> peeled;        // T_i: labels removed at this step
  std::vector<int> heavy_vertices;  // V_i: side vertices incident to the residual S_i
  std::size_t residual_size = 0;    // |S_i|
};

/// Alternating decomposition of an edge-label support into slices whose
/// side-degrees are all <= delta0*d. The slices partition the support.
struct Peeling {
  std::vector<int> initial_support;  // sorted labels
  double delta0 = 0.0;
  std::vector<PeelingStep> steps;
};

/// Peels S by repeatedly removing the edges whose current side endpoint has
/// degree <= delta0*d within the residual (left endpoints on odd steps,
/// right on even), until the residual is empty. Throws if the residual
/// stalls on both sides or the step count passes N*d, either of which means
/// the expansion hypotheses are badly violated or the input is malformed.
Peeling decompose_support(const DoubleCover& cover, const std::vector<int>& support_labels,
                          double delta0);

struct ContractionReport {
  bool hypotheses_ok = false;
  std::string failed_hypothesis;  // empty when hypotheses_ok
  bool pass = false;
  double worst_ratio = 0.0;        // max |V_{i+1}| / |V_i| over consecutive nonempty pairs
  double ratio_bound = 0.0;        // (lambda/2) / (delta0 d - delta d / delta0 - lambda/2)
  double vertex_bound = 0.0;       // delta N / delta0
  std::size_t max_heavy_vertices = 0;
  int steps = 0;
};

/// Quantitative contraction of the peeling sequence: under the hypotheses
/// delta0 = 2 sqrt(delta), d > 16/delta, lambda < 3 sqrt(d) (lambda being a
/// certified bound), checks |V_i| < delta N / delta0 at every step and
/// |V_{i+1}| < |V_i| / 3 (and the sharper lambda-dependent ratio) for every
/// consecutive pair. Refuses to assert anything when a hypothesis fails.
ContractionReport contraction_check(const Peeling& peeling, double lambda, int d, int n,
                                    double delta, double delta0);

/// (rho, tau) = (2 rho0 / (1 - rho0), tau0 / (1 - rho0)). Requires
/// rho0 < 1/3 so that the lifted rho stays below 1.
std::pair<double, double> lift_constants(double rho0, double tau0);

struct BlockInequalityReport {
  char side = 'L';  // side on which every degree is within the order
  double per_vertex_min_slack = 0.0;
  double summed_slack = 0.0;
  double rearranged_slack = 0.0;
  bool pass = false;  // all three slacks >= -1e-9
};

/// Numerically replays the per-vertex null space inequalities for the given
/// x and support: each vertex block, their sum, and the rearranged form
///   ||x_S||_1 <= rho0/(1+rho0) ||x||_1 + tau0/(1+rho0) sum_v ||C0 x_{Gamma(v)}||_1.
/// Requires deg(v, S) <= floor(delta0 d) for all v on at least one side.
BlockInequalityReport per_block_inequality_check(const DoubleCover& cover,
                                                 const InnerCode& code, const Vec& x,
                                                 const std::vector<int>& support_labels);

/// Direct verification of the assembled matrix's null space property;
/// delegates to verify_rnsp on the dense form. s = 0 is trivially certified.
/// Tiny instances only: refuses when C(cols, s) * 2^s exceeds the budget.
RnspOutcome certify_tanner_rnsp(const TannerMatrix& a, int s, double rho, double tau,
                                std::uint64_t budget, double lp_tol = 1e-8,
                                int threads = 0);

/// JSON array [{"i":..,"side":..,"T_size":..,"V_size":..}, ...] for reports.
std::string peeling_trace_json(const Peeling& peeling);

}  // namespace expsketch
