#include "expsketch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace expsketch {

Peeling decompose_support(const DoubleCover& cover, const std::vector<int>& support_labels,
                          double delta0) {
  const long long total = static_cast<long long>(cover.num_vertices) * cover.degree;
  const double threshold = delta0 * cover.degree;
  if (threshold < 1.0)
    throw std::invalid_argument("decompose_support: need delta0 * d >= 1");

  Peeling peeling;
  peeling.delta0 = delta0;
  peeling.initial_support = support_labels;
  std::sort(peeling.initial_support.begin(), peeling.initial_support.end());
  for (std::size_t i = 0; i < peeling.initial_support.size(); ++i) {
    int lbl = peeling.initial_support[i];
    if (lbl < 1 || lbl > total)
      throw std::invalid_argument("decompose_support: label out of range");
    if (i > 0 && peeling.initial_support[i - 1] == lbl)
      throw std::invalid_argument("decompose_support: repeated label");
  }

  std::vector<int> current = peeling.initial_support;
  std::vector<int> deg(cover.num_vertices, 0);
  int stalls = 0;
  for (int step_index = 1; !current.empty(); ++step_index) {
    if (step_index > total)
      throw std::runtime_error("decompose_support: step count exceeded N*d, refusing to spin");
    const bool left_side = step_index % 2 == 1;

    std::fill(deg.begin(), deg.end(), 0);
    for (int lbl : current) {
      const CoverEdge& e = cover.edges[lbl - 1];
      ++deg[left_side ? e.left : e.right];
    }

    PeelingStep step;
    step.index = step_index;
    step.side = left_side ? 'L' : 'R';
    std::vector<int> residual;
    for (int lbl : current) {
      const CoverEdge& e = cover.edges[lbl - 1];
      if (deg[left_side ? e.left : e.right] > threshold)
        residual.push_back(lbl);
      else
        step.peeled.push_back(lbl);
    }
    std::vector<char> seen(cover.num_vertices, 0);
    for (int lbl : residual) {
      const CoverEdge& e = cover.edges[lbl - 1];
      int v = left_side ? e.left : e.right;
      if (!seen[v]) {
        seen[v] = 1;
        step.heavy_vertices.push_back(v);
      }
    }
    step.residual_size = residual.size();

    if (residual.size() == current.size()) {
      if (++stalls >= 2)
        throw std::runtime_error(
            "decompose_support: residual shrinks on neither side; peeling cannot terminate");
    } else {
      stalls = 0;
    }
    peeling.steps.push_back(std::move(step));
    current = std::move(residual);
  }
  return peeling;
}

ContractionReport contraction_check(const Peeling& peeling, double lambda, int d, int n,
                                    double delta, double delta0) {
  ContractionReport rep;
  auto fail = [&](const std::string& why) {
    rep.hypotheses_ok = false;
    rep.failed_hypothesis = why;
    rep.pass = false;
    return rep;
  };
  if (!(lambda > 0.0)) return fail("lambda must be a positive certified bound");
  if (!(delta > 0.0 && delta < 1.0)) return fail("delta must be in (0, 1)");
  if (std::abs(delta0 - 2.0 * std::sqrt(delta)) > 1e-9 * std::max(1.0, delta0))
    return fail("delta0 != 2*sqrt(delta)");
  if (!(d > 16.0 / delta)) return fail("d <= 16/delta");
  if (!(lambda < 3.0 * std::sqrt(static_cast<double>(d)))) return fail("lambda >= 3*sqrt(d)");
  rep.hypotheses_ok = true;

  const double denom = delta0 * d - delta * d / delta0 - lambda / 2.0;
  rep.ratio_bound = denom > 0 ? (lambda / 2.0) / denom : std::numeric_limits<double>::infinity();
  rep.vertex_bound = delta * n / delta0;
  rep.steps = static_cast<int>(peeling.steps.size());
  rep.pass = true;

  std::size_t prev_heavy = 0;
  bool have_prev = false;
  for (const PeelingStep& step : peeling.steps) {
    const std::size_t heavy = step.heavy_vertices.size();
    rep.max_heavy_vertices = std::max(rep.max_heavy_vertices, heavy);
    if (!(static_cast<double>(heavy) < rep.vertex_bound)) rep.pass = false;
    if (have_prev && prev_heavy > 0) {
      double ratio = static_cast<double>(heavy) / prev_heavy;
      rep.worst_ratio = std::max(rep.worst_ratio, ratio);
      if (!(ratio < 1.0 / 3.0)) rep.pass = false;
      if (!(ratio < rep.ratio_bound)) rep.pass = false;
    }
    prev_heavy = heavy;
    have_prev = heavy > 0;  // pairs are judged only from nonempty V_i
  }
  return rep;
}

std::pair<double, double> lift_constants(double rho0, double tau0) {
  if (!(rho0 > 0.0 && rho0 < 1.0 / 3.0))
    throw std::invalid_argument(
        "lift_constants: need 0 < rho0 < 1/3, otherwise the lifted rho reaches 1");
  if (!(tau0 > 0.0)) throw std::invalid_argument("lift_constants: need tau0 > 0");
  return {2.0 * rho0 / (1.0 - rho0), tau0 / (1.0 - rho0)};
}

BlockInequalityReport per_block_inequality_check(const DoubleCover& cover,
                                                 const InnerCode& code, const Vec& x,
                                                 const std::vector<int>& support_labels) {
  code.validate_fields();
  if (code.d != cover.degree)
    throw std::invalid_argument("per_block_inequality_check: inner code width != cover degree");
  const long long total = static_cast<long long>(cover.num_vertices) * cover.degree;
  if (static_cast<long long>(x.size()) != total)
    throw std::invalid_argument("per_block_inequality_check: x length != N*d");

  std::vector<char> in_support(total + 1, 0);
  for (int lbl : support_labels) {
    if (lbl < 1 || lbl > total)
      throw std::invalid_argument("per_block_inequality_check: label out of range");
    in_support[lbl] = 1;
  }

  const int order = code.order();
  auto side_ok = [&](const std::vector<std::vector<int>>& gamma) {
    for (int v = 0; v < cover.num_vertices; ++v) {
      int deg = 0;
      for (int lbl : gamma[v]) deg += in_support[lbl];
      if (deg > order) return false;
    }
    return true;
  };

  const bool left_ok = side_ok(cover.gamma_left);
  const bool right_ok = left_ok ? false : side_ok(cover.gamma_right);
  if (!left_ok && !right_ok)
    throw std::invalid_argument(
        "per_block_inequality_check: some vertex on each side exceeds deg(v,S) <= delta0*d");
  const auto& gamma = left_ok ? cover.gamma_left : cover.gamma_right;

  const double rho0 = code.rho0;
  const double tau0 = code.tau0;
  const DenseMatrix c0 = code.matrix.to_dense();

  double min_slack = std::numeric_limits<double>::infinity();
  double sum_block_norms = 0.0;
  Vec local(code.d);
  for (int v = 0; v < cover.num_vertices; ++v) {
    double on = 0.0, off = 0.0;
    for (int i = 0; i < code.d; ++i) {
      int lbl = gamma[v][i];
      local[i] = x[lbl - 1];
      (in_support[lbl] ? on : off) += std::abs(local[i]);
    }
    double block_norm = norm1(c0.apply(local));
    sum_block_norms += block_norm;
    min_slack = std::min(min_slack, rho0 * off + tau0 * block_norm - on);
  }

  double norm_s = 0.0, norm_rest = 0.0;
  for (long long lbl = 1; lbl <= total; ++lbl)
    (in_support[lbl] ? norm_s : norm_rest) += std::abs(x[lbl - 1]);

  BlockInequalityReport rep;
  rep.side = left_ok ? 'L' : 'R';
  rep.per_vertex_min_slack = min_slack;
  rep.summed_slack = rho0 * norm_rest + tau0 * sum_block_norms - norm_s;
  rep.rearranged_slack = rho0 / (1.0 + rho0) * (norm_s + norm_rest) +
                         tau0 / (1.0 + rho0) * sum_block_norms - norm_s;
  rep.pass = rep.per_vertex_min_slack >= -1e-9 && rep.summed_slack >= -1e-9 &&
             rep.rearranged_slack >= -1e-9;
  return rep;
}

RnspOutcome certify_tanner_rnsp(const TannerMatrix& a, int s, double rho, double tau,
                                std::uint64_t budget, double lp_tol, int threads) {
  if (s < 0) throw std::invalid_argument("certify_tanner_rnsp: s must be nonnegative");
  if (s == 0) {
    RnspOutcome out;
    out.certified = true;  // empty supports satisfy the condition vacuously
    out.certificate.order = 0;
    out.certificate.rho = rho;
    out.certificate.tau = tau;
    out.certificate.lp_tol = lp_tol;
    return out;
  }
  return verify_rnsp(a.matrix.to_dense(), s, rho, tau, lp_tol, budget, threads);
}

std::string peeling_trace_json(const Peeling& peeling) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const PeelingStep& step : peeling.steps) {
    nlohmann::ordered_json j;
    j["i"] = step.index;
    j["side"] = std::string(1, step.side);
    j["T_size"] = step.peeled.size();
    j["V_size"] = step.heavy_vertices.size();
    arr.push_back(j);
  }
  return arr.dump();
}

}  // namespace expsketch
