#include "expsketch/inner_code.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "expsketch/simplex.hpp"
#include "expsketch/util.hpp"

namespace expsketch {

int BinaryMatrix::max_column_weight() const {
  int best = 0;
  for (int c = 0; c < cols; ++c) {
    int w = 0;
    for (int r = 0; r < rows; ++r) w += get(r, c);
    best = std::max(best, w);
  }
  return best;
}

std::size_t BinaryMatrix::ones() const {
  std::size_t total = 0;
  for (std::uint8_t b : bits) total += b;
  return total;
}

DenseMatrix BinaryMatrix::to_dense() const {
  DenseMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m.at(r, c) = get(r, c);
  return m;
}

namespace {

// C(n, s) * 2^s, saturating at max.
std::uint64_t enumeration_cost(int n, int s) {
  const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
  long double v = 1.0L;
  for (int i = 0; i < s; ++i) v = v * (n - i) / (i + 1);
  v *= std::pow(2.0L, s);
  if (v > static_cast<long double>(cap) / 2) return cap;
  return static_cast<std::uint64_t>(v);
}

std::vector<std::vector<int>> all_supports(int n, int s) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(s);
  for (int i = 0; i < s; ++i) cur[i] = i;
  for (;;) {
    out.push_back(cur);
    int i = s - 1;
    while (i >= 0 && cur[i] == n - s + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < s; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

struct SupportLpResult {
  double objective = 0.0;
  Vec x;             // length n
  bool unbounded = false;
};

// max sum_{i in S} sigma_i x_i subject to rho ||x_Sbar||_1 + tau ||M x||_1 <= 1.
// Variables: x = xp - xm, plus v_r >= |(M x)_r| linearized by two rows each.
SupportLpResult solve_support_lp(const DenseMatrix& m, const std::vector<int>& support,
                                 const std::vector<int>& signs, double rho, double tau,
                                 double lp_tol) {
  const int n = m.cols;
  const int rows = m.rows;
  const int nv = 2 * n + rows;
  auto xp = [&](int j) { return j; };
  auto xm = [&](int j) { return n + j; };
  auto vv = [&](int r) { return 2 * n + r; };

  LinearProgram lp(nv);
  Vec c(nv, 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    c[xp(support[i])] = signs[i];
    c[xm(support[i])] = -signs[i];
  }
  lp.set_objective(c, /*maximize=*/true);

  std::vector<char> in_support(n, 0);
  for (int j : support) in_support[j] = 1;
  Vec budget(nv, 0.0);
  for (int j = 0; j < n; ++j) {
    if (!in_support[j]) {
      budget[xp(j)] = rho;
      budget[xm(j)] = rho;
    }
  }
  for (int r = 0; r < rows; ++r) budget[vv(r)] = tau;
  lp.add_row(budget, RowSense::LE, 1.0);

  for (int r = 0; r < rows; ++r) {
    Vec pos(nv, 0.0), neg(nv, 0.0);
    for (int j = 0; j < n; ++j) {
      double a = m.at(r, j);
      if (a == 0.0) continue;
      pos[xp(j)] = a;
      pos[xm(j)] = -a;
      neg[xp(j)] = -a;
      neg[xm(j)] = a;
    }
    pos[vv(r)] = -1.0;
    neg[vv(r)] = -1.0;
    lp.add_row(std::move(pos), RowSense::LE, 0.0);
    lp.add_row(std::move(neg), RowSense::LE, 0.0);
  }

  SimplexOptions opts;
  opts.tol = lp_tol;
  LpResult res = lp.solve(opts);
  if (res.status == LpStatus::IterationLimit)
    throw std::runtime_error("verify_rnsp: simplex stalled past its iteration cap");
  if (res.status == LpStatus::Infeasible)
    throw std::runtime_error("verify_rnsp: internal LP reported infeasible");

  SupportLpResult out;
  auto collapse = [&](const Vec& lp_x) {
    Vec x(n, 0.0);
    for (int j = 0; j < n; ++j) {
      double p = std::max(0.0, lp_x[xp(j)]);
      double q = std::max(0.0, lp_x[xm(j)]);
      x[j] = p - q;
    }
    return x;
  };
  if (res.status == LpStatus::Unbounded) {
    out.unbounded = true;
    double obj0 = dot(c, res.x);
    double robj = dot(c, res.ray);
    double t = robj > 0 ? std::max(0.0, (2.0 - obj0) / robj) : 0.0;
    Vec lifted = res.x;
    for (int j = 0; j < nv; ++j) lifted[j] += t * res.ray[j];
    out.x = collapse(lifted);
    out.objective = std::numeric_limits<double>::infinity();
    return out;
  }
  out.objective = res.objective;
  out.x = collapse(res.x);
  return out;
}

RnspRefutation make_refutation(const DenseMatrix& m, const std::vector<int>& support,
                               const std::vector<int>& signs, const Vec& x, double rho,
                               double tau, bool unbounded) {
  RnspRefutation ref;
  ref.support = support;
  ref.signs = signs;
  ref.x = x;
  ref.from_unbounded_ray = unbounded;
  std::vector<char> in_support(m.cols, 0);
  for (int j : support) in_support[j] = 1;
  double on = 0.0, off = 0.0;
  for (int j = 0; j < m.cols; ++j) (in_support[j] ? on : off) += std::abs(x[j]);
  ref.lhs = on;
  ref.rhs = rho * off + tau * norm1(m.apply(x));
  return ref;
}

}  // namespace

RnspOutcome verify_rnsp(const DenseMatrix& m, int s, double rho, double tau,
                        double lp_tol, std::uint64_t budget, int threads) {
  const int n = m.cols;
  if (n < 1 || m.rows < 1) throw std::invalid_argument("verify_rnsp: empty matrix");
  if (s < 1 || s > n) throw std::invalid_argument("verify_rnsp: need 1 <= s <= n");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("verify_rnsp: need 0 < rho < 1");
  if (!(tau > 0.0)) throw std::invalid_argument("verify_rnsp: need tau > 0");
  if (!(lp_tol > 0.0)) throw std::invalid_argument("verify_rnsp: need lp_tol > 0");
  if (enumeration_cost(n, s) > budget)
    throw std::invalid_argument("verify_rnsp: C(n,s)*2^s exceeds the enumeration budget");

  if (threads <= 0) threads = default_thread_count();
  const auto supports = all_supports(n, s);
  const int num_patterns = s >= 1 ? (1 << (s - 1)) : 1;

  struct PerSupport {
    double max_objective = 0.0;
    std::optional<RnspRefutation> refutation;
  };
  std::vector<PerSupport> results(supports.size());

  const std::size_t block = std::max<std::size_t>(1, static_cast<std::size_t>(threads) * 8);
  std::size_t first_refuted = supports.size();
  for (std::size_t begin = 0; begin < supports.size() && first_refuted == supports.size();
       begin += block) {
    std::size_t end = std::min(begin + block, supports.size());
    parallel_for(end - begin, threads, [&](std::size_t off) {
      std::size_t idx = begin + off;
      const auto& sup = supports[idx];
      PerSupport& slot = results[idx];
      std::vector<int> signs(sup.size(), 1);
      for (int pat = 0; pat < num_patterns; ++pat) {
        for (std::size_t i = 1; i < sup.size(); ++i)
          signs[i] = (pat >> (i - 1)) & 1 ? -1 : 1;
        SupportLpResult r = solve_support_lp(m, sup, signs, rho, tau, lp_tol);
        slot.max_objective = std::max(slot.max_objective, r.objective);
        if (r.unbounded || r.objective > 1.0 + lp_tol) {
          slot.refutation = make_refutation(m, sup, signs, r.x, rho, tau, r.unbounded);
          return;
        }
      }
    });
    for (std::size_t idx = begin; idx < end; ++idx) {
      if (results[idx].refutation) {
        first_refuted = idx;
        break;
      }
    }
  }

  RnspOutcome out;
  if (first_refuted < supports.size()) {
    out.certified = false;
    out.refutation = results[first_refuted].refutation;
    return out;
  }
  out.certified = true;
  out.certificate.order = s;
  out.certificate.rho = rho;
  out.certificate.tau = tau;
  out.certificate.lp_tol = lp_tol;
  out.certificate.method = "simplex over all " + std::to_string(supports.size()) +
                           " supports of size " + std::to_string(s) + ", " +
                           std::to_string(num_patterns) + " sign pattern(s) each";
  out.certificate.per_support.reserve(supports.size());
  for (std::size_t i = 0; i < supports.size(); ++i)
    out.certificate.per_support.push_back(SupportValue{supports[i], results[i].max_objective});
  return out;
}

double min_tau(const DenseMatrix& m, int s, double rho, double lp_tol,
               std::uint64_t budget, int threads) {
  const double tau_cap = 1e9;
  auto certifies = [&](double tau) {
    return verify_rnsp(m, s, rho, tau, lp_tol, budget, threads).certified;
  };
  double lo, hi;
  if (certifies(1.0)) {
    hi = 1.0;
    lo = 0.5;
    while (certifies(lo)) {
      hi = lo;
      lo /= 2;
      if (lo < 1e-12) return hi;
    }
  } else {
    lo = 1.0;
    hi = 2.0;
    while (!certifies(hi)) {
      lo = hi;
      hi *= 2;
      if (hi > tau_cap) return std::numeric_limits<double>::infinity();
    }
  }
  while (hi / lo > 1.01) {
    double mid = std::sqrt(lo * hi);
    if (certifies(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

int InnerCode::order() const { return static_cast<int>(std::floor(delta0 * d + 1e-9)); }

void InnerCode::validate_fields() const {
  if (k < 1 || d < 1) throw std::invalid_argument("inner code: k, d must be positive");
  if (k > d) throw std::invalid_argument("inner code: need k <= d");
  if (matrix.rows != k || matrix.cols != d)
    throw std::invalid_argument("inner code: matrix shape mismatch");
  if (!(delta0 > 0.0 && delta0 <= 1.0))
    throw std::invalid_argument("inner code: delta0 must be in (0, 1]");
  if (!(rho0 > 0.0 && rho0 < 1.0 / 3.0))
    throw std::invalid_argument("inner code: rho0 must be in (0, 1/3)");
  if (!(tau0 > 0.0)) throw std::invalid_argument("inner code: tau0 must be positive");
  if (order() < 1) throw std::invalid_argument("inner code: floor(delta0*d) must be >= 1");
  if (matrix.max_column_weight() > column_weight)
    throw std::invalid_argument("inner code: column weight exceeds recorded bound");
}

InnerCode search_inner_code(int d, double delta0, double rho0, int weight_cap,
                            int row_cap, int attempts, std::uint64_t seed,
                            double lp_tol, std::uint64_t budget, int threads) {
  if (d < 1) throw std::invalid_argument("search_inner_code: d must be positive");
  if (!(delta0 > 0.0 && delta0 <= 1.0))
    throw std::invalid_argument("search_inner_code: delta0 must be in (0, 1]");
  int s0 = static_cast<int>(std::floor(delta0 * d + 1e-9));
  if (s0 < 1) throw std::invalid_argument("search_inner_code: floor(delta0*d) must be >= 1");
  if (!(rho0 > 0.0 && rho0 < 1.0 / 3.0))
    throw std::invalid_argument("search_inner_code: rho0 must be in (0, 1/3)");
  if (row_cap < 1 || row_cap > d)
    throw std::invalid_argument("search_inner_code: need 1 <= row_cap <= d");
  if (weight_cap < 1) throw std::invalid_argument("search_inner_code: weight_cap must be >= 1");
  if (attempts < 1) throw std::invalid_argument("search_inner_code: attempts must be >= 1");

  std::mt19937_64 rng(derive_seed(seed, 0xc0de, 0));
  double best_violation = std::numeric_limits<double>::infinity();

  for (int k = 1; k <= row_cap; ++k) {
    const int weight = std::min(weight_cap, k);
    std::vector<int> row_ids(k);
    for (int attempt = 0; attempt < attempts; ++attempt) {
      BinaryMatrix cand(k, d);
      for (int c = 0; c < d; ++c) {
        for (int i = 0; i < k; ++i) row_ids[i] = i;
        for (int i = 0; i < weight; ++i) {
          int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(k - i));
          std::swap(row_ids[i], row_ids[j]);
          cand.set(row_ids[i], c, 1);
        }
      }
      // repeated columns always refute (a difference of unit vectors lies in
      // the kernel), so skip the LPs
      {
        std::set<std::string> cols;
        bool dup = false;
        for (int c = 0; c < d && !dup; ++c) {
          std::string key(k, '0');
          for (int r = 0; r < k; ++r) key[r] = cand.get(r, c) ? '1' : '0';
          dup = !cols.insert(key).second;
        }
        if (dup) continue;
      }
      DenseMatrix dense = cand.to_dense();
      RnspOutcome probe = verify_rnsp(dense, s0, rho0, 1e9, lp_tol, budget, threads);
      if (!probe.certified) {
        if (probe.refutation)
          best_violation = std::min(best_violation, probe.refutation->lhs - probe.refutation->rhs);
        continue;
      }
      double tau = min_tau(dense, s0, rho0, lp_tol, budget, threads);
      if (!std::isfinite(tau)) continue;
      InnerCode code;
      code.matrix = std::move(cand);
      code.k = k;
      code.d = d;
      code.delta0 = delta0;
      code.rho0 = rho0;
      code.tau0 = tau;
      code.column_weight = weight;
      code.validate_fields();
      return code;
    }
  }
  std::ostringstream msg;
  msg << "search_inner_code: no certified candidate within " << attempts
      << " attempts per k (k up to " << row_cap << ")";
  if (std::isfinite(best_violation))
    msg << "; smallest violation margin seen was " << best_violation;
  throw std::runtime_error(msg.str());
}

void write_inner_code_file(const InnerCode& code, const std::string& path) {
  code.validate_fields();
  char head[128];
  std::snprintf(head, sizeof(head), "%d %d %.17g %.17g %.17g\n", code.k, code.d,
                code.delta0, code.rho0, code.tau0);
  std::string out(head);
  for (int r = 0; r < code.k; ++r) {
    for (int c = 0; c < code.d; ++c) out += code.matrix.get(r, c) ? '1' : '0';
    out += '\n';
  }
  atomic_write_file(path, out);
}

InnerCode read_inner_code_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  InnerCode code;
  if (!(in >> code.k >> code.d >> code.delta0 >> code.rho0 >> code.tau0))
    throw std::runtime_error("inner code file: bad header in " + path);
  code.matrix = BinaryMatrix(code.k, code.d);
  for (int r = 0; r < code.k; ++r) {
    std::string row;
    if (!(in >> row) || static_cast<int>(row.size()) != code.d)
      throw std::runtime_error("inner code file: bad row in " + path);
    for (int c = 0; c < code.d; ++c) {
      if (row[c] != '0' && row[c] != '1')
        throw std::runtime_error("inner code file: entries must be 0/1 in " + path);
      code.matrix.set(r, c, row[c] == '1');
    }
  }
  code.column_weight = code.matrix.max_column_weight();
  code.validate_fields();
  return code;
}

std::string certificate_to_json(const RnspCertificate& cert) {
  nlohmann::ordered_json j;
  j["order"] = cert.order;
  j["rho"] = cert.rho;
  j["tau"] = cert.tau;
  j["lp_tol"] = cert.lp_tol;
  j["method"] = cert.method;
  nlohmann::ordered_json supports = nlohmann::ordered_json::array();
  for (const auto& sv : cert.per_support) {
    nlohmann::ordered_json entry;
    entry["support"] = sv.support;
    entry["max_objective"] = sv.max_objective;
    supports.push_back(entry);
  }
  j["per_support"] = supports;
  return j.dump();
}

}  // namespace expsketch
