#include "expsketch/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "expsketch/simplex.hpp"

namespace expsketch {

double sigma_s(const Vec& x, int s, int p) {
  const int n = static_cast<int>(x.size());
  if (s < 0) throw std::invalid_argument("sigma_s: s must be nonnegative");
  if (s > n) s = n;  // everything removed, tail is empty
  if (p != 1 && p != 2) throw std::invalid_argument("sigma_s: p must be 1 or 2");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(x[a]) > std::abs(x[b]);  // stable: lower index kept among ties
  });
  double acc = 0.0;
  for (int i = s; i < n; ++i) {
    double v = std::abs(x[idx[i]]);
    acc += p == 1 ? v : v * v;
  }
  return p == 1 ? acc : std::sqrt(acc);
}

RecoveryResult l1_minimize(const DenseMatrix& a, const Vec& y, double eta,
                           double lp_tol) {
  const int m = a.rows;
  const int n = a.cols;
  if (static_cast<int>(y.size()) != m)
    throw std::invalid_argument("l1_minimize: y length != rows of A");
  if (eta < 0.0) throw std::invalid_argument("l1_minimize: eta must be nonnegative");

  // variables: zp[n], zm[n], rp[m], rm[m]
  const int nv = 2 * n + 2 * m;
  auto zp = [&](int j) { return j; };
  auto zm = [&](int j) { return n + j; };
  auto rp = [&](int i) { return 2 * n + i; };
  auto rm = [&](int i) { return 2 * n + m + i; };

  LinearProgram lp(nv);
  Vec c(nv, 0.0);
  for (int j = 0; j < n; ++j) c[zp(j)] = c[zm(j)] = 1.0;
  lp.set_objective(c, /*maximize=*/false);

  for (int i = 0; i < m; ++i) {
    Vec row(nv, 0.0);
    for (int j = 0; j < n; ++j) {
      double v = a.at(i, j);
      if (v == 0.0) continue;
      row[zp(j)] = v;
      row[zm(j)] = -v;
    }
    row[rp(i)] = 1.0;
    row[rm(i)] = -1.0;
    lp.add_row(std::move(row), RowSense::EQ, y[i]);
  }
  Vec budget(nv, 0.0);
  for (int i = 0; i < m; ++i) budget[rp(i)] = budget[rm(i)] = 1.0;
  lp.add_row(std::move(budget), RowSense::LE, eta);

  SimplexOptions opts;
  opts.tol = lp_tol;
  LpResult res = lp.solve(opts);
  if (res.status == LpStatus::Infeasible)
    throw std::runtime_error(
        "l1_minimize: constraints are infeasible (y is farther than eta from the range of A)");
  if (res.status == LpStatus::IterationLimit)
    throw std::runtime_error("l1_minimize: simplex stalled past its iteration cap");
  if (res.status == LpStatus::Unbounded)
    throw std::runtime_error("l1_minimize: unbounded LP (this should be impossible)");

  RecoveryResult out;
  out.z.assign(n, 0.0);
  for (int j = 0; j < n; ++j)
    out.z[j] = std::max(0.0, res.x[zp(j)]) - std::max(0.0, res.x[zm(j)]);
  out.objective = norm1(out.z);
  out.residual = l1_diff(y, a.apply(out.z));
  out.iterations = res.iterations;
  return out;
}

GuaranteeReport guarantee_check(const Vec& z, const Vec& x_true, int s, double eta,
                                double rho, double tau, double tol) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("guarantee_check: need 0 < rho < 1");
  if (!(tau > 0.0)) throw std::invalid_argument("guarantee_check: need tau > 0");
  GuaranteeReport rep;
  rep.c1 = 2.0 * (1.0 + rho) / (1.0 - rho);
  rep.c2 = 4.0 * tau / (1.0 - rho);
  rep.lhs = l1_diff(z, x_true);
  rep.rhs = rep.c1 * sigma_s(x_true, s, 1) + rep.c2 * eta;
  rep.pass = rep.lhs <= rep.rhs + tol;
  return rep;
}

}  // namespace expsketch
