#include "expsketch/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace expsketch {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

LinearProgram::LinearProgram(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 1) throw std::invalid_argument("LinearProgram: need at least one variable");
  objective_.assign(num_vars, 0.0);
}

void LinearProgram::set_objective(Vec c, bool maximize) {
  if (static_cast<int>(c.size()) != num_vars_) throw std::invalid_argument("objective size mismatch");
  objective_ = std::move(c);
  maximize_ = maximize;
}

void LinearProgram::add_row(Vec coeffs, RowSense sense, double rhs) {
  if (static_cast<int>(coeffs.size()) != num_vars_) throw std::invalid_argument("row size mismatch");
  rows_.push_back(Row{std::move(coeffs), sense, rhs});
}

namespace {

// Dense simplex tableau with twin right-hand sides: ratio tests run against a
// generically perturbed rhs (which breaks the ties that cause degenerate
// cycling), while the original rhs is carried through the same pivots so the
// reported solution is exact for the unperturbed problem.
struct Tableau {
  int m = 0;
  int ncols = 0;
  std::vector<double> t;  // m x ncols, row-major
  Vec b;       // perturbed rhs, kept >= 0 by the ratio test
  Vec b_orig;  // B^{-1} times the original rhs
  std::vector<int> basis;
  std::vector<char> allowed;
  Vec cost;  // reduced costs
  double obj = 0.0;  // objective at the perturbed iterate (progress measure)

  double* row(int r) { return &t[static_cast<std::size_t>(r) * ncols]; }
  const double* row(int r) const { return &t[static_cast<std::size_t>(r) * ncols]; }

  void reduce_costs(const Vec& c) {
    cost = c;
    obj = 0.0;
    for (int r = 0; r < m; ++r) {
      double cb = c[basis[r]];
      if (cb == 0.0) continue;
      obj += cb * b[r];
      const double* tr = row(r);
      for (int j = 0; j < ncols; ++j) cost[j] -= cb * tr[j];
    }
  }

  double objective_original(const Vec& c) const {
    double v = 0.0;
    for (int r = 0; r < m; ++r) v += c[basis[r]] * b_orig[r];
    return v;
  }

  void pivot(int r, int e) {
    double* tr = row(r);
    double inv = 1.0 / tr[e];
    for (int j = 0; j < ncols; ++j) tr[j] *= inv;
    tr[e] = 1.0;
    b[r] *= inv;
    b_orig[r] *= inv;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      double* ti = row(i);
      double f = ti[e];
      if (f == 0.0) continue;
      for (int j = 0; j < ncols; ++j) ti[j] -= f * tr[j];
      ti[e] = 0.0;
      b[i] -= f * b[r];
      b_orig[i] -= f * b_orig[r];
      if (b[i] < 0.0 && b[i] > -1e-11) b[i] = 0.0;
    }
    double f = cost[e];
    if (f != 0.0) {
      for (int j = 0; j < ncols; ++j) cost[j] -= f * tr[j];
      cost[e] = 0.0;
      obj += f * b[r];
    }
    basis[r] = e;
  }

  void remove_row(int i) {
    t.erase(t.begin() + static_cast<std::ptrdiff_t>(i) * ncols,
            t.begin() + static_cast<std::ptrdiff_t>(i + 1) * ncols);
    b.erase(b.begin() + i);
    b_orig.erase(b_orig.begin() + i);
    basis.erase(basis.begin() + i);
    --m;
  }
};

struct CoreResult {
  LpStatus status;
  long iterations;
  int unbounded_col = -1;
};

CoreResult run_simplex(Tableau& tab, const SimplexOptions& opts, long max_iters, bool bland_always) {
  long iters = 0;
  int degen_run = 0;
  bool bland = bland_always;
  for (;;) {
    int e = -1;
    if (bland) {
      for (int j = 0; j < tab.ncols; ++j) {
        if (tab.allowed[j] && tab.cost[j] < -opts.tol) { e = j; break; }
      }
    } else {
      double best = -opts.tol;
      for (int j = 0; j < tab.ncols; ++j) {
        if (tab.allowed[j] && tab.cost[j] < best) { best = tab.cost[j]; e = j; }
      }
    }
    if (e < 0) return {LpStatus::Optimal, iters, -1};

    // ratio test on the perturbed rhs; ties go to the smallest basis index
    // under Bland's rule, otherwise to the first row seen
    int r = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < tab.m; ++i) {
      double a = tab.row(i)[e];
      if (a <= opts.pivot_tol) continue;
      double bi = tab.b[i] < 0.0 ? 0.0 : tab.b[i];
      double ratio = bi / a;
      if (r < 0 || ratio < best_ratio - 1e-14) {
        r = i;
        best_ratio = ratio;
      } else if (bland && ratio <= best_ratio + 1e-14 && tab.basis[i] < tab.basis[r]) {
        r = i;
      }
    }
    if (r < 0) return {LpStatus::Unbounded, iters, e};

    bool degenerate = best_ratio <= 1e-12;
    tab.pivot(r, e);
    ++iters;
    if (iters >= max_iters) return {LpStatus::IterationLimit, iters, -1};
    if (!bland_always) {
      if (degenerate) {
        if (++degen_run >= opts.degenerate_threshold) bland = true;
      } else {
        degen_run = 0;
        bland = false;
      }
    }
  }
}

// deterministic "generic" weights in [1, 2) for the rhs perturbation
double perturb_weight(int i) {
  std::uint64_t z = static_cast<std::uint64_t>(i) + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  return 1.0 + static_cast<double>(z >> 11) * 0x1.0p-53;
}

}  // namespace

LpResult LinearProgram::solve(const SimplexOptions& opts) const {
  const int n = num_vars_;
  const int m = static_cast<int>(rows_.size());

  std::vector<Vec> coeffs(m);
  std::vector<RowSense> sense(m);
  Vec rhs(m);
  for (int i = 0; i < m; ++i) {
    coeffs[i] = rows_[i].coeffs;
    sense[i] = rows_[i].sense;
    rhs[i] = rows_[i].rhs;
    if (rhs[i] < 0.0) {
      for (double& v : coeffs[i]) v = -v;
      rhs[i] = -rhs[i];
      if (sense[i] == RowSense::LE) sense[i] = RowSense::GE;
      else if (sense[i] == RowSense::GE) sense[i] = RowSense::LE;
    }
  }

  int n_slack = 0, n_art = 0;
  for (int i = 0; i < m; ++i) {
    if (sense[i] != RowSense::EQ) ++n_slack;
    if (sense[i] != RowSense::LE) ++n_art;
  }
  const int ncols = n + n_slack + n_art;
  const long max_iters = opts.max_iterations > 0 ? opts.max_iterations
                                                 : std::max<long>(1000, 50L * ncols);

  double rhs_scale = 1.0;
  for (double v : rhs) rhs_scale = std::max(rhs_scale, v);

  // attempt 0 runs with the anti-degeneracy perturbation; if the perturbed
  // optimum turns out infeasible for the original rhs (rare), attempt 1
  // reruns unperturbed under Bland's rule
  for (int attempt = 0; attempt < 2; ++attempt) {
    const bool perturbed = attempt == 0;
    const double eps = perturbed ? 1e-7 * rhs_scale : 0.0;

    Tableau tab;
    tab.m = m;
    tab.ncols = ncols;
    tab.t.assign(static_cast<std::size_t>(m) * ncols, 0.0);
    tab.b_orig = rhs;
    tab.b = rhs;
    for (int i = 0; i < m; ++i) tab.b[i] += eps * perturb_weight(i);
    tab.basis.assign(m, -1);
    tab.allowed.assign(ncols, 1);

    int slack_at = n;
    int art_at = n + n_slack;
    std::vector<char> is_art(ncols, 0);
    for (int i = 0; i < m; ++i) {
      double* tr = tab.row(i);
      for (int j = 0; j < n; ++j) tr[j] = coeffs[i][j];
      if (sense[i] == RowSense::LE) {
        tr[slack_at] = 1.0;
        tab.basis[i] = slack_at++;
      } else if (sense[i] == RowSense::GE) {
        tr[slack_at++] = -1.0;
        tr[art_at] = 1.0;
        is_art[art_at] = 1;
        tab.basis[i] = art_at++;
      } else {
        tr[art_at] = 1.0;
        is_art[art_at] = 1;
        tab.basis[i] = art_at++;
      }
    }

    LpResult result;
    const long iter_budget = perturbed ? max_iters : std::max(max_iters, 400L * ncols);

    if (n_art > 0) {
      Vec phase1_cost(ncols, 0.0);
      for (int j = 0; j < ncols; ++j)
        if (is_art[j]) phase1_cost[j] = 1.0;
      tab.reduce_costs(phase1_cost);
      CoreResult p1 = run_simplex(tab, opts, iter_budget, /*bland_always=*/!perturbed);
      result.iterations += p1.iterations;
      if (p1.status == LpStatus::IterationLimit) {
        if (perturbed) continue;
        result.status = LpStatus::IterationLimit;
        return result;
      }
      if (p1.status == LpStatus::Unbounded)
        throw std::runtime_error("simplex: phase 1 reported unbounded (numerical failure)");
      // infeasibility is judged on the original rhs, not the perturbed one
      double feas_tol = std::max(opts.tol, 1e-9) * std::max(1.0, norm1(rhs));
      double orig_infeasibility = tab.objective_original(phase1_cost);
      if (orig_infeasibility > feas_tol) {
        result.status = LpStatus::Infeasible;
        result.objective = orig_infeasibility;
        return result;
      }
      for (int i = tab.m - 1; i >= 0; --i) {
        if (!is_art[tab.basis[i]]) continue;
        int enter = -1;
        const double* tr = tab.row(i);
        for (int j = 0; j < ncols && enter < 0; ++j)
          if (!is_art[j] && std::abs(tr[j]) > opts.pivot_tol) enter = j;
        if (enter >= 0)
          tab.pivot(i, enter);
        else
          tab.remove_row(i);
      }
      for (int j = 0; j < ncols; ++j)
        if (is_art[j]) tab.allowed[j] = 0;
    }

    Vec c_min(ncols, 0.0);
    for (int j = 0; j < n; ++j) c_min[j] = maximize_ ? -objective_[j] : objective_[j];
    tab.reduce_costs(c_min);
    CoreResult p2 = run_simplex(tab, opts, iter_budget, /*bland_always=*/!perturbed);
    result.iterations += p2.iterations;

    if (p2.status == LpStatus::IterationLimit) {
      if (perturbed) continue;
      result.status = LpStatus::IterationLimit;
      return result;
    }

    // the basis was chosen against the perturbed rhs; make sure it is also
    // feasible for the original one before reporting it
    if (perturbed) {
      double feas_tol = std::max(opts.tol, 1e-9) * std::max(1.0, rhs_scale);
      bool ok = true;
      for (int r = 0; r < tab.m && ok; ++r) ok = tab.b_orig[r] >= -feas_tol;
      if (!ok) continue;
    }

    Vec x_full(ncols, 0.0);
    for (int r = 0; r < tab.m; ++r) x_full[tab.basis[r]] = std::max(0.0, tab.b_orig[r]);
    result.x.assign(x_full.begin(), x_full.begin() + n);
    result.objective = dot(objective_, result.x);

    if (p2.status == LpStatus::Unbounded) {
      result.status = LpStatus::Unbounded;
      Vec ray_full(ncols, 0.0);
      ray_full[p2.unbounded_col] = 1.0;
      for (int r = 0; r < tab.m; ++r) ray_full[tab.basis[r]] = -tab.row(r)[p2.unbounded_col];
      result.ray.assign(ray_full.begin(), ray_full.begin() + n);
      return result;
    }
    result.status = LpStatus::Optimal;
    return result;
  }

  LpResult stalled;
  stalled.status = LpStatus::IterationLimit;
  return stalled;
}

}  // namespace expsketch
