#pragma once

#include <string>
#include <vector>

#include "expsketch/linalg.hpp"

namespace expsketch {

enum class LpStatus { Optimal, Unbounded, Infeasible, IterationLimit };

std::string to_string(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  double objective = 0.0;  // in the sense the problem was stated (max or min)
  Vec x;                   // structural variables only
  Vec ray;                 // improving direction when Unbounded (structural part)
  long iterations = 0;
};

enum class RowSense { LE, EQ, GE };

struct SimplexOptions {
  double tol = 1e-8;              // optimality / feasibility tolerance
  double pivot_tol = 1e-9;        // minimum magnitude of a pivot element
  int degenerate_threshold = 40;  // consecutive degenerate pivots before switching to Bland's rule
  long max_iterations = 0;        // 0 = 50 * (number of columns after standardization)
};

/// Dense two-phase primal simplex over nonnegative variables.
///
/// Pivoting uses Dantzig's rule with lowest-index tie breaking and falls back
/// to Bland's rule after a run of degenerate pivots, which guarantees
/// termination. All choices are index-based, so solves are deterministic.
class LinearProgram {
 public:
  explicit LinearProgram(int num_vars);

  int num_vars() const { return num_vars_; }
  int num_rows() const { return static_cast<int>(rows_.size()); }

  /// Objective c.x over x >= 0; maximize=false minimizes.
  void set_objective(Vec c, bool maximize);

  void add_row(Vec coeffs, RowSense sense, double rhs);

  LpResult solve(const SimplexOptions& opts = {}) const;

 private:
  struct Row {
    Vec coeffs;
    RowSense sense;
    double rhs;
  };
  int num_vars_;
  Vec objective_;
  bool maximize_ = false;
  std::vector<Row> rows_;
};

}  // namespace expsketch
