#pragma once

#include <optional>
#include <vector>

#include "expsketch/linalg.hpp"

namespace expsketch {

/// l_p distance (p in {1, 2}) from x to the nearest s-sparse vector: the
/// norm of x with its s largest-magnitude entries removed. Among equal
/// magnitudes the lower index is kept, which fixes the removed set but not
/// the value (the value is tie-invariant).
double sigma_s(const Vec& x, int s, int p = 1);

struct RecoveryResult {
  Vec z;
  double objective = 0.0;  // ||z||_1
  double residual = 0.0;   // ||y - A z||_1
  std::optional<double> guarantee_slack;  // rhs - lhs when checked against ground truth
  long iterations = 0;
};

/// Basis pursuit: min ||z||_1 subject to ||y - A z||_1 <= eta, solved as the
/// LP  min sum(zp + zm)  s.t.  A(zp - zm) + rp - rm = y, sum(rp + rm) <= eta.
/// The constraint is closed (<=) so the minimum is attained. Throws when the
/// constraints are infeasible (possible for rank-deficient A with eta too
/// small) or the simplex stalls.
RecoveryResult l1_minimize(const DenseMatrix& a, const Vec& y, double eta,
                           double lp_tol = 1e-8);

struct GuaranteeReport {
  double c1 = 0.0;   // 2(1+rho)/(1-rho)
  double c2 = 0.0;   // 4 tau / (1-rho)
  double lhs = 0.0;  // ||z - x_true||_1
  double rhs = 0.0;  // c1 * sigma_s(x_true)_1 + c2 * eta
  bool pass = false;
};

/// Evaluates the l1/l1 recovery guarantee implied by a null space property
/// with constants (rho, tau) at order s.
GuaranteeReport guarantee_check(const Vec& z, const Vec& x_true, int s, double eta,
                                double rho, double tau, double tol = 1e-6);

}  // namespace expsketch
