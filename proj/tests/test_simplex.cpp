#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "expsketch/simplex.hpp"

using namespace expsketch;

namespace {

// Exhaustive basic-solution enumeration for max c.x s.t. Ax <= b, x >= 0
// with b >= 0. Independent route for cross-checking the simplex.
double enumerate_max(const std::vector<Vec>& a, const Vec& b, const Vec& c) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(c.size());
  const int cols = n + m;
  double best = -std::numeric_limits<double>::infinity();
  // basis = subset of columns of [A | I] of size m
  std::vector<int> pick(m);
  for (int i = 0; i < m; ++i) pick[i] = i;
  auto column = [&](int j, int i) { return j < n ? a[i][j] : (j - n == i ? 1.0 : 0.0); };
  for (;;) {
    std::vector<Vec> mat(m, Vec(m + 1, 0.0));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) mat[i][j] = column(pick[j], i);
      mat[i][m] = b[i];
    }
    bool singular = false;
    for (int col = 0; col < m && !singular; ++col) {
      int piv = -1;
      double best_val = 1e-9;
      for (int i = col; i < m; ++i)
        if (std::abs(mat[i][col]) > best_val) {
          best_val = std::abs(mat[i][col]);
          piv = i;
        }
      if (piv < 0) {
        singular = true;
        break;
      }
      std::swap(mat[col], mat[piv]);
      double inv = 1.0 / mat[col][col];
      for (int j = col; j <= m; ++j) mat[col][j] *= inv;
      for (int i = 0; i < m; ++i) {
        if (i == col) continue;
        double f = mat[i][col];
        for (int j = col; j <= m; ++j) mat[i][j] -= f * mat[col][j];
      }
    }
    if (!singular) {
      bool feasible = true;
      double obj = 0.0;
      for (int i = 0; i < m; ++i) {
        if (mat[i][m] < -1e-9) {
          feasible = false;
          break;
        }
        if (pick[i] < n) obj += c[pick[i]] * mat[i][m];
      }
      if (feasible) best = std::max(best, obj);
    }
    int i = m - 1;
    while (i >= 0 && pick[i] == cols - m + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

}  // namespace

TEST_CASE("simplex solves a textbook maximization") {
  LinearProgram lp(2);
  lp.set_objective({3.0, 2.0}, true);
  lp.add_row({1.0, 1.0}, RowSense::LE, 4.0);
  lp.add_row({1.0, 0.0}, RowSense::LE, 2.0);
  LpResult r = lp.solve();
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(10.0));
  CHECK(r.x[0] == doctest::Approx(2.0));
  CHECK(r.x[1] == doctest::Approx(2.0));
}

TEST_CASE("simplex handles GE and EQ rows via phase 1") {
  LinearProgram lp(2);
  lp.set_objective({1.0, 1.0}, false);
  lp.add_row({1.0, 2.0}, RowSense::GE, 4.0);
  LpResult r = lp.solve();
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(2.0));

  LinearProgram lp2(2);
  lp2.set_objective({2.0, 3.0}, false);
  lp2.add_row({1.0, 1.0}, RowSense::EQ, 5.0);
  LpResult r2 = lp2.solve();
  REQUIRE(r2.status == LpStatus::Optimal);
  CHECK(r2.objective == doctest::Approx(10.0));
  CHECK(r2.x[0] == doctest::Approx(5.0));
}

TEST_CASE("simplex reports infeasible systems") {
  LinearProgram lp(1);
  lp.set_objective({1.0}, false);
  lp.add_row({1.0}, RowSense::LE, 1.0);
  lp.add_row({1.0}, RowSense::GE, 2.0);
  LpResult r = lp.solve();
  CHECK(r.status == LpStatus::Infeasible);
}

TEST_CASE("simplex reports an unbounded ray") {
  LinearProgram lp(2);
  lp.set_objective({1.0, 0.0}, true);
  lp.add_row({-1.0, 1.0}, RowSense::LE, 1.0);
  LpResult r = lp.solve();
  REQUIRE(r.status == LpStatus::Unbounded);
  REQUIRE(r.ray.size() == 2);
  CHECK(r.ray[0] > 0.0);  // improving direction for the objective
  // the ray keeps the constraint satisfied: -ray0 + ray1 <= 0
  CHECK(-r.ray[0] + r.ray[1] <= 1e-9);
}

TEST_CASE("simplex terminates on Beale's cycling example") {
  LinearProgram lp(4);
  lp.set_objective({-0.75, 150.0, -0.02, 6.0}, false);
  lp.add_row({0.25, -60.0, -1.0 / 25.0, 9.0}, RowSense::LE, 0.0);
  lp.add_row({0.5, -90.0, -1.0 / 50.0, 3.0}, RowSense::LE, 0.0);
  lp.add_row({0.0, 0.0, 1.0, 0.0}, RowSense::LE, 1.0);
  LpResult r = lp.solve();
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(-0.05));
}

TEST_CASE("simplex agrees with basic-solution enumeration on random LPs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int inst = 0; inst < 40; ++inst) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int m = 2 + static_cast<int>(rng() % 3);
    std::vector<Vec> a(m, Vec(n));
    Vec b(m), c(n);
    for (auto& row : a)
      for (double& v : row) v = unif(rng);
    for (double& v : b) v = std::abs(unif(rng)) + 0.1;  // keeps x = 0 feasible
    for (double& v : c) v = unif(rng);
    // bound the feasible set so every instance has a finite optimum
    a.push_back(Vec(n, 1.0));
    b.push_back(10.0);

    LinearProgram lp(n);
    lp.set_objective(c, true);
    for (std::size_t i = 0; i < a.size(); ++i) lp.add_row(a[i], RowSense::LE, b[i]);
    LpResult r = lp.solve();
    REQUIRE(r.status == LpStatus::Optimal);
    double expect = enumerate_max(a, b, c);
    CHECK(r.objective == doctest::Approx(expect).epsilon(1e-7));
  }
}

TEST_CASE("simplex solutions are deterministic") {
  auto solve_once = [] {
    LinearProgram lp(3);
    lp.set_objective({1.0, 1.0, 1.0}, false);
    lp.add_row({1.0, 1.0, 0.0}, RowSense::GE, 1.0);
    lp.add_row({0.0, 1.0, 1.0}, RowSense::GE, 1.0);
    return lp.solve();
  };
  LpResult a = solve_once();
  LpResult b = solve_once();
  REQUIRE(a.status == LpStatus::Optimal);
  CHECK(a.objective == b.objective);
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}
