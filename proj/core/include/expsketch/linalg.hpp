#pragma once

#include <cstddef>
#include <vector>

namespace expsketch {

using Vec = std::vector<double>;

/// Row-major dense matrix. Small helper for LP assembly, certification and
/// reference products; large operators stay sparse.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  Vec apply(const Vec& x) const;
};

double norm1(const Vec& x);
double norm2(const Vec& x);
double linf_diff(const Vec& a, const Vec& b);
double l1_diff(const Vec& a, const Vec& b);
double dot(const Vec& a, const Vec& b);

}  // namespace expsketch
