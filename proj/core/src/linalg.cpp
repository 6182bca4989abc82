#include "expsketch/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace expsketch {

Vec DenseMatrix::apply(const Vec& x) const {
  if (static_cast<int>(x.size()) != cols) throw std::invalid_argument("DenseMatrix::apply: dimension mismatch");
  Vec y(rows, 0.0);
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    const double* row = &data[static_cast<std::size_t>(r) * cols];
    for (int c = 0; c < cols; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

double norm1(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

double norm2(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double linf_diff(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("linf_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l1_diff(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("l1_diff: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace expsketch
