#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "expsketch/graphs.hpp"
#include "expsketch/inner_code.hpp"
#include "expsketch/linalg.hpp"

namespace expsketch {

/// Binary sparse matrix, row-compressed column indices; entries implicitly 1.
struct SparseBinaryMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::size_t> row_ptr;  // rows + 1
  std::vector<int> col_idx;          // ascending within each row

  std::size_t nnz() const { return col_idx.size(); }

  /// Exact sparse product, cost Theta(nnz). Summation order is ascending
  /// column index per row, matching a dense product that skips zeros, so the
  /// two agree bit for bit.
  Vec apply(const Vec& x) const;

  /// Row blocks partitioned across threads; output bit-identical to apply().
  Vec apply_parallel(const Vec& x, int threads = 0) const;

  DenseMatrix to_dense() const;
  void validate() const;

  bool operator==(const SparseBinaryMatrix&) const = default;
};

/// Measurement matrix whose action stacks C0 * x_{Gamma(v)} over all 2N
/// cover vertices: left vertices first in index order, then right. Rows
/// v*k..v*k+k-1 belong to left vertex v; right blocks are offset by k*N.
struct TannerMatrix {
  SparseBinaryMatrix matrix;
  int num_vertices = 0;  // N of the source graph
  int degree = 0;        // d
  InnerCode code;        // provenance: the inner code used to assemble
};

/// Requires code.d == cover degree.
TannerMatrix assemble(const DoubleCover& cover, const InnerCode& code);

struct StructureReport {
  int rows = 0;
  int cols = 0;
  std::size_t nnz = 0;
  int max_col_weight = 0;
  double rows_per_n_ratio = 0.0;  // rows/cols = 2k/d for assembled matrices
};

StructureReport structure_report(const SparseBinaryMatrix& m);

/// Matrix Market coordinate format, 1-indexed. Exports as pattern; imports
/// pattern or integer fields (general symmetry only). Structure round-trips
/// losslessly. Empty matrices and malformed headers are rejected.
void export_matrix_market(const SparseBinaryMatrix& m, const std::string& path);
SparseBinaryMatrix import_matrix_market(const std::string& path);

}  // namespace expsketch
