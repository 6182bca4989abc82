#include "expsketch/tanner.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "expsketch/util.hpp"

namespace expsketch {

Vec SparseBinaryMatrix::apply(const Vec& x) const {
  if (static_cast<int>(x.size()) != cols)
    throw std::invalid_argument("apply: vector length != matrix columns");
  Vec y(rows, 0.0);
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) s += x[col_idx[p]];
    y[r] = s;
  }
  return y;
}

Vec SparseBinaryMatrix::apply_parallel(const Vec& x, int threads) const {
  if (static_cast<int>(x.size()) != cols)
    throw std::invalid_argument("apply_parallel: vector length != matrix columns");
  if (threads <= 0) threads = default_thread_count();
  Vec y(rows, 0.0);
  const int chunk = std::max(1, (rows + threads - 1) / threads);
  const std::size_t num_chunks = static_cast<std::size_t>((rows + chunk - 1) / chunk);
  parallel_for(num_chunks, threads, [&](std::size_t c) {
    int begin = static_cast<int>(c) * chunk;
    int end = std::min(rows, begin + chunk);
    for (int r = begin; r < end; ++r) {
      double s = 0.0;
      for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) s += x[col_idx[p]];
      y[r] = s;
    }
  });
  return y;
}

DenseMatrix SparseBinaryMatrix::to_dense() const {
  DenseMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) m.at(r, col_idx[p]) = 1.0;
  return m;
}

void SparseBinaryMatrix::validate() const {
  if (rows < 0 || cols < 0) throw std::invalid_argument("sparse matrix: negative shape");
  if (static_cast<int>(row_ptr.size()) != rows + 1)
    throw std::invalid_argument("sparse matrix: row_ptr size mismatch");
  if (row_ptr.front() != 0 || row_ptr.back() != col_idx.size())
    throw std::invalid_argument("sparse matrix: row_ptr endpoints wrong");
  for (int r = 0; r < rows; ++r) {
    if (row_ptr[r] > row_ptr[r + 1]) throw std::invalid_argument("sparse matrix: row_ptr not monotone");
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      if (col_idx[p] < 0 || col_idx[p] >= cols)
        throw std::invalid_argument("sparse matrix: column index out of range");
      if (p > row_ptr[r] && col_idx[p - 1] >= col_idx[p])
        throw std::invalid_argument("sparse matrix: columns not strictly increasing in a row");
    }
  }
}

TannerMatrix assemble(const DoubleCover& cover, const InnerCode& code) {
  code.validate_fields();
  if (code.d != cover.degree)
    throw std::invalid_argument("assemble: inner code width != cover degree");
  const int n_vert = cover.num_vertices;
  const int k = code.k;
  const int d = code.d;

  TannerMatrix t;
  t.num_vertices = n_vert;
  t.degree = d;
  t.code = code;
  SparseBinaryMatrix& m = t.matrix;
  m.rows = 2 * k * n_vert;
  m.cols = d * n_vert;
  m.row_ptr.assign(m.rows + 1, 0);
  m.col_idx.reserve(2 * static_cast<std::size_t>(n_vert) * code.matrix.ones());

  auto emit_side = [&](const std::vector<std::vector<int>>& gamma, int row_offset) {
    for (int v = 0; v < n_vert; ++v) {
      const std::vector<int>& labels = gamma[v];
      for (int j = 0; j < k; ++j) {
        int row = row_offset + v * k + j;
        for (int i = 0; i < d; ++i) {
          if (code.matrix.get(j, i)) m.col_idx.push_back(labels[i] - 1);
        }
        m.row_ptr[row + 1] = m.col_idx.size();
      }
    }
  };
  emit_side(cover.gamma_left, 0);
  emit_side(cover.gamma_right, k * n_vert);
  m.validate();
  return t;
}

StructureReport structure_report(const SparseBinaryMatrix& m) {
  StructureReport rep;
  rep.rows = m.rows;
  rep.cols = m.cols;
  rep.nnz = m.nnz();
  std::vector<int> col_weight(m.cols, 0);
  for (int c : m.col_idx) ++col_weight[c];
  rep.max_col_weight = col_weight.empty() ? 0 : *std::max_element(col_weight.begin(), col_weight.end());
  rep.rows_per_n_ratio = m.cols > 0 ? static_cast<double>(m.rows) / m.cols : 0.0;
  return rep;
}

void export_matrix_market(const SparseBinaryMatrix& m, const std::string& path) {
  m.validate();
  std::ostringstream out;
  out << "%%MatrixMarket matrix coordinate pattern general\n";
  out << m.rows << ' ' << m.cols << ' ' << m.nnz() << '\n';
  for (int r = 0; r < m.rows; ++r)
    for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p)
      out << r + 1 << ' ' << m.col_idx[p] + 1 << '\n';
  atomic_write_file(path, out.str());
}

SparseBinaryMatrix import_matrix_market(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("matrix market: empty file " + path);
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix")
    throw std::runtime_error("matrix market: bad banner in " + path);
  if (format != "coordinate")
    throw std::runtime_error("matrix market: only coordinate format is supported in " + path);
  if (field != "pattern" && field != "integer")
    throw std::runtime_error("matrix market: field must be pattern or integer in " + path);
  if (symmetry != "general")
    throw std::runtime_error("matrix market: only general symmetry is supported in " + path);

  std::string line;
  long long rows = -1, cols = -1, count = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream sz(line);
    if (!(sz >> rows >> cols >> count)) throw std::runtime_error("matrix market: bad size line in " + path);
    break;
  }
  if (rows <= 0 || cols <= 0 || count <= 0)
    throw std::runtime_error("matrix market: empty or missing matrix in " + path);

  std::vector<std::pair<int, int>> entries;
  entries.reserve(static_cast<std::size_t>(count));
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream es(line);
    long long r, c;
    if (!(es >> r >> c)) throw std::runtime_error("matrix market: bad entry line in " + path);
    long long value = 1;
    if (es >> value) {
      if (value == 0) throw std::runtime_error("matrix market: explicit zero entry in " + path);
    }
    if (r < 1 || r > rows || c < 1 || c > cols)
      throw std::runtime_error("matrix market: entry out of range in " + path);
    entries.emplace_back(static_cast<int>(r - 1), static_cast<int>(c - 1));
  }
  if (static_cast<long long>(entries.size()) != count)
    throw std::runtime_error("matrix market: entry count disagrees with header in " + path);
  std::sort(entries.begin(), entries.end());
  for (std::size_t i = 0; i + 1 < entries.size(); ++i)
    if (entries[i] == entries[i + 1]) throw std::runtime_error("matrix market: duplicate entry in " + path);

  SparseBinaryMatrix m;
  m.rows = static_cast<int>(rows);
  m.cols = static_cast<int>(cols);
  m.row_ptr.assign(m.rows + 1, 0);
  m.col_idx.reserve(entries.size());
  int cur = 0;
  for (auto [r, c] : entries) {
    while (cur < r) m.row_ptr[++cur] = m.col_idx.size();
    m.col_idx.push_back(c);
  }
  while (cur < m.rows) m.row_ptr[++cur] = m.col_idx.size();
  m.validate();
  return m;
}

}  // namespace expsketch
