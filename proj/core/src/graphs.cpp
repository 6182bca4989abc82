#include "expsketch/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "expsketch/linalg.hpp"
#include "expsketch/util.hpp"

namespace expsketch {

bool RegularGraph::has_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices) return false;
  const auto& a = adjacency[u];
  return std::binary_search(a.begin(), a.end(), v);
}

void RegularGraph::validate() const {
  if (num_vertices <= 0) throw std::invalid_argument("graph: N must be positive");
  if (degree <= 0) throw std::invalid_argument("graph: d must be positive");
  if (degree >= num_vertices) throw std::invalid_argument("graph: need d < N");
  if ((static_cast<long long>(num_vertices) * degree) % 2 != 0)
    throw std::invalid_argument("graph: N*d must be even");
  if (static_cast<long long>(edges.size()) != static_cast<long long>(num_vertices) * degree / 2)
    throw std::invalid_argument("graph: edge count != N*d/2");
  if (static_cast<int>(adjacency.size()) != num_vertices)
    throw std::invalid_argument("graph: adjacency size mismatch");
  std::vector<int> deg(num_vertices, 0);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices)
      throw std::invalid_argument("graph: vertex id out of range");
    if (u >= v) throw std::invalid_argument("graph: edges must satisfy u < v (no self-loops)");
    ++deg[u];
    ++deg[v];
  }
  for (int v = 0; v < num_vertices; ++v) {
    if (deg[v] != degree) throw std::invalid_argument("graph: vertex degree != d");
    const auto& a = adjacency[v];
    if (static_cast<int>(a.size()) != degree)
      throw std::invalid_argument("graph: adjacency list length != d");
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
      if (a[i] >= a[i + 1]) throw std::invalid_argument("graph: adjacency not sorted/unique");
    for (int w : a)
      if (w == v) throw std::invalid_argument("graph: self-loop");
  }
  for (auto [u, v] : edges) {
    if (!std::binary_search(adjacency[u].begin(), adjacency[u].end(), v) ||
        !std::binary_search(adjacency[v].begin(), adjacency[v].end(), u))
      throw std::invalid_argument("graph: adjacency/edge list inconsistent");
  }
  if (certified_lambda && !(*certified_lambda < degree))
    throw std::invalid_argument("graph: certified_lambda must be < d");
}

RegularGraph graph_from_edges(int num_vertices, int degree,
                              std::vector<std::pair<int, int>> edges) {
  RegularGraph g;
  g.num_vertices = num_vertices;
  g.degree = degree;
  for (auto& [u, v] : edges)
    if (u > v) std::swap(u, v);
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (edges[i] == edges[i + 1]) throw std::invalid_argument("graph: repeated edge");
  g.edges = std::move(edges);
  g.adjacency.assign(num_vertices, {});
  for (auto [u, v] : g.edges) {
    if (u < 0 || v < 0 || u >= num_vertices || v >= num_vertices)
      throw std::invalid_argument("graph: vertex id out of range");
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
  g.validate();
  return g;
}

RegularGraph complete_graph(int num_vertices) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < num_vertices; ++u)
    for (int v = u + 1; v < num_vertices; ++v) edges.emplace_back(u, v);
  return graph_from_edges(num_vertices, num_vertices - 1, std::move(edges));
}

namespace {

struct PairingState {
  int n;
  std::vector<std::unordered_set<int>> adj;
  std::vector<std::pair<int, int>> edges;

  explicit PairingState(int n_) : n(n_), adj(n_) {}

  bool adjacent(int u, int v) const { return adj[u].count(v) != 0; }

  void add(int u, int v) {
    adj[u].insert(v);
    adj[v].insert(u);
    edges.emplace_back(std::min(u, v), std::max(u, v));
  }

  void remove_edge_at(std::size_t idx) {
    auto [u, v] = edges[idx];
    adj[u].erase(v);
    adj[v].erase(u);
    edges[idx] = edges.back();
    edges.pop_back();
  }
};

// Replaces an existing edge (x, y) with (a, x) and (b, y), consuming one
// spare half-edge at a and one at b while keeping all other degrees intact.
bool repair_pair(PairingState& st, int a, int b, std::mt19937_64& rng) {
  if (a != b && !st.adjacent(a, b)) {
    st.add(a, b);
    return true;
  }
  const std::size_t m = st.edges.size();
  if (m == 0) return false;
  auto try_switch = [&](std::size_t idx) -> bool {
    auto [x, y] = st.edges[idx];
    for (int orient = 0; orient < 2; ++orient) {
      int p = orient == 0 ? x : y;
      int q = orient == 0 ? y : x;
      if (p != a && q != b && p != b && q != a && !st.adjacent(a, p) && !st.adjacent(b, q)) {
        st.remove_edge_at(idx);
        st.add(a, p);
        st.add(b, q);
        return true;
      }
    }
    return false;
  };
  for (int probe = 0; probe < 64; ++probe) {
    if (try_switch(rng() % m)) return true;
  }
  for (std::size_t idx = 0; idx < st.edges.size(); ++idx) {
    if (try_switch(idx)) return true;
  }
  return false;
}

bool pairing_attempt(int n, int d, std::mt19937_64& rng, PairingState& st) {
  std::vector<int> pool;
  pool.reserve(static_cast<std::size_t>(n) * d);
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < d; ++i) pool.push_back(v);
  std::shuffle(pool.begin(), pool.end(), rng);

  std::vector<int> leftovers;
  while (pool.size() >= 2) {
    int a = pool.back();
    pool.pop_back();
    bool matched = false;
    for (int probe = 0; probe < 32 && !matched; ++probe) {
      std::size_t idx = rng() % pool.size();
      int b = pool[idx];
      if (b != a && !st.adjacent(a, b)) {
        st.add(a, b);
        pool[idx] = pool.back();
        pool.pop_back();
        matched = true;
      }
    }
    if (!matched) {
      // fall back to a scan so we only give up when truly stuck
      for (std::size_t idx = 0; idx < pool.size(); ++idx) {
        int b = pool[idx];
        if (b != a && !st.adjacent(a, b)) {
          st.add(a, b);
          pool[idx] = pool.back();
          pool.pop_back();
          matched = true;
          break;
        }
      }
    }
    if (!matched) leftovers.push_back(a);
  }
  leftovers.insert(leftovers.end(), pool.begin(), pool.end());

  // leftover half-edge count is even; repair pairwise via switchings
  for (std::size_t i = 0; i + 1 < leftovers.size(); i += 2) {
    if (!repair_pair(st, leftovers[i], leftovers[i + 1], rng)) return false;
  }
  return true;
}

}  // namespace

RegularGraph random_regular(int num_vertices, int degree, std::uint64_t seed,
                            int max_attempts) {
  if (num_vertices <= 0 || degree <= 0)
    throw std::invalid_argument("random_regular: N and d must be positive");
  if (degree >= num_vertices)
    throw std::invalid_argument("random_regular: need d < N");
  if ((static_cast<long long>(num_vertices) * degree) % 2 != 0)
    throw std::invalid_argument("random_regular: N*d must be even");

  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(attempt), 0xa11ce));
    PairingState st(num_vertices);
    if (!pairing_attempt(num_vertices, degree, rng, st)) continue;
    return graph_from_edges(num_vertices, degree, std::move(st.edges));
  }
  throw std::runtime_error(
      "random_regular: failed to sample a simple graph after bounded retries "
      "(parameters too dense)");
}

namespace {

bool is_connected(const RegularGraph& g) {
  if (g.num_vertices == 0) return false;
  std::vector<char> seen(g.num_vertices, 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int count = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int v : g.adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        queue.push_back(v);
      }
    }
  }
  return count == g.num_vertices;
}

// y = A x followed by projection off the all-ones direction.
void apply_projected(const std::vector<int>& flat_adj, int n, int d,
                     const std::vector<double>& x, std::vector<double>& y) {
  for (int v = 0; v < n; ++v) {
    double s = 0.0;
    const int* nb = &flat_adj[static_cast<std::size_t>(v) * d];
    for (int i = 0; i < d; ++i) s += x[nb[i]];
    y[v] = s;
  }
  double mean = 0.0;
  for (double t : y) mean += t;
  mean /= n;
  for (double& t : y) t -= mean;
}

}  // namespace

SpectralEstimate estimate_second_eigenvalue(const RegularGraph& g, double tol,
                                            long max_iters) {
  g.validate();
  if (tol <= 0) throw std::invalid_argument("estimate_second_eigenvalue: tol must be positive");
  if (!is_connected(g))
    throw std::invalid_argument("estimate_second_eigenvalue: graph is disconnected");

  const int n = g.num_vertices;
  const int d = g.degree;
  std::vector<int> flat_adj(static_cast<std::size_t>(n) * d);
  for (int v = 0; v < n; ++v)
    std::copy(g.adjacency[v].begin(), g.adjacency[v].end(),
              flat_adj.begin() + static_cast<std::size_t>(v) * d);

  // deterministic pseudo-random start derived from the graph itself
  std::string desc;
  desc.reserve(g.edges.size() * 8 + 16);
  desc += std::to_string(n) + ":" + std::to_string(d);
  for (auto [u, v] : g.edges) {
    desc += ',';
    desc += std::to_string(u);
    desc += '-';
    desc += std::to_string(v);
  }
  std::mt19937_64 rng(fnv1a64(desc));
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> v(n), w(n), w2(n);
  for (double& t : v) t = gauss(rng);
  double mean = 0.0;
  for (double t : v) mean += t;
  mean /= n;
  for (double& t : v) t -= mean;
  double nv = norm2(v);
  if (nv < 1e-30) throw std::runtime_error("estimate_second_eigenvalue: degenerate start vector");
  for (double& t : v) t /= nv;

  SpectralEstimate est;
  double prev_lambda = -1.0;
  for (long it = 1; it <= max_iters; ++it) {
    apply_projected(flat_adj, n, d, v, w);
    apply_projected(flat_adj, n, d, w, w2);
    double theta = dot(v, w2);
    double res2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = w2[i] - theta * v[i];
      res2 += r * r;
    }
    double residual = std::sqrt(res2);
    double lambda_hat = std::sqrt(std::max(theta, 0.0));
    est.lambda_hat = lambda_hat;
    est.residual = residual;
    est.iterations = it;
    bool stagnant = prev_lambda >= 0.0 && std::abs(lambda_hat - prev_lambda) <= tol / 10.0;
    bool certified = residual <= tol * std::max(lambda_hat, 1e-12);
    if (stagnant && certified) {
      est.converged = true;
      return est;
    }
    prev_lambda = lambda_hat;
    double nw = norm2(w2);
    if (nw < 1e-300) {
      // A^2 annihilated the iterate; restart from a fresh direction
      for (double& t : v) t = gauss(rng);
      double m2 = 0.0;
      for (double t : v) m2 += t;
      m2 /= n;
      for (double& t : v) t -= m2;
      double nrm = norm2(v);
      for (double& t : v) t /= nrm;
      continue;
    }
    for (int i = 0; i < n; ++i) v[i] = w2[i] / nw;
  }
  est.converged = false;
  return est;
}

SpectralEstimate certify_expansion(RegularGraph& g, double tol, long max_iters) {
  SpectralEstimate est = estimate_second_eigenvalue(g, tol, max_iters);
  if (!est.converged) {
    throw std::runtime_error(
        "certify_expansion: power iteration did not converge after " +
        std::to_string(est.iterations) + " iterations (last Rayleigh estimate " +
        std::to_string(est.lambda_hat) + ", residual " + std::to_string(est.residual) +
        "); eigenvalue gap too small, not certifying");
  }
  double bound = est.lambda_hat + tol;
  if (!(bound < g.degree)) {
    throw std::runtime_error(
        "certify_expansion: lambda_hat + tol = " + std::to_string(bound) +
        " is not below d = " + std::to_string(g.degree) +
        "; graph is bipartite or disconnected, refusing to certify");
  }
  g.certified_lambda = bound;
  return est;
}

void write_graph_file(const RegularGraph& g, const std::string& path) {
  g.validate();
  std::ostringstream out;
  out << g.num_vertices << ' ' << g.degree << '\n';
  for (auto [u, v] : g.edges) out << u << ' ' << v << '\n';
  atomic_write_file(path, out.str());
}

RegularGraph read_graph_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  int n = 0, d = 0;
  if (!(in >> n >> d)) throw std::runtime_error("graph file: bad header in " + path);
  std::vector<std::pair<int, int>> edges;
  int u, v;
  while (in >> u >> v) {
    if (u >= v) throw std::runtime_error("graph file: edges must satisfy u < v in " + path);
    edges.emplace_back(u, v);
  }
  if (!in.eof() && in.fail()) {
    in.clear();
    std::string tail;
    in >> tail;
    if (!tail.empty()) throw std::runtime_error("graph file: trailing garbage in " + path);
  }
  return graph_from_edges(n, d, std::move(edges));
}

void DoubleCover::validate() const {
  const long long total = static_cast<long long>(num_vertices) * degree;
  if (static_cast<long long>(edges.size()) != total)
    throw std::invalid_argument("double cover: edge count != N*d");
  std::vector<char> seen(total + 1, 0);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const CoverEdge& e = edges[i];
    if (e.label < 1 || e.label > total) throw std::invalid_argument("double cover: label out of range");
    if (seen[e.label]) throw std::invalid_argument("double cover: repeated label");
    seen[e.label] = 1;
    if (static_cast<int>(i) + 1 != e.label)
      throw std::invalid_argument("double cover: edges must be indexed by label");
    if (e.left < 0 || e.left >= num_vertices || e.right < 0 || e.right >= num_vertices)
      throw std::invalid_argument("double cover: vertex out of range");
  }
  if (static_cast<int>(gamma_left.size()) != num_vertices ||
      static_cast<int>(gamma_right.size()) != num_vertices)
    throw std::invalid_argument("double cover: gamma size mismatch");
  std::vector<char> in_left(total + 1, 0), in_right(total + 1, 0);
  for (int side = 0; side < 2; ++side) {
    const auto& gamma = side == 0 ? gamma_left : gamma_right;
    auto& used = side == 0 ? in_left : in_right;
    for (int v = 0; v < num_vertices; ++v) {
      if (static_cast<int>(gamma[v].size()) != degree)
        throw std::invalid_argument("double cover: gamma tuple length != d");
      for (std::size_t i = 0; i < gamma[v].size(); ++i) {
        int lbl = gamma[v][i];
        if (lbl < 1 || lbl > total) throw std::invalid_argument("double cover: gamma label out of range");
        if (i > 0 && gamma[v][i - 1] >= lbl)
          throw std::invalid_argument("double cover: gamma tuple not strictly increasing");
        if (used[lbl]) throw std::invalid_argument("double cover: label in two gamma tuples on one side");
        used[lbl] = 1;
        const CoverEdge& e = edges[lbl - 1];
        if ((side == 0 ? e.left : e.right) != v)
          throw std::invalid_argument("double cover: gamma/edge endpoint mismatch");
      }
    }
  }
  // both orientations present: (u,v) with label implies some (v,u)
  for (const CoverEdge& e : edges) {
    const auto& g = gamma_left[e.right];
    bool found = false;
    for (int lbl : g)
      if (edges[lbl - 1].right == e.left) { found = true; break; }
    if (!found) throw std::invalid_argument("double cover: missing reverse orientation");
  }
}

DoubleCover double_cover(const RegularGraph& g) {
  g.validate();
  DoubleCover h;
  h.num_vertices = g.num_vertices;
  h.degree = g.degree;
  h.edges.reserve(static_cast<std::size_t>(g.num_vertices) * g.degree);
  h.gamma_left.assign(g.num_vertices, {});
  h.gamma_right.assign(g.num_vertices, {});
  int label = 1;
  for (int u = 0; u < g.num_vertices; ++u) {
    for (int v : g.adjacency[u]) {  // ascending, so labels are lexicographic in (left, right)
      h.edges.push_back(CoverEdge{u, v, label});
      h.gamma_left[u].push_back(label);
      h.gamma_right[v].push_back(label);
      ++label;
    }
  }
  return h;
}

long long edges_between(const DoubleCover& h, const std::vector<int>& left_set,
                        const std::vector<int>& right_set) {
  std::vector<char> in_right(h.num_vertices, 0);
  for (int v : right_set) {
    if (v < 0 || v >= h.num_vertices)
      throw std::invalid_argument("edges_between: right vertex out of range");
    in_right[v] = 1;
  }
  long long count = 0;
  for (int u : left_set) {
    if (u < 0 || u >= h.num_vertices)
      throw std::invalid_argument("edges_between: left vertex out of range");
    for (int lbl : h.gamma_left[u])
      if (in_right[h.edges[lbl - 1].right]) ++count;
  }
  return count;
}

MixingReport mixing_check(const DoubleCover& h, double lambda, int trials,
                          std::uint64_t seed) {
  if (trials < 0) throw std::invalid_argument("mixing_check: trials must be nonnegative");
  const int n = h.num_vertices;
  MixingReport report;
  report.trials = trials;
  report.pass = true;
  std::vector<int> ids(n);
  std::vector<char> in_right(n, 0);
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(trial), 0x317a));
    int s_size = static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1));
    int t_size = static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1));
    for (int i = 0; i < n; ++i) ids[i] = i;
    // partial Fisher-Yates: the first s_size entries become S
    for (int i = 0; i < s_size; ++i) {
      int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(n - i));
      std::swap(ids[i], ids[j]);
    }
    std::vector<int> s_set(ids.begin(), ids.begin() + s_size);
    for (int i = 0; i < n; ++i) ids[i] = i;
    for (int i = 0; i < t_size; ++i) {
      int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(n - i));
      std::swap(ids[i], ids[j]);
    }
    std::fill(in_right.begin(), in_right.end(), 0);
    for (int i = 0; i < t_size; ++i) in_right[ids[i]] = 1;

    long long count = 0;
    for (int u : s_set)
      for (int lbl : h.gamma_left[u])
        if (in_right[h.edges[lbl - 1].right]) ++count;

    MixingTrial t;
    t.s_size = s_size;
    t.t_size = t_size;
    t.edge_count = count;
    t.expected = static_cast<double>(h.degree) * s_size * t_size / n;
    t.discrepancy = std::abs(count - t.expected);
    t.bound = lambda * std::sqrt(static_cast<double>(s_size) * t_size);
    t.ratio = t.bound > 0 ? t.discrepancy / t.bound : (t.discrepancy > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (t.discrepancy > t.bound + 1e-9) {
      ++report.violations;
      report.pass = false;
    }
    if (t.ratio > report.max_ratio) {
      report.max_ratio = t.ratio;
      report.worst = t;
    }
  }
  return report;
}

}  // namespace expsketch
