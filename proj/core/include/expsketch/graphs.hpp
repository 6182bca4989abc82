#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace expsketch {

/// Simple undirected d-regular graph on vertices 0..N-1.
struct RegularGraph {
  int num_vertices = 0;  // N
  int degree = 0;        // d
  std::vector<std::pair<int, int>> edges;   // u < v, lexicographically sorted
  std::vector<std::vector<int>> adjacency;  // sorted neighbor lists
  // Upper bound on the largest-magnitude adjacency eigenvalue off the
  // all-ones line, set by certify_expansion. Always < degree when present.
  std::optional<double> certified_lambda;

  bool has_edge(int u, int v) const;
  void validate() const;  // throws std::invalid_argument on a broken invariant
};

/// Builds adjacency from an edge list and validates regularity/simplicity.
RegularGraph graph_from_edges(int num_vertices, int degree,
                              std::vector<std::pair<int, int>> edges);

RegularGraph complete_graph(int num_vertices);

/// Pairing-model sampler: half-edges are matched greedily with per-pair
/// rejection of loops and repeated edges; stuck tails are repaired by edge
/// switchings, and the whole attempt restarts on failure. Rejects N*d odd and
/// d >= N up front; throws after max_attempts restarts (parameters too dense).
/// Deterministic for a fixed seed.
RegularGraph random_regular(int num_vertices, int degree, std::uint64_t seed,
                            int max_attempts = 200);

struct SpectralEstimate {
  double lambda_hat = 0.0;  // dominant |eigenvalue| on the subspace orthogonal to all-ones
  double residual = 0.0;    // ||A^2 v - theta v|| at the returned iterate
  long iterations = 0;
  bool converged = false;
};

/// Power iteration on A^2 with explicit re-orthogonalization against the
/// all-ones vector every step. Squaring merges +/- eigenvalue pairs, so the
/// iteration does not oscillate on near-bipartite spectra. Stops when the
/// Rayleigh quotient stagnates below tol/10 and the eigenvalue residual
/// certifies lambda_hat to within tol. Start vector is pseudo-random,
/// derived deterministically from the graph. Throws on disconnected input.
SpectralEstimate estimate_second_eigenvalue(const RegularGraph& g, double tol,
                                            long max_iters);

/// Runs the estimate and stores lambda_hat + tol (a safe upper bound) into
/// certified_lambda. Throws without certifying when the iteration has not
/// converged or when lambda_hat + tol >= d, which flags bipartite or
/// disconnected inputs.
SpectralEstimate certify_expansion(RegularGraph& g, double tol = 1e-6, long max_iters = 200000);

/// Plain text format: first line "N d", then one "u v" per edge, 0-indexed,
/// u < v, newline-terminated.
void write_graph_file(const RegularGraph& g, const std::string& path);
RegularGraph read_graph_file(const std::string& path);

struct CoverEdge {
  int left;
  int right;
  int label;  // 1..N*d
};

/// Bipartite lift: both orientations of every source edge, with a fixed
/// labeling (lexicographic in (left, right)) so rebuilds are reproducible.
struct DoubleCover {
  int num_vertices = 0;  // per side
  int degree = 0;
  std::vector<CoverEdge> edges;             // indexed by label - 1
  std::vector<std::vector<int>> gamma_left;   // incident labels, strictly increasing
  std::vector<std::vector<int>> gamma_right;
  void validate() const;
};

DoubleCover double_cover(const RegularGraph& g);

/// Exact |E(S, T)| for S a set of left vertices and T of right vertices.
long long edges_between(const DoubleCover& h, const std::vector<int>& left_set,
                        const std::vector<int>& right_set);

struct MixingTrial {
  int s_size = 0;
  int t_size = 0;
  long long edge_count = 0;
  double expected = 0.0;
  double discrepancy = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

struct MixingReport {
  int trials = 0;
  int violations = 0;
  bool pass = false;
  double max_ratio = 0.0;
  MixingTrial worst;
};

/// Draws `trials` random (S, T) pairs and checks
/// | |E(S,T)| - d|S||T|/N | <= lambda * sqrt(|S||T|). A violation means the
/// lambda certificate is invalid for this graph. Each trial's randomness is
/// derived from (seed, trial index), so results do not depend on scheduling.
MixingReport mixing_check(const DoubleCover& h, double lambda, int trials,
                          std::uint64_t seed);

}  // namespace expsketch
