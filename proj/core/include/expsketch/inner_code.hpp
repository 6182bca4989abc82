#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expsketch/linalg.hpp"

namespace expsketch {

/// Dense 0/1 matrix, row-major bytes.
struct BinaryMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> bits;

  BinaryMatrix() = default;
  BinaryMatrix(int r, int c) : rows(r), cols(c), bits(static_cast<std::size_t>(r) * c, 0) {}

  std::uint8_t get(int r, int c) const { return bits[static_cast<std::size_t>(r) * cols + c]; }
  void set(int r, int c, std::uint8_t v) { bits[static_cast<std::size_t>(r) * cols + c] = v; }

  int max_column_weight() const;
  std::size_t ones() const;
  DenseMatrix to_dense() const;
};

struct SupportValue {
  std::vector<int> support;  // ascending indices, |support| = order
  double max_objective = 0.0;
};

/// Witness that the null space condition fails: a concrete x with
/// ||x_S||_1 > rho ||x_Sbar||_1 + tau ||M x||_1 by more than lp_tol.
struct RnspRefutation {
  std::vector<int> support;
  std::vector<int> signs;  // +1/-1 per support coordinate
  Vec x;
  double lhs = 0.0;
  double rhs = 0.0;
  bool from_unbounded_ray = false;
};

struct RnspCertificate {
  int order = 0;
  double rho = 0.0;
  double tau = 0.0;
  double lp_tol = 0.0;
  // how the certificate was produced (enumeration parameters)
  std::string method;
  // one entry per support of size `order`, lexicographic, value <= 1 + lp_tol
  std::vector<SupportValue> per_support;
};

struct RnspOutcome {
  bool certified = false;
  RnspCertificate certificate;               // populated when certified
  std::optional<RnspRefutation> refutation;  // populated otherwise
};

/// Checks the null space condition of order s with constants (rho, tau) for
/// every support of size exactly s (smaller supports follow by monotonicity
/// of both sides). Per support and sign pattern, solves
///   max sum_{i in S} sigma_i x_i  s.t.  rho ||x_Sbar||_1 + tau ||M x||_1 <= 1
/// and certifies iff every optimum is <= 1 + lp_tol. The x -> -x symmetry
/// pins the sign of the first support coordinate, halving the patterns.
/// Refuses up front when C(n, s) * 2^s exceeds `budget`. Subproblems fan out
/// over `threads` workers; the outcome is ordered by support and therefore
/// deterministic.
RnspOutcome verify_rnsp(const DenseMatrix& m, int s, double rho, double tau,
                        double lp_tol = 1e-8, std::uint64_t budget = 1u << 20,
                        int threads = 0);

/// Smallest tau certifying the property at (s, rho), within a factor 1.01,
/// or +infinity when no finite tau works (some kernel vector of M already
/// violates the rho part). The search probes up to tau = 1e9 before
/// declaring infinity.
double min_tau(const DenseMatrix& m, int s, double rho, double lp_tol = 1e-8,
               std::uint64_t budget = 1u << 20, int threads = 0);

/// Small binary matrix with a certified null space property.
struct InnerCode {
  BinaryMatrix matrix;
  int k = 0;
  int d = 0;
  double delta0 = 0.0;
  double rho0 = 0.0;
  double tau0 = 0.0;
  int column_weight = 0;

  int order() const;  // floor(delta0 * d)
  void validate_fields() const;
};

/// Samples column-sparse binary k x d candidates (k stepping up to row_cap,
/// exactly min(weight_cap, k) ones per column at random rows) and returns the
/// first candidate whose null space property certifies at rho0 with
/// tau0 = min_tau. Deterministic for a fixed seed. Throws after exhausting
/// `attempts` candidates per k, reporting the smallest violation seen.
InnerCode search_inner_code(int d, double delta0, double rho0, int weight_cap,
                            int row_cap, int attempts, std::uint64_t seed,
                            double lp_tol = 1e-8, std::uint64_t budget = 1u << 20,
                            int threads = 0);

/// Text block: "k d delta0 rho0 tau0" then k rows of d characters in {0,1}.
void write_inner_code_file(const InnerCode& code, const std::string& path);
InnerCode read_inner_code_file(const std::string& path);

/// JSON rendering of a certificate, for audit files next to the code.
std::string certificate_to_json(const RnspCertificate& cert);

}  // namespace expsketch
