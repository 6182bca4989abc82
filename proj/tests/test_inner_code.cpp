#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "json.hpp"

#include "expsketch/inner_code.hpp"
#include "oracles.hpp"

using namespace expsketch;

namespace {

DenseMatrix identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

DenseMatrix random_binary(int rows, int cols, std::mt19937_64& rng, double density = 0.5) {
  DenseMatrix m(rows, cols);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m.at(r, c) = unif(rng) < density ? 1.0 : 0.0;
  return m;
}

// permutation plus a few sprinkled ones: full column rank with high
// probability, so certification succeeds at a finite tau
DenseMatrix random_augmented_permutation(int n, int extra, std::mt19937_64& rng) {
  DenseMatrix m(n, n);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = 0; i < n - 1; ++i) {
    int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(n - i));
    std::swap(perm[i], perm[j]);
  }
  for (int i = 0; i < n; ++i) m.at(perm[i], i) = 1.0;
  for (int e = 0; e < extra; ++e)
    m.at(static_cast<int>(rng() % n), static_cast<int>(rng() % n)) = 1.0;
  return m;
}

double replay_violation(const DenseMatrix& m, const RnspRefutation& ref, double rho, double tau) {
  std::vector<char> in_support(m.cols, 0);
  for (int j : ref.support) in_support[j] = 1;
  double on = 0.0, off = 0.0;
  for (int j = 0; j < m.cols; ++j) (in_support[j] ? on : off) += std::abs(ref.x[j]);
  return on - (rho * off + tau * norm1(m.apply(ref.x)));
}

}  // namespace

TEST_CASE("identity matrices certify at tau = 1") {
  for (int n : {3, 5, 8}) {
    for (int s : {1, 2, n}) {
      RnspOutcome out = verify_rnsp(identity(n), s, 0.25, 1.0);
      CHECK(out.certified);
    }
  }
}

TEST_CASE("the zero matrix is refuted by a unit vector") {
  DenseMatrix zero(4, 4);
  RnspOutcome out = verify_rnsp(zero, 1, 0.5, 1e6);
  REQUIRE_FALSE(out.certified);
  REQUIRE(out.refutation.has_value());
  CHECK(out.refutation->from_unbounded_ray);
  // witness replays: x has support mass but zero off-support/measurement mass
  CHECK(replay_violation(zero, *out.refutation, 0.5, 1e6) > 1e-8);
}

TEST_CASE("verify_rnsp enforces its preconditions") {
  DenseMatrix m = identity(4);
  CHECK_THROWS_AS(verify_rnsp(m, 0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(verify_rnsp(m, 5, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(verify_rnsp(m, 1, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(verify_rnsp(m, 1, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(verify_rnsp(m, 2, 0.5, 1.0, 1e-8, /*budget=*/4), std::invalid_argument);
}

TEST_CASE("verify_rnsp agrees with the vertex-enumeration oracle") {
  std::mt19937_64 rng(314);
  int refuted = 0, certified = 0;
  auto compare = [&](const DenseMatrix& m, double tau) {
    RnspOutcome mine = verify_rnsp(m, 2, 1.0 / 3.0, tau);
    oracles::RnspVerdict ref = oracles::rnsp_oracle(m, 2, 1.0 / 3.0, tau);
    CHECK(mine.certified == ref.certified);
    if (mine.certified) {
      ++certified;
      double worst = 0.0;
      for (const auto& sv : mine.certificate.per_support)
        worst = std::max(worst, sv.max_objective);
      CHECK(worst == doctest::Approx(ref.max_value).epsilon(1e-6));
    } else {
      ++refuted;
      REQUIRE(mine.refutation.has_value());
      CHECK(replay_violation(m, *mine.refutation, 1.0 / 3.0, tau) > 1e-8);
    }
  };
  // wide random matrices have concentrated kernel vectors and mostly refute
  for (int inst = 0; inst < 14; ++inst)
    compare(random_binary(6, 10, rng), 0.5 + 0.25 * static_cast<double>(inst % 5));
  // full-column-rank instances certify once tau is generous
  for (int inst = 0; inst < 6; ++inst)
    compare(random_augmented_permutation(8, 3, rng), 4.0);
  // the sample should exercise both verdicts
  CHECK(refuted > 0);
  CHECK(certified > 0);
}

TEST_CASE("certification is monotone in rho and tau") {
  std::mt19937_64 rng(1618);
  int checked = 0;
  for (int inst = 0; inst < 12 && checked < 4; ++inst) {
    DenseMatrix m = random_augmented_permutation(7, 2, rng);
    RnspOutcome base = verify_rnsp(m, 2, 0.3, 4.0);
    if (!base.certified) continue;
    ++checked;
    CHECK(verify_rnsp(m, 2, 0.45, 4.0).certified);
    CHECK(verify_rnsp(m, 2, 0.3, 8.0).certified);
    CHECK(verify_rnsp(m, 2, 0.45, 8.0).certified);
  }
  CHECK(checked > 0);
}

TEST_CASE("certification is scale covariant") {
  std::mt19937_64 rng(2718);
  DenseMatrix m = random_binary(6, 8, rng);
  DenseMatrix scaled = m;
  for (double& v : scaled.data) v *= 4.0;
  for (double tau : {0.5, 1.0, 2.0}) {
    RnspOutcome a = verify_rnsp(m, 2, 0.3, tau);
    RnspOutcome b = verify_rnsp(scaled, 2, 0.3, tau / 4.0);
    CHECK(a.certified == b.certified);
    if (a.certified && b.certified) {
      for (std::size_t i = 0; i < a.certificate.per_support.size(); ++i)
        CHECK(a.certificate.per_support[i].max_objective ==
              doctest::Approx(b.certificate.per_support[i].max_objective).epsilon(1e-7));
    }
  }
}

TEST_CASE("certified matrices survive 1e5 random l1-sphere probes") {
  std::mt19937_64 rng(99);
  int tested = 0;
  for (int inst = 0; inst < 10 && tested < 3; ++inst) {
    DenseMatrix m = random_augmented_permutation(9, 3, rng);
    RnspOutcome out = verify_rnsp(m, 2, 0.3, 4.0);
    if (!out.certified) continue;
    ++tested;
    CHECK_FALSE(oracles::rnsp_sampling_refuter(m, 2, 0.3, 4.0, 100000, 1234 + inst));
  }
  CHECK(tested > 0);
}

TEST_CASE("min_tau brackets the smallest certifying tau") {
  CHECK(min_tau(identity(5), 2, 0.3) <= 1.0 + 1e-9);
  CHECK(std::isinf(min_tau(DenseMatrix(4, 4), 1, 0.5)));

  std::mt19937_64 rng(555);
  int tested = 0;
  for (int inst = 0; inst < 10 && tested < 3; ++inst) {
    DenseMatrix m = random_augmented_permutation(8, 2, rng);
    double tau_star = min_tau(m, 2, 0.3);
    if (!std::isfinite(tau_star)) continue;
    ++tested;
    CHECK(verify_rnsp(m, 2, 0.3, tau_star).certified);
    CHECK_FALSE(verify_rnsp(m, 2, 0.3, tau_star / 1.02).certified);
  }
  CHECK(tested > 0);
}

TEST_CASE("search finds a certified code at d=8, order 2") {
  InnerCode code = search_inner_code(8, 0.25, 0.3, 3, 8, 200, /*seed=*/1);
  code.validate_fields();
  CHECK(code.order() == 2);
  CHECK(code.k <= 8);
  CHECK(code.column_weight == 3);
  RnspOutcome audit = verify_rnsp(code.matrix.to_dense(), 2, code.rho0, code.tau0);
  CHECK(audit.certified);
}

TEST_CASE("search fails cleanly when the order needs a trivial kernel") {
  // order d with fewer than d rows forces a kernel violation for every candidate
  CHECK_THROWS_AS(search_inner_code(4, 1.0, 0.3, 2, 2, 40, 0), std::runtime_error);
}

TEST_CASE("weight-1 search can fall back to a permutation of the identity") {
  InnerCode code = search_inner_code(4, 0.5, 0.3, 1, 4, 500, /*seed=*/3);
  CHECK(code.k == 4);
  CHECK(code.column_weight == 1);
  CHECK(code.tau0 <= 1.02);
}

TEST_CASE("inner code files round-trip") {
  InnerCode code = search_inner_code(6, 1.0 / 3.0, 0.25, 2, 6, 300, 5);
  std::string path = (std::filesystem::temp_directory_path() / "expsketch_code_test.txt").string();
  write_inner_code_file(code, path);
  InnerCode back = read_inner_code_file(path);
  CHECK(back.k == code.k);
  CHECK(back.d == code.d);
  CHECK(back.delta0 == code.delta0);
  CHECK(back.rho0 == code.rho0);
  CHECK(back.tau0 == code.tau0);
  CHECK(back.matrix.bits == code.matrix.bits);
  std::remove(path.c_str());
}

TEST_CASE("certificates serialize with one entry per support") {
  RnspOutcome out = verify_rnsp(identity(5), 2, 0.25, 1.0);
  REQUIRE(out.certified);
  auto j = nlohmann::json::parse(certificate_to_json(out.certificate));
  CHECK(j["order"] == 2);
  CHECK(j["per_support"].size() == 10);  // C(5,2)
  for (const auto& entry : j["per_support"]) CHECK(entry["max_objective"].get<double>() <= 1.0 + 1e-8);
}
