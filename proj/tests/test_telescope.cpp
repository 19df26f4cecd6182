#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "umcmc/telescope.hpp"

using namespace umcmc;

namespace {

const Sequence halves = [](std::int64_t k) { return std::ldexp(1.0, -static_cast<int>(k)); };

// Draws a level whose probability it reports as zero.
class Leaky final : public TruncationLaw {
 public:
  double pmf(std::int64_t) const override { return 0.0; }
  double tail(std::int64_t k) const override { return k <= 0 ? 1.0 : 0.0; }
  std::int64_t sample(Stream&) const override { return 2; }
};

}  // namespace

TEST_CASE("geometric truncation law") {
  const GeometricTruncation law(0.3);
  CHECK(law.pmf(0) == doctest::Approx(0.3));
  CHECK(law.pmf(3) == doctest::Approx(0.3 * 0.7 * 0.7 * 0.7));
  CHECK(law.tail(0) == 1.0);
  CHECK(law.tail(4) == doctest::Approx(std::pow(0.7, 4)));
  double cumulative = 0.0;
  for (std::int64_t k = 0; k < 10; ++k) {
    cumulative += law.pmf(k);
    CHECK(1.0 - cumulative == doctest::Approx(law.tail(k + 1)));
  }

  Stream s(1, 0);
  const int n = 200000;
  std::vector<int> counts(8, 0);
  for (int i = 0; i < n; ++i) {
    const auto k = law.sample(s);
    REQUIRE(k >= 0);
    if (k < 8) ++counts[static_cast<std::size_t>(k)];
  }
  for (std::int64_t k = 0; k < 8; ++k) {
    const double p = law.pmf(k);
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(counts[static_cast<std::size_t>(k)] / double(n) - p) < 4.5 * se);
  }
  CHECK_THROWS_AS(GeometricTruncation(0.0), std::invalid_argument);
  CHECK_THROWS_AS(GeometricTruncation(1.5), std::invalid_argument);
  CHECK(GeometricTruncation(1.0).sample(s) == 0);
}

TEST_CASE("single-term estimator on a_k = 2^-k with geometric(1/2) is exactly 2") {
  const GeometricTruncation law(0.5);
  Stream s(2, 0);
  for (int i = 0; i < 10000; ++i) REQUIRE(telescope_single_term(halves, law, s) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("coupled-sum estimator on a_k = 2^-k with geometric(1/2) equals 1 + xi") {
  const GeometricTruncation law(0.5);
  Stream draw(3, 0);
  Stream level(3, 0);
  std::vector<double> v;
  for (int i = 0; i < 100000; ++i) {
    const double h = telescope_coupled_sum(halves, law, draw);
    REQUIRE(h == doctest::Approx(1.0 + static_cast<double>(law.sample(level))).epsilon(1e-12));
    v.push_back(h);
  }
  const auto ms = oracle::mean_se(v);
  CHECK(std::abs(ms.mean - 2.0) < 4.0 * ms.se);
  // Var(1 + xi) = (1 - p) / p^2 = 2.
  CHECK(ms.var == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("both estimators are unbiased for a slower series") {
  // sum_k 0.8^k = 5
  const Sequence a = [](std::int64_t k) { return std::pow(0.8, static_cast<double>(k)); };
  const GeometricTruncation law(0.1);
  Stream s(4, 0);
  std::vector<double> single, coupled;
  for (int i = 0; i < 200000; ++i) {
    single.push_back(telescope_single_term(a, law, s));
    coupled.push_back(telescope_coupled_sum(a, law, s));
  }
  const auto m1 = oracle::mean_se(single);
  const auto m2 = oracle::mean_se(coupled);
  CHECK(std::abs(m1.mean - 5.0) < 4.0 * m1.se);
  CHECK(std::abs(m2.mean - 5.0) < 4.0 * m2.se);
}

TEST_CASE("point-mass truncation is deterministic") {
  const PointMassTruncation law(4);
  Stream s(5, 0);
  double partial = 0.0;
  for (std::int64_t k = 0; k <= 4; ++k) partial += halves(k);
  CHECK(telescope_coupled_sum(halves, law, s) == partial);
  CHECK(telescope_single_term(halves, law, s) == halves(4));
  CHECK(law.tail(4) == 1.0);
  CHECK(law.tail(5) == 0.0);
  CHECK_THROWS_AS(PointMassTruncation(-1), std::invalid_argument);
}

TEST_CASE("a drawn level of zero probability is an error") {
  const Leaky law;
  Stream s(6, 0);
  CHECK_THROWS_AS(telescope_single_term(halves, law, s), std::domain_error);
  CHECK_THROWS_AS(telescope_coupled_sum(halves, law, s), std::domain_error);
}
