#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "umcmc/targets.hpp"

using namespace umcmc;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

double mixture_cdf(double x) { return 0.5 * oracle::phi_cdf(x + 4.0) + 0.5 * oracle::phi_cdf(x - 4.0); }

}  // namespace

TEST_CASE("standard normal potential") {
  const auto t = make_std_normal(1);
  CHECK(t.potential(pt({0.0})) == 0.0);
  CHECK(t.potential(pt({2.0})) == 2.0);
  CHECK(make_std_normal(3).potential(pt({1, 1, 1})) == 1.5);
  CHECK(t.oracle()->mean[0] == 0.0);
  CHECK(t.oracle()->variance[0] == 1.0);
  CHECK_THROWS_AS(make_std_normal(0), std::invalid_argument);
}

TEST_CASE("single-component mixture differs from the standard normal by a constant") {
  const auto mix = make_normal_mixture({1.0}, {0.0}, {1.0});
  const auto std1 = make_std_normal(1);
  const double offset = mix.potential(pt({0.0})) - std1.potential(pt({0.0}));
  for (double x = -10.0; x <= 10.0; x += 0.25) {
    CHECK(mix.potential(pt({x})) - std1.potential(pt({x})) == doctest::Approx(offset).epsilon(1e-12));
  }
}

TEST_CASE("bimodal mixture potential, symmetry and moments") {
  const auto t = make_normal_mixture({0.5, 0.5}, {-4.0, 4.0}, {1.0, 1.0});
  CHECK(t.potential(pt({4.0})) == t.potential(pt({-4.0})));
  // -log(0.5 phi(x+4) + 0.5 phi(x-4)) at x = 0 equals 8 + log sqrt(2 pi).
  CHECK(t.potential(pt({0.0})) == doctest::Approx(8.0 + 0.5 * std::log(2.0 * M_PI)).epsilon(1e-14));
  CHECK(t.oracle()->mean[0] == doctest::Approx(0.0));
  CHECK(t.oracle()->variance[0] == doctest::Approx(17.0));
}

TEST_CASE("mixture evaluation is finite far in the tails") {
  const auto t = make_normal_mixture({0.3, 0.7}, {-2.0, 5.0}, {0.1, 3.0});
  for (double x = -100.0; x <= 100.0; x += 0.5) CHECK(std::isfinite(t.potential(pt({x}))));
}

TEST_CASE("mixture validation") {
  CHECK_THROWS_AS(make_normal_mixture({0.5, 0.5}, {0.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_normal_mixture({0.5, 0.5}, {0.0, 1.0}, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_normal_mixture({0.5, 0.6}, {0.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("mixture direct sampler matches the mixture CDF") {
  const auto t = make_normal_mixture({0.5, 0.5}, {-4.0, 4.0}, {1.0, 1.0});
  Stream s(3, 0);
  std::vector<double> draws(100000);
  for (auto& x : draws) x = t.sample(s)[0];
  CHECK(oracle::ks_statistic(draws, mixture_cdf) < oracle::ks_critical(draws.size()));
}

TEST_CASE("AR(1) marginal laws") {
  const auto ar = make_ar1_oracle(0.9, 10.0);
  CHECK(ar.marginal(0).mean == 10.0);
  CHECK(ar.marginal(0).sd == 0.0);
  CHECK(ar.marginal(10).mean == doctest::Approx(10.0 * std::pow(0.9, 10)));
  CHECK(ar.marginal(10).sd == doctest::Approx(std::sqrt(1.0 - std::pow(0.9, 20))));
  const auto iid = make_ar1_oracle(0.0, 3.0);
  CHECK(iid.marginal(1).mean == 0.0);
  CHECK(iid.marginal(1).sd == 1.0);
  CHECK_THROWS_AS(make_ar1_oracle(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("total variation between Normals") {
  CHECK(true_tv_normal(0, 1, 0, 1) == doctest::Approx(0.0));
  CHECK(true_tv_normal(0, 1, 1, 1) == doctest::Approx(2.0 * oracle::phi_cdf(0.5) - 1.0).epsilon(1e-8));
  CHECK(true_tv_normal(3, 2, 0, 1) == doctest::Approx(true_tv_normal(0, 1, 3, 2)).epsilon(1e-10));
  for (double m : {0.0, 0.5, 3.0, 50.0}) {
    const double tv = true_tv_normal(0, 1, m, 0.7);
    CHECK(tv >= 0.0);
    CHECK(tv <= 1.0);
  }
}

TEST_CASE("TV between N(0,1) and N(0,4) agrees with a Monte Carlo estimate") {
  // TV = E_p[max(0, 1 - q/p)] estimated from draws of p.
  Stream s(8, 0);
  std::vector<double> terms(200000);
  for (auto& v : terms) {
    const double x = s.standard_normal();
    const double log_ratio = (-0.5 * x * x / 4.0 - std::log(2.0)) - (-0.5 * x * x);
    v = std::max(0.0, 1.0 - std::exp(log_ratio));
  }
  const auto m = oracle::mean_se(terms);
  CHECK(std::abs(true_tv_normal(0, 1, 0, 2) - m.mean) < 3.0 * m.se);
}

TEST_CASE("oracle moments agree with quadrature of the normalised density") {
  const auto t = make_normal_mixture({0.3, 0.7}, {-2.0, 5.0}, {0.5, 3.0});
  auto density = [&](double x) { return std::exp(-t.potential(pt({x}))); };
  const double z = integrate(density, -60.0, 60.0, 1e-13).value;
  const double m1 = integrate([&](double x) { return x * density(x); }, -60.0, 60.0, 1e-12).value / z;
  const double m2 = integrate([&](double x) { return x * x * density(x); }, -60.0, 60.0, 1e-11).value / z;
  CHECK(z == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(t.oracle()->mean[0] - m1) < 1e-8);
  CHECK(std::abs(t.oracle()->variance[0] - (m2 - m1 * m1)) < 1e-8);
}
