#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "umcmc/poisson.hpp"

using namespace umcmc;

namespace {

Point scalar(double v) { return Point::Constant(1, v); }

TestFunction table(const Eigen::VectorXd& h) {
  return [h](const PointRef& x) { return h[static_cast<Eigen::Index>(x[0])]; };
}

CoupledInitialSampler uniform_states(int n) {
  return independent_initial([n](Stream& s) { return scalar(std::floor(s.uniform() * n)); });
}

Eigen::MatrixXd three_state() {
  Eigen::MatrixXd P(3, 3);
  P << 0.5, 0.3, 0.2,
       0.1, 0.6, 0.3,
       0.4, 0.1, 0.5;
  return P;
}

}  // namespace

TEST_CASE("G vanishes when the two starting points coincide or h is constant") {
  const FiniteStateKernel kernel(three_state());
  const TestFunction constant = [](const PointRef&) { return 2.5; };
  Stream s(1, 0);
  for (int i = 0; i < 100; ++i) {
    REQUIRE(poisson_G(scalar(1), scalar(1), table(Eigen::Vector3d(1, 5, -2)), kernel, s) == 0.0);
    REQUIRE(poisson_G(scalar(0), scalar(2), constant, kernel, s) == 0.0);
  }
}

TEST_CASE("G is unbiased for the Poisson difference on finite chains") {
  struct Setting {
    Eigen::MatrixXd P;
    Eigen::VectorXd h;
    int x, y;
  };
  const std::vector<Setting> settings{
      {oracle::two_state(0.3, 0.2).P, Eigen::Vector2d(0, 1), 0, 1},
      {three_state(), Eigen::Vector3d(1, 5, -2), 0, 2},
      {three_state(), Eigen::Vector3d(1, 5, -2), 1, 0},
  };
  std::uint64_t rep = 0;
  for (const auto& st : settings) {
    const FiniteStateKernel kernel(st.P);
    const double truth = oracle::FiniteChain{st.P}.poisson_difference(st.h, st.x, st.y);
    std::vector<double> v;
    for (int i = 0; i < 20000; ++i) {
      Stream s(2, rep++);
      v.push_back(poisson_G(scalar(st.x), scalar(st.y), table(st.h), kernel, s));
    }
    const auto ms = oracle::mean_se(v);
    CAPTURE(truth);
    CHECK(std::abs(ms.mean - truth) < 4.0 * ms.se);
  }
}

TEST_CASE("G gives up at the sweep cap") {
  Eigen::MatrixXd flip(2, 2);
  flip << 0, 1, 1, 0;
  const FiniteStateKernel kernel(flip);
  Stream s(3, 0);
  CHECK_THROWS_AS(poisson_G(scalar(0), scalar(1), table(Eigen::Vector2d(0, 1)), kernel, s, 100),
                  std::runtime_error);
}

TEST_CASE("asymptotic variance of an exact sampler is the target variance") {
  const auto target = std::make_shared<const TargetDistribution>(make_std_normal(1));
  const IndependenceKernel kernel(target);
  const auto init = independent_initial([](Stream& s) { return scalar(s.standard_normal()); });
  const TestFunction h = [](const PointRef& x) { return x[0]; };
  std::vector<double> v;
  for (int i = 0; i < 10000; ++i) {
    Stream s(4, static_cast<std::uint64_t>(i));
    v.push_back(asymptotic_variance(h, kernel, init, scalar(0.0), {}, s).value);
  }
  const auto ms = oracle::mean_se(v);
  CHECK(std::abs(ms.mean - 1.0) < 4.0 * ms.se);
}

TEST_CASE("asymptotic variance on finite chains matches the spectral oracle") {
  struct Setting {
    Eigen::MatrixXd P;
    Eigen::VectorXd h;
    AsymptoticVarianceOptions options;
  };
  AsymptoticVarianceOptions longer;
  longer.k = 2;
  longer.lag = 3;
  longer.ell = 20;
  longer.m_I = 4;
  const std::vector<Setting> settings{
      {oracle::two_state(0.3, 0.2).P, Eigen::Vector2d(0, 1), {}},
      {oracle::two_state(0.05, 0.1).P, Eigen::Vector2d(0, 1), longer},
      {three_state(), Eigen::Vector3d(1, 5, -2), longer},
  };
  std::uint64_t rep = 0;
  for (const auto& st : settings) {
    const FiniteStateKernel kernel(st.P);
    const auto n = static_cast<int>(st.P.rows());
    const double truth = oracle::FiniteChain{st.P}.asymptotic_variance(st.h);
    std::vector<double> v;
    for (int i = 0; i < 20000; ++i) {
      Stream s(5, rep++);
      v.push_back(asymptotic_variance(table(st.h), kernel, uniform_states(n), scalar(0), st.options, s).value);
    }
    const auto ms = oracle::mean_se(v);
    CAPTURE(truth);
    CAPTURE(ms.mean);
    CHECK(std::abs(ms.mean - truth) < 4.0 * ms.se);
  }
}

TEST_CASE("asymptotic variance of the AR(1) chain") {
  const double rho = 0.5;
  const Ar1Kernel kernel(rho);
  const auto init = independent_initial([](Stream& s) { return scalar(s.standard_normal()); });
  const TestFunction h = [](const PointRef& x) { return x[0]; };
  AsymptoticVarianceOptions options;
  options.ell = 10;
  std::vector<double> v;
  for (int i = 0; i < 10000; ++i) {
    Stream s(6, static_cast<std::uint64_t>(i));
    v.push_back(asymptotic_variance(h, kernel, init, scalar(0.0), options, s).value);
  }
  const auto ms = oracle::mean_se(v);
  CHECK(std::abs(ms.mean - (1 + rho) / (1 - rho)) < 4.0 * ms.se);
}

TEST_CASE("asymptotic variance of a constant function is zero") {
  const FiniteStateKernel kernel(three_state());
  const TestFunction constant = [](const PointRef&) { return -7.0; };
  for (int i = 0; i < 200; ++i) {
    Stream s(7, static_cast<std::uint64_t>(i));
    const auto sample = asymptotic_variance(constant, kernel, uniform_states(3), scalar(1), {}, s);
    REQUIRE(sample.term_a == 0.0);
    REQUIRE(std::abs(sample.value) <= 1e-12);
  }
}
