#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "umcmc/diagnostics.hpp"

using namespace umcmc;

namespace {

Point scalar(double v) { return Point::Constant(1, v); }

// #{j >= 1 : k + jL < tau}
std::int64_t count_terms(std::int64_t tau, std::int64_t lag, std::int64_t k) {
  std::int64_t n = 0;
  for (std::int64_t j = 1; k + j * lag < tau; ++j) ++n;
  return n;
}

MeetingTimeSample sample_of(std::int64_t lag, std::vector<std::int64_t> tau) {
  MeetingTimeSample m;
  m.lag = lag;
  m.tau = std::move(tau);
  for (std::size_t i = 0; i < m.tau.size(); ++i) m.replicate_indices.push_back(i);
  return m;
}

std::vector<CoupledTrajectory> bimodal_runs(std::int64_t lag, int count, Eigen::Index dim) {
  std::shared_ptr<const TargetDistribution> target =
      dim == 1 ? std::make_shared<const TargetDistribution>(make_normal_mixture({0.5, 0.5}, {-4, 4}, {1, 1}))
               : std::make_shared<const TargetDistribution>(make_std_normal(dim));
  const MrthKernel kernel(target, scalar(dim == 1 ? 2.0 : 0.5));
  const auto init = independent_initial([dim](Stream& s) {
    Point x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x[i] = 4.0 * s.standard_normal();
    return x;
  });
  std::vector<CoupledTrajectory> out;
  for (int c = 0; c < count; ++c) {
    Stream s(11, static_cast<std::uint64_t>(c));
    out.push_back(run_lagged_coupling(init, kernel, {lag, 0, 1000000, StoragePolicy::pre_meeting}, s));
  }
  return out;
}

double distance(const Point& a, const Point& b, Norm norm) {
  const Eigen::VectorXd d = a - b;
  switch (norm) {
    case Norm::l1: return d.cwiseAbs().sum();
    case Norm::max: return d.cwiseAbs().maxCoeff();
    default: return std::sqrt(d.dot(d));
  }
}

}  // namespace

TEST_CASE("TV summand") {
  CHECK(tv_summand(12, 5, 0) == 2);
  CHECK(tv_summand(12, 5, 2) == 1);
  CHECK(tv_summand(12, 5, 7) == 0);
  CHECK(tv_summand(12, 5, 100) == 0);
  CHECK(tv_summand(2, 1, 0) == 1);
  for (std::int64_t lag = 1; lag <= 12; ++lag) {
    for (std::int64_t tau = lag + 1; tau <= 80; ++tau) {
      for (std::int64_t k = 0; k <= 90; ++k) REQUIRE(tv_summand(tau, lag, k) == count_terms(tau, lag, k));
    }
  }
}

TEST_CASE("TV bound of an exact sampler") {
  const auto target = std::make_shared<const TargetDistribution>(make_std_normal(1));
  const IndependenceKernel kernel(target);
  const auto init = independent_initial([](Stream& s) { return scalar(10 + s.standard_normal()); });
  for (std::int64_t lag : {1, 3}) {
    const auto m = sample_meeting_times(init, kernel, {lag, 500, 100, 1}, 12);
    REQUIRE(m.size() == 500);
    CHECK(tv_bound(m, 0) == 1.0);
    CHECK(tv_bound(m, 1) == 0.0);
  }
}

TEST_CASE("TV curve agrees with pointwise bounds") {
  const auto m = sample_of(5, {6, 12, 40, 7, 23, 23, 91});
  const auto curve = tv_bound_curve(m);
  CHECK(curve.k.back() == 91 - 5);
  CHECK(curve.values.back() == 0.0);
  CHECK(curve.replicates == 7);
  for (std::size_t i = 0; i < curve.k.size(); ++i) {
    std::vector<double> summands;
    for (auto tau : m.tau) summands.push_back(static_cast<double>(count_terms(tau, 5, curve.k[i])));
    const auto ms = oracle::mean_se(summands);
    REQUIRE(curve.values[i] == doctest::Approx(ms.mean).epsilon(1e-14));
    REQUIRE(curve.values[i] == tv_bound(m, curve.k[i]));
    REQUIRE(curve.clipped[i] == std::min(curve.values[i], 1.0));
    REQUIRE(curve.std_errors[i] == doctest::Approx(ms.se).epsilon(1e-12));
  }
  CHECK(tv_bound_curve(m, 3).k.size() == 4);
}

TEST_CASE("W1 summands match a direct sum over the stored states") {
  for (Eigen::Index dim : {1, 3}) {
    for (std::int64_t lag : {1, 4}) {
      for (const auto& t : bimodal_runs(lag, 50, dim)) {
        REQUIRE(t.met);
        for (Norm norm : {Norm::euclidean, Norm::l1, Norm::max}) {
          const auto s = w1_summands(t, norm);
          REQUIRE(static_cast<std::int64_t>(s.size()) == std::max<std::int64_t>(0, t.tau - lag));
          for (std::int64_t k = 0; k < t.tau - lag; ++k) {
            double direct = 0.0;
            for (std::int64_t j = 1; k + j * lag < t.tau; ++j) {
              direct += distance(t.x[static_cast<std::size_t>(k + j * lag)],
                                 t.y[static_cast<std::size_t>(k + (j - 1) * lag)], norm);
            }
            REQUIRE(s[static_cast<std::size_t>(k)] == doctest::Approx(direct).epsilon(1e-12));
          }
        }
      }
    }
  }
}

TEST_CASE("W1 curve is the zero-padded mean of summands") {
  const std::vector<std::vector<double>> summands{{3.0, 1.0}, {}, {2.0, 2.0, 2.0, 0.5}};
  const auto curve = w1_curve_from_summands(2, summands, {0, 1, 3, 10});
  REQUIRE(curve.values.size() == 4);
  CHECK(curve.values[0] == doctest::Approx(5.0 / 3));
  CHECK(curve.values[1] == doctest::Approx(1.0));
  CHECK(curve.values[2] == doctest::Approx(0.5 / 3));
  CHECK(curve.values[3] == 0.0);
  CHECK(curve.clipped == curve.values);
  CHECK(curve.metric == BoundMetric::w1);

  const auto runs = bimodal_runs(3, 30, 1);
  const std::vector<std::int64_t> grid{0, 5, 20};
  const auto a = w1_bound_curve(runs, grid);
  std::vector<std::vector<double>> direct;
  for (const auto& t : runs) direct.push_back(w1_summands(t));
  const auto b = w1_curve_from_summands(3, direct, grid);
  CHECK(a.values == b.values);
}

TEST_CASE("norm names") {
  CHECK(parse_norm("l1") == Norm::l1);
  CHECK(parse_norm("max") == Norm::max);
  CHECK(parse_norm("euclidean") == Norm::euclidean);
  CHECK(to_string(Norm::l1) == "l1");
  CHECK_THROWS_AS(parse_norm("l7"), std::invalid_argument);
}

TEST_CASE("type-7 empirical quantile") {
  CHECK(empirical_quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(empirical_quantile({4, 1, 3, 2}, 0.0) == 1.0);
  CHECK(empirical_quantile({4, 1, 3, 2}, 1.0) == 4.0);
  CHECK(empirical_quantile({7}, 0.3) == 7.0);
  Stream s(13, 0);
  std::vector<double> v;
  for (int i = 0; i < 37; ++i) v.push_back(s.standard_normal());
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (double p : {0.1, 0.33, 0.9, 0.99}) {
    const double h = (static_cast<double>(v.size()) - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double expected = sorted[lo] + (h - lo) * (sorted[std::min(lo + 1, v.size() - 1)] - sorted[lo]);
    CHECK(empirical_quantile(v, p) == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK_THROWS_AS(empirical_quantile({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(empirical_quantile({1.0}, 1.5), std::invalid_argument);
}

TEST_CASE("tuning rule") {
  const auto constant = tune(sample_of(1, std::vector<std::int64_t>(1000, 6)));
  CHECK(constant.k == 5);
  CHECK(constant.lag == 5);
  CHECK(constant.ell == 50);
  std::vector<std::int64_t> ramp;
  for (std::int64_t t = 1; t <= 100; ++t) ramp.push_back(t);
  CHECK(tune_from_transitions(ramp).k == 100);
  CHECK(tune_from_transitions(ramp, 0.5).k == 51);
  CHECK(tune_from_transitions({0, 0, 0}).k == 1);
  CHECK_THROWS_AS(tune(sample_of(2, {5, 6})), std::invalid_argument);
  CHECK_THROWS_AS(tune_from_transitions({}), std::invalid_argument);
}

TEST_CASE("TV bound dominates the exact AR(1) distance") {
  const double rho = 0.9;
  const double x0 = 10.0;
  const Ar1Kernel kernel(rho);
  const auto init = independent_initial([x0](Stream&) { return scalar(x0); });
  const auto m = sample_meeting_times(init, kernel, {1, 2000, 1000000, 1}, 14);
  const auto curve = tv_bound_curve(m, 40);
  const auto law = make_ar1_oracle(rho, x0);
  for (std::size_t i = 0; i < curve.k.size(); ++i) {
    const auto marginal = law.marginal(curve.k[i]);
    if (marginal.sd == 0.0) continue;
    const double truth = true_tv_normal(marginal.mean, marginal.sd, 0.0, 1.0);
    CAPTURE(curve.k[i]);
    CHECK(curve.clipped[i] + 3.0 * curve.std_errors[i] >= truth);
  }
}
