#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "umcmc/coupled_chains.hpp"

using namespace umcmc;

namespace {

Point scalar(double v) { return Point::Constant(1, v); }

std::shared_ptr<const TargetDistribution> bimodal() {
  return std::make_shared<const TargetDistribution>(make_normal_mixture({0.5, 0.5}, {-4, 4}, {1, 1}));
}

CoupledInitialSampler wide_normal(double mean, double sd) {
  return independent_initial([=](Stream& s) { return scalar(mean + sd * s.standard_normal()); });
}

bool faithful_after_meeting(const CoupledTrajectory& t) {
  for (std::int64_t s = t.tau; s <= t.last_x_index(); ++s) {
    const auto x = t.x[static_cast<std::size_t>(s)];
    const auto y = t.y[static_cast<std::size_t>(s - t.lag)];
    if (!(x.array() == y.array()).all()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("independence kernel meets at tau = L + 1") {
  const IndependenceKernel k(std::make_shared<const TargetDistribution>(make_std_normal(1)));
  for (std::int64_t lag : {1, 3, 20}) {
    Stream s(1, static_cast<std::uint64_t>(lag));
    const auto t = run_lagged_coupling(wide_normal(5, 2), k, {lag, 0, 1000, StoragePolicy::full}, s);
    CHECK(t.met);
    CHECK(t.tau == lag + 1);
  }
  const auto sample = sample_meeting_times(wide_normal(0, 1), k, {7, 200, 1000, 2}, 3);
  for (auto tau : sample.tau) REQUIRE(tau == 8);
}

TEST_CASE("trajectory shape, storage and faithfulness after meeting") {
  const MrthKernel k(bimodal(), scalar(1.0));
  Stream s(2, 0);
  const auto t = run_lagged_coupling(wide_normal(0, 4), k, {50, 500, 1000000, StoragePolicy::full}, s);
  REQUIRE(t.met);
  CHECK(t.tau >= 51);
  CHECK(t.last_x_index() == std::max<std::int64_t>(500, t.tau));
  CHECK(static_cast<std::int64_t>(t.y.size()) == t.last_x_index() - 50 + 1);
  CHECK(faithful_after_meeting(t));
}

TEST_CASE("storage policies") {
  CHECK(state_storage_policy({false, true, false}) == StoragePolicy::meeting_time_only);
  CHECK(state_storage_policy({false, true, true}) == StoragePolicy::pre_meeting);
  CHECK(state_storage_policy({true, true, true}) == StoragePolicy::full);

  const MrthKernel k(bimodal(), scalar(1.0));
  for (auto policy : {StoragePolicy::meeting_time_only, StoragePolicy::pre_meeting, StoragePolicy::full}) {
    Stream s(3, 0);
    const auto t = run_lagged_coupling(wide_normal(0, 4), k, {5, 100, 1000000, policy}, s);
    REQUIRE(t.met);
    if (policy == StoragePolicy::meeting_time_only) {
      CHECK(t.x.size() == 0);
      CHECK(t.y.size() == 0);
    } else if (policy == StoragePolicy::pre_meeting) {
      CHECK(static_cast<std::int64_t>(t.x.size()) == t.tau);
      CHECK(static_cast<std::int64_t>(t.y.size()) == t.tau - 5);
    } else {
      CHECK(static_cast<std::int64_t>(t.x.size()) == std::max<std::int64_t>(100, t.tau) + 1);
    }
  }
}

TEST_CASE("tau does not depend on the storage policy or the length") {
  const MrthKernel k(bimodal(), scalar(1.0));
  for (std::uint64_t r = 0; r < 50; ++r) {
    Stream a(4, r), b(4, r), c(4, r);
    const auto t0 = run_lagged_coupling(wide_normal(0, 4), k, {3, 0, 1000000, StoragePolicy::meeting_time_only}, a);
    const auto t1 = run_lagged_coupling(wide_normal(0, 4), k, {3, 100, 1000000, StoragePolicy::full}, b);
    const auto t2 = run_lagged_coupling(wide_normal(0, 4), k, {3, 0, 1000000, StoragePolicy::pre_meeting}, c);
    REQUIRE(t0.tau == t1.tau);
    REQUIRE(t0.tau == t2.tau);
  }
}

TEST_CASE("capped runs are reported as unmet with partial states") {
  const MrthKernel k(bimodal(), scalar(0.1));
  Stream s(5, 0);
  const CoupledInitialSampler apart = [](Stream&) { return std::make_pair(scalar(-4.0), scalar(4.0)); };
  const auto t = run_lagged_coupling(apart, k, {1, 0, 10, StoragePolicy::full}, s);
  CHECK_FALSE(t.met);
  CHECK(t.tau == kUnmetTau);
  CHECK(t.x.size() == 12);
  const auto sample = sample_meeting_times(apart, k, {1, 20, 10, 1}, 6);
  CHECK(sample.tau.empty());
  CHECK(sample.unmet_replicates.size() == 20);
}

TEST_CASE("faithfulness on every built-in kernel over many runs") {
  const auto t = bimodal();
  const auto normal = std::make_shared<const TargetDistribution>(make_std_normal(1));
  const Eigen::VectorXd two = scalar(2.0);
  const auto crn = std::make_shared<MrthKernel>(normal, scalar(1.0), ProposalCoupling::crn);
  const auto refl = std::make_shared<MrthKernel>(normal, scalar(1.0));
  const std::vector<std::pair<KernelPtr, CoupledInitialSampler>> cases{
      {std::make_shared<MrthKernel>(t, two, ProposalCoupling::reflection_maximal), wide_normal(0, 4)},
      {std::make_shared<MrthKernel>(t, two, ProposalCoupling::eta), wide_normal(0, 4)},
      {std::make_shared<MrthKernel>(t, two, ProposalCoupling::mixture_maximal), wide_normal(0, 4)},
      {std::make_shared<IndependenceKernel>(normal), wide_normal(0, 4)},
      {std::make_shared<Ar1Kernel>(0.9), wide_normal(10, 1)},
      {std::make_shared<MixtureKernel>(std::vector<MixtureKernel::Component>{{0.8, crn}, {0.2, refl}}),
       wide_normal(0, 4)},
  };
  for (const auto& [kernel, init] : cases) {
    CAPTURE(kernel->describe());
    int violations = 0;
    for (std::uint64_t r = 0; r < 200; ++r) {
      Stream s(7, r);
      const auto traj = run_lagged_coupling(init, *kernel, {2, 30, 1000000, StoragePolicy::full}, s);
      REQUIRE(traj.met);
      violations += !faithful_after_meeting(traj);
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("X_t of the coupled pair has the law of a single chain at time t") {
  const auto target = bimodal();
  const MrthKernel k(target, scalar(1.0));
  const auto pi0 = [](Stream& s) { return scalar(4.0 * s.standard_normal()); };
  const int n = 10000;
  std::vector<double> coupled, single;
  for (int r = 0; r < n; ++r) {
    Stream s(8, static_cast<std::uint64_t>(r));
    const auto t = run_lagged_coupling(independent_initial(pi0), k, {2, 5, 1000000, StoragePolicy::full}, s);
    coupled.push_back(t.x[5][0]);
    Stream u(9, static_cast<std::uint64_t>(r));
    Point x = pi0(u);
    for (int step = 0; step < 5; ++step) x = k.step(x, u);
    single.push_back(x[0]);
  }
  CHECK(oracle::ks_two_sample(coupled, single) < oracle::ks_two_sample_critical(n, n));
}

TEST_CASE("meeting-time samples are deterministic and independent of the worker count") {
  const MrthKernel k(bimodal(), scalar(2.0));
  const auto a = sample_meeting_times(wide_normal(0, 4), k, {1, 500, 1000000, 1}, 10);
  const auto b = sample_meeting_times(wide_normal(0, 4), k, {1, 500, 1000000, 4}, 10);
  CHECK(a.tau == b.tau);
  CHECK(a.replicate_indices == b.replicate_indices);
  for (auto tau : a.tau) REQUIRE(tau >= 2);
}

TEST_CASE("meeting-time distribution is stable across seeds") {
  const MrthKernel k(bimodal(), scalar(2.0));
  const auto a = sample_meeting_times(wide_normal(0, 4), k, {1, 5000, 1000000, 1}, 11);
  const auto b = sample_meeting_times(wide_normal(0, 4), k, {1, 5000, 1000000, 1}, 12);
  const std::vector<double> da(a.tau.begin(), a.tau.end()), db(b.tau.begin(), b.tau.end());
  // Integer-valued data: the continuous critical value is conservative.
  CHECK(oracle::ks_two_sample(da, db) < oracle::ks_two_sample_critical(da.size(), db.size()));
}
