#pragma once

#include <cstdint>
#include <vector>

#include "umcmc/coupled_chains.hpp"
#include "umcmc/test_functions.hpp"

namespace umcmc {

/// Number of times the difference h(X_t) - h(Y_{t-L}) appears in the bias
/// cancellation terms of H_k, ..., H_ell. Exact integer arithmetic.
/// Requires 0 <= k <= ell, L >= 1 and t >= k + L.
std::int64_t weight_count(std::int64_t t, std::int64_t k, std::int64_t ell, std::int64_t lag);

/// v_t(k, ell, L) = weight_count / (ell - k + 1), one floating division.
double weight_v(std::int64_t t, std::int64_t k, std::int64_t ell, std::int64_t lag);

/// Cost in transition units: L + 2 (tau - L) + max(0, ell - tau).
double estimator_cost(std::int64_t lag, std::int64_t tau, std::int64_t ell);

/// H_k = h(X_k) + sum_{j >= 1, k + jL < tau} (h(X_{k+jL}) - h(Y_{k+(j-1)L})).
double h_k(const CoupledTrajectory& trajectory, const TestFunction& h, std::int64_t k);

/// One replicate's estimate and its provenance.
struct EstimatorRecord {
  double value = 0.0;
  double cost_units = 0.0;
  std::uint64_t replicate_index = 0;
  std::int64_t tau = 0;
  std::int64_t k = 0;
  std::int64_t ell = 0;
  std::int64_t lag = 1;
};

/// H_{k:ell}: MCMC average over X_k..X_ell plus the weighted bias cancellation
/// sum over t = k + L .. tau - 1. Throws std::domain_error on an unmet
/// trajectory and std::out_of_range when the states needed are not stored.
EstimatorRecord h_k_ell(const CoupledTrajectory& trajectory, const TestFunction& h, std::int64_t k,
                        std::int64_t ell);

/// Summary of independent replicates of an unbiased estimator.
struct AggregateReport {
  double mean = 0.0;
  double sd = 0.0;        // sample standard deviation, divisor C - 1
  double std_error = 0.0; // sd / sqrt(C)
  double alpha = 0.05;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t count = 0;
  double mean_cost = 0.0;
  /// Mean cost times sample variance.
  double inefficiency = 0.0;
};

/// Mean, standard deviation, Normal-quantile interval
/// [mean + q_{alpha/2} sd / sqrt(C), mean + q_{1-alpha/2} sd / sqrt(C)],
/// mean cost and inefficiency. Requires at least two records.
AggregateReport aggregate(const std::vector<EstimatorRecord>& records, double alpha = 0.05);

/// Same reduction over plain values with unit costs.
AggregateReport aggregate_values(const std::vector<double>& values, double alpha = 0.05);

}  // namespace umcmc
