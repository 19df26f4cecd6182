#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "umcmc/coupled_chains.hpp"

namespace umcmc {

enum class BoundMetric { tv, w1 };
std::string to_string(BoundMetric metric);

/// Empirical upper bound on a distance to pi as a function of the iteration k.
struct BoundCurve {
  BoundMetric metric = BoundMetric::tv;
  std::int64_t lag = 1;
  std::vector<std::int64_t> k;
  std::vector<double> values;      // raw empirical means
  std::vector<double> clipped;     // min(value, 1) for TV, equal to values for W1
  std::vector<double> std_errors;  // sample sd of the per-run summand over sqrt(C)
  std::size_t replicates = 0;
};

/// Per-run TV summand max(0, ceil((tau - L - k) / L)).
std::int64_t tv_summand(std::int64_t tau, std::int64_t lag, std::int64_t k);

/// C^{-1} sum_c max(0, ceil((tau_c - L - k) / L)) over the met runs.
double tv_bound(const MeetingTimeSample& meetings, std::int64_t k);

/// TV bound on k = 0..k_max; k_max defaults to max_c tau_c - L, the first k at
/// which every summand is zero.
BoundCurve tv_bound_curve(const MeetingTimeSample& meetings, std::optional<std::int64_t> k_max = {});

enum class Norm { euclidean, l1, max };
Norm parse_norm(const std::string& name);
std::string to_string(Norm norm);

/// Per-run W1 summands S(k) = sum_{j >= 1, k + jL < tau} |X_{k+jL} - Y_{k+(j-1)L}|
/// for k = 0..tau - L - 1 (zero beyond). Needs pre-meeting states.
std::vector<double> w1_summands(const CoupledTrajectory& trajectory, Norm norm = Norm::euclidean);

/// Mean of per-run summand vectors (zero-padded) on the given k grid.
BoundCurve w1_curve_from_summands(std::int64_t lag, const std::vector<std::vector<double>>& summands,
                                  const std::vector<std::int64_t>& k_grid);

/// W1 bound curve from stored trajectories.
BoundCurve w1_bound_curve(const std::vector<CoupledTrajectory>& trajectories,
                          const std::vector<std::int64_t>& k_grid, Norm norm = Norm::euclidean);

/// Interpolated (type 7) empirical quantile of a sample at level in [0, 1].
double empirical_quantile(std::vector<double> sample, double level);

struct TuningAdvice {
  std::int64_t k = 0;
  std::int64_t lag = 0;
  std::int64_t ell = 0;
  double quantile_level = 0.99;
  std::size_t sample_size = 0;
};

/// k = ceil(quantile of tau - 1), L = k, ell = 10 k from a lag-1 pilot sample.
TuningAdvice tune(const MeetingTimeSample& pilot, double quantile_level = 0.99);

/// Same rule applied to precomputed values of tau - 1.
TuningAdvice tune_from_transitions(const std::vector<std::int64_t>& tau_minus_one,
                                   double quantile_level = 0.99);

}  // namespace umcmc
