#include "umcmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace umcmc {

namespace {

std::int64_t ceil_div_positive(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Mean and standard error of column k over runs, in run order.
void summarise(const std::vector<std::vector<double>>& rows, std::size_t column, double& mean,
               double& std_error) {
  const double count = static_cast<double>(rows.size());
  double sum = 0.0;
  for (const auto& row : rows) sum += column < row.size() ? row[column] : 0.0;
  mean = sum / count;
  if (rows.size() < 2) {
    std_error = 0.0;
    return;
  }
  double ss = 0.0;
  for (const auto& row : rows) {
    const double d = (column < row.size() ? row[column] : 0.0) - mean;
    ss += d * d;
  }
  std_error = std::sqrt(ss / (count - 1.0) / count);
}

}  // namespace

std::string to_string(BoundMetric metric) { return metric == BoundMetric::tv ? "TV" : "W1"; }

std::int64_t tv_summand(std::int64_t tau, std::int64_t lag, std::int64_t k) {
  const std::int64_t gap = tau - lag - k;
  return gap <= 0 ? 0 : ceil_div_positive(gap, lag);
}

double tv_bound(const MeetingTimeSample& meetings, std::int64_t k) {
  if (meetings.tau.empty()) throw std::invalid_argument("tv_bound: empty meeting-time sample");
  if (k < 0) throw std::invalid_argument("tv_bound: k must be nonnegative");
  std::int64_t total = 0;
  for (std::int64_t tau : meetings.tau) total += tv_summand(tau, meetings.lag, k);
  return static_cast<double>(total) / static_cast<double>(meetings.tau.size());
}

BoundCurve tv_bound_curve(const MeetingTimeSample& meetings, std::optional<std::int64_t> k_max) {
  if (meetings.tau.empty()) throw std::invalid_argument("tv_bound: empty meeting-time sample");
  const std::int64_t lag = meetings.lag;
  const std::int64_t last = k_max.value_or(
      std::max<std::int64_t>(0, *std::max_element(meetings.tau.begin(), meetings.tau.end()) - lag));
  if (last < 0) throw std::invalid_argument("tv_bound_curve: k_max must be nonnegative");

  BoundCurve curve;
  curve.metric = BoundMetric::tv;
  curve.lag = lag;
  curve.replicates = meetings.tau.size();
  const double count = static_cast<double>(meetings.tau.size());
  for (std::int64_t k = 0; k <= last; ++k) {
    // Integer sums keep the curve exact and order independent.
    std::int64_t sum = 0;
    long double sum_sq = 0.0L;
    for (std::int64_t tau : meetings.tau) {
      const std::int64_t s = tv_summand(tau, lag, k);
      sum += s;
      sum_sq += static_cast<long double>(s) * static_cast<long double>(s);
    }
    const double mean = static_cast<double>(sum) / count;
    double se = 0.0;
    if (meetings.tau.size() >= 2) {
      const long double var = (sum_sq - static_cast<long double>(sum) * sum / count) / (count - 1.0);
      se = std::sqrt(static_cast<double>(std::max(0.0L, var)) / count);
    }
    curve.k.push_back(k);
    curve.values.push_back(mean);
    curve.clipped.push_back(std::min(mean, 1.0));
    curve.std_errors.push_back(se);
  }
  return curve;
}

Norm parse_norm(const std::string& name) {
  if (name == "euclidean" || name == "l2") return Norm::euclidean;
  if (name == "l1") return Norm::l1;
  if (name == "max" || name == "linf") return Norm::max;
  throw std::invalid_argument("unknown norm '" + name + "'");
}

std::string to_string(Norm norm) {
  switch (norm) {
    case Norm::euclidean: return "euclidean";
    case Norm::l1: return "l1";
    case Norm::max: return "max";
  }
  return "euclidean";
}

std::vector<double> w1_summands(const CoupledTrajectory& trajectory, Norm norm) {
  if (!trajectory.met) throw std::domain_error("w1_summands: chains did not meet within the sweep cap");
  if (trajectory.storage == StoragePolicy::meeting_time_only) {
    throw std::out_of_range("w1_summands: pre-meeting states were not stored");
  }
  const std::int64_t lag = trajectory.lag;
  const std::int64_t tau = trajectory.tau;
  const std::int64_t n = tau - lag;  // S(k) for k = 0..n-1
  if (static_cast<std::int64_t>(trajectory.x.size()) < tau ||
      static_cast<std::int64_t>(trajectory.y.size()) < tau - lag) {
    throw std::out_of_range("w1_summands: pre-meeting states were not stored");
  }
  // d(t) = |X_t - Y_{t-L}| for L <= t < tau; S(k) = d(k + L) + S(k + L).
  std::vector<double> s(static_cast<std::size_t>(std::max<std::int64_t>(0, n)), 0.0);
  for (std::int64_t k = n - 1; k >= 0; --k) {
    const auto diff = trajectory.x[static_cast<std::size_t>(k + lag)] - trajectory.y[static_cast<std::size_t>(k)];
    double d = 0.0;
    switch (norm) {
      case Norm::euclidean: d = diff.norm(); break;
      case Norm::l1: d = diff.lpNorm<1>(); break;
      case Norm::max: d = diff.lpNorm<Eigen::Infinity>(); break;
    }
    const double rest = k + lag < n ? s[static_cast<std::size_t>(k + lag)] : 0.0;
    s[static_cast<std::size_t>(k)] = d + rest;
  }
  return s;
}

BoundCurve w1_curve_from_summands(std::int64_t lag, const std::vector<std::vector<double>>& summands,
                                  const std::vector<std::int64_t>& k_grid) {
  if (summands.empty()) throw std::invalid_argument("w1_bound_curve: no runs");
  BoundCurve curve;
  curve.metric = BoundMetric::w1;
  curve.lag = lag;
  curve.replicates = summands.size();
  for (std::int64_t k : k_grid) {
    if (k < 0) throw std::invalid_argument("w1_bound_curve: k must be nonnegative");
    double mean = 0.0;
    double se = 0.0;
    summarise(summands, static_cast<std::size_t>(k), mean, se);
    curve.k.push_back(k);
    curve.values.push_back(mean);
    curve.clipped.push_back(mean);
    curve.std_errors.push_back(se);
  }
  return curve;
}

BoundCurve w1_bound_curve(const std::vector<CoupledTrajectory>& trajectories,
                          const std::vector<std::int64_t>& k_grid, Norm norm) {
  if (trajectories.empty()) throw std::invalid_argument("w1_bound_curve: no runs");
  std::vector<std::vector<double>> summands;
  summands.reserve(trajectories.size());
  const std::int64_t lag = trajectories.front().lag;
  for (const auto& t : trajectories) {
    if (t.lag != lag) throw std::invalid_argument("w1_bound_curve: runs have different lags");
    summands.push_back(w1_summands(t, norm));
  }
  return w1_curve_from_summands(lag, summands, k_grid);
}

double empirical_quantile(std::vector<double> sample, double level) {
  if (sample.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw std::invalid_argument("empirical_quantile: level must lie in [0, 1]");
  std::sort(sample.begin(), sample.end());
  const double h = static_cast<double>(sample.size() - 1) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sample.size()) return sample.back();
  return sample[lo] + (h - static_cast<double>(lo)) * (sample[lo + 1] - sample[lo]);
}

TuningAdvice tune_from_transitions(const std::vector<std::int64_t>& tau_minus_one, double quantile_level) {
  if (tau_minus_one.empty()) throw std::invalid_argument("tune: empty pilot sample");
  std::vector<double> values(tau_minus_one.begin(), tau_minus_one.end());
  const double q = empirical_quantile(std::move(values), quantile_level);
  TuningAdvice advice;
  // Tiny tolerance so an exact integer quantile is not pushed up by rounding.
  advice.k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(q - 1e-9)));
  advice.lag = advice.k;
  advice.ell = 10 * advice.k;
  advice.quantile_level = quantile_level;
  advice.sample_size = tau_minus_one.size();
  return advice;
}

TuningAdvice tune(const MeetingTimeSample& pilot, double quantile_level) {
  if (pilot.lag != 1) throw std::invalid_argument("tune: pilot meeting times must use lag 1");
  return tune_from_transitions(pilot.coupled_transitions(), quantile_level);
}

}  // namespace umcmc
