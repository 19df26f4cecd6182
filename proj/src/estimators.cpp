#include "umcmc/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "umcmc/special.hpp"

namespace umcmc {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

void require_met(const CoupledTrajectory& trajectory) {
  if (!trajectory.met) {
    throw std::domain_error("estimator undefined: chains did not meet within the sweep cap");
  }
  if (trajectory.storage != StoragePolicy::full) {
    throw std::out_of_range("estimator requires a trajectory stored with the full storage policy");
  }
}

}  // namespace

std::int64_t weight_count(std::int64_t t, std::int64_t k, std::int64_t ell, std::int64_t lag) {
  if (lag < 1 || k < 0 || ell < k || t < k + lag) {
    throw std::invalid_argument("weight_v: requires lag >= 1, 0 <= k <= ell, t >= k + lag");
  }
  return floor_div(t - k, lag) - ceil_div(std::max(lag, t - ell), lag) + 1;
}

double weight_v(std::int64_t t, std::int64_t k, std::int64_t ell, std::int64_t lag) {
  return static_cast<double>(weight_count(t, k, ell, lag)) / static_cast<double>(ell - k + 1);
}

double estimator_cost(std::int64_t lag, std::int64_t tau, std::int64_t ell) {
  return static_cast<double>(lag + 2 * (tau - lag) + std::max<std::int64_t>(0, ell - tau));
}

double h_k(const CoupledTrajectory& trajectory, const TestFunction& h, std::int64_t k) {
  require_met(trajectory);
  if (k < 0) throw std::invalid_argument("h_k: k must be nonnegative");
  if (k > trajectory.last_x_index()) {
    throw std::out_of_range("h_k: k = " + std::to_string(k) + " beyond stored range");
  }
  const std::int64_t lag = trajectory.lag;
  double value = h(trajectory.x[static_cast<std::size_t>(k)]);
  for (std::int64_t t = k + lag; t < trajectory.tau; t += lag) {
    value += h(trajectory.x[static_cast<std::size_t>(t)]) - h(trajectory.y[static_cast<std::size_t>(t - lag)]);
  }
  return value;
}

EstimatorRecord h_k_ell(const CoupledTrajectory& trajectory, const TestFunction& h, std::int64_t k,
                        std::int64_t ell) {
  require_met(trajectory);
  if (k < 0 || ell < k) throw std::invalid_argument("h_k_ell: requires 0 <= k <= ell");
  if (ell > trajectory.last_x_index()) {
    throw std::out_of_range("h_k_ell: ell = " + std::to_string(ell) + " beyond stored range " +
                            std::to_string(trajectory.last_x_index()));
  }
  const std::int64_t lag = trajectory.lag;
  const std::int64_t tau = trajectory.tau;

  double mcmc = 0.0;
  for (std::int64_t t = k; t <= ell; ++t) mcmc += h(trajectory.x[static_cast<std::size_t>(t)]);
  mcmc /= static_cast<double>(ell - k + 1);

  double correction = 0.0;
  for (std::int64_t t = k + lag; t < tau; ++t) {
    const std::int64_t count = weight_count(t, k, ell, lag);
    if (count == 0) continue;
    correction += static_cast<double>(count) *
                  (h(trajectory.x[static_cast<std::size_t>(t)]) -
                   h(trajectory.y[static_cast<std::size_t>(t - lag)]));
  }
  correction /= static_cast<double>(ell - k + 1);

  EstimatorRecord record;
  record.value = mcmc + correction;
  record.cost_units = estimator_cost(lag, tau, ell);
  record.tau = tau;
  record.k = k;
  record.ell = ell;
  record.lag = lag;
  return record;
}

AggregateReport aggregate(const std::vector<EstimatorRecord>& records, double alpha) {
  if (records.size() < 2) throw std::invalid_argument("aggregate: need at least two records");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("aggregate: alpha must lie in (0, 1)");
  const double count = static_cast<double>(records.size());

  // Summing in sorted order makes the result independent of record order.
  std::vector<double> values(records.size());
  std::vector<double> costs(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    values[i] = records[i].value;
    costs[i] = records[i].cost_units;
  }
  std::sort(values.begin(), values.end());
  std::sort(costs.begin(), costs.end());

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= count;
  double cost = 0.0;
  for (double c : costs) cost += c;
  cost /= count;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double variance = ss / (count - 1.0);

  AggregateReport report;
  report.mean = mean;
  report.sd = std::sqrt(variance);
  report.std_error = report.sd / std::sqrt(count);
  report.alpha = alpha;
  report.ci_low = mean + normal_quantile(alpha / 2.0) * report.std_error;
  report.ci_high = mean + normal_quantile(1.0 - alpha / 2.0) * report.std_error;
  report.count = records.size();
  report.mean_cost = cost;
  report.inefficiency = cost * variance;
  return report;
}

AggregateReport aggregate_values(const std::vector<double>& values, double alpha) {
  std::vector<EstimatorRecord> records(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    records[i].value = values[i];
    records[i].cost_units = 1.0;
  }
  return aggregate(records, alpha);
}

}  // namespace umcmc
