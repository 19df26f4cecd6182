#include "umcmc/signed_measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "umcmc/estimators.hpp"

namespace umcmc {

double SignedMeasure::total_weight() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double SignedMeasure::apply(const TestFunction& h) const {
  double total = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) total += weights[n] * h(atoms[n]);
  return total;
}

std::int64_t signed_measure_size(std::int64_t k, std::int64_t ell, std::int64_t lag, std::int64_t tau) {
  const std::int64_t cancellation = std::max<std::int64_t>(0, tau - (k + lag));
  const std::int64_t late_x = std::max<std::int64_t>(0, tau - 1 - std::max(ell, k + lag - 1));
  return (ell - k + 1) + cancellation + late_x;
}

SignedMeasure signed_measure(const CoupledTrajectory& trajectory, std::int64_t k, std::int64_t ell) {
  if (!trajectory.met) throw std::domain_error("signed_measure: chains did not meet within the sweep cap");
  if (trajectory.storage != StoragePolicy::full) {
    throw std::out_of_range("signed_measure: trajectory must be stored with the full storage policy");
  }
  if (k < 0 || ell < k) throw std::invalid_argument("signed_measure: requires 0 <= k <= ell");
  if (ell > trajectory.last_x_index()) throw std::out_of_range("signed_measure: ell beyond stored range");

  const std::int64_t lag = trajectory.lag;
  const std::int64_t tau = trajectory.tau;
  const double block = 1.0 / static_cast<double>(ell - k + 1);

  SignedMeasure measure;
  measure.k = k;
  measure.ell = ell;
  measure.lag = lag;
  measure.tau = tau;
  measure.atoms = StateTrace(trajectory.x.dim());
  measure.atoms.reserve(static_cast<std::size_t>(signed_measure_size(k, ell, lag, tau)));

  const std::int64_t last_x = std::max(ell, tau - 1);
  for (std::int64_t t = k; t <= last_x; ++t) {
    const bool in_block = t <= ell;
    const bool cancels = t >= k + lag && t < tau;
    if (!in_block && !cancels) continue;
    double w = in_block ? block : 0.0;
    if (cancels) w += weight_v(t, k, ell, lag);
    measure.atoms.push_back(trajectory.x[static_cast<std::size_t>(t)]);
    measure.weights.push_back(w);
  }
  for (std::int64_t t = k + lag; t < tau; ++t) {
    measure.atoms.push_back(trajectory.y[static_cast<std::size_t>(t - lag)]);
    measure.weights.push_back(-weight_v(t, k, ell, lag));
  }
  return measure;
}

std::vector<WeightedAtom> subsample(const SignedMeasure& measure, std::size_t m,
                                    const std::optional<std::vector<double>>& probabilities,
                                    Stream& stream) {
  if (m < 1) throw std::invalid_argument("subsample: m must be positive");
  const std::size_t n = measure.size();
  if (n == 0) throw std::invalid_argument("subsample: empty measure");

  std::vector<double> cumulative;
  if (probabilities) {
    const auto& xi = *probabilities;
    if (xi.size() != n) throw std::invalid_argument("subsample: probabilities must match the atom count");
    for (double p : xi) {
      if (!(p > 0.0)) throw std::invalid_argument("subsample: probabilities must be strictly positive");
    }
    cumulative.resize(n);
    std::partial_sum(xi.begin(), xi.end(), cumulative.begin());
    if (std::abs(cumulative.back() - 1.0) > 1e-9) {
      throw std::invalid_argument("subsample: probabilities must sum to one");
    }
  }

  std::vector<WeightedAtom> out;
  out.reserve(m);
  for (std::size_t draw = 0; draw < m; ++draw) {
    const double u = stream.uniform();
    std::size_t index;
    double weight;
    if (probabilities) {
      index = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u * cumulative.back()) - cumulative.begin());
      index = std::min(index, n - 1);
      weight = measure.weights[index] / (*probabilities)[index];
    } else {
      index = std::min(static_cast<std::size_t>(u * static_cast<double>(n)), n - 1);
      weight = static_cast<double>(n) * measure.weights[index];
    }
    out.push_back({Point(measure.atoms[index]), weight, index});
  }
  return out;
}

}  // namespace umcmc
