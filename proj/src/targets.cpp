#include "umcmc/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace umcmc {

TargetDistribution::TargetDistribution(std::string label, Eigen::Index dimension,
                                       Potential potential, std::optional<MomentOracle> oracle,
                                       DirectSampler sampler)
    : label_(std::move(label)),
      dimension_(dimension),
      potential_(std::move(potential)),
      oracle_(std::move(oracle)),
      sampler_(std::move(sampler)) {
  if (dimension_ < 1) throw std::invalid_argument("target dimension must be positive");
  if (!potential_) throw std::invalid_argument("target requires a potential");
}

Point TargetDistribution::sample(Stream& stream) const {
  if (!sampler_) throw std::logic_error("target '" + label_ + "' has no direct sampler");
  return sampler_(stream);
}

TargetDistribution make_std_normal(Eigen::Index dimension) {
  if (dimension < 1) throw std::invalid_argument("make_std_normal: dimension must be >= 1");
  MomentOracle oracle{Point::Zero(dimension), Point::Ones(dimension)};
  auto sampler = [dimension](Stream& s) {
    Point x(dimension);
    for (Eigen::Index i = 0; i < dimension; ++i) x[i] = s.standard_normal();
    return x;
  };
  return TargetDistribution(
      "std_normal", dimension, [](const PointRef& x) { return 0.5 * x.squaredNorm(); },
      std::move(oracle), std::move(sampler));
}

TargetDistribution make_normal_mixture(const std::vector<double>& weights,
                                       const std::vector<double>& means,
                                       const std::vector<double>& sds) {
  if (weights.empty() || weights.size() != means.size() || weights.size() != sds.size()) {
    throw std::invalid_argument("make_normal_mixture: weights, means and sds must have equal nonzero length");
  }
  for (double sd : sds) {
    if (!(sd > 0.0)) throw std::invalid_argument("make_normal_mixture: sds must be positive");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("make_normal_mixture: weights must be nonnegative");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("make_normal_mixture: weights must sum to one");
  }

  std::vector<double> log_w(weights.size());
  std::vector<double> log_sd(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    log_w[i] = std::log(weights[i]);
    log_sd[i] = std::log(sds[i]);
  }

  auto potential = [log_w, log_sd, means, sds](const PointRef& x) {
    const double v = x[0];
    double peak = -std::numeric_limits<double>::infinity();
    // Two passes: max for the log-sum-exp shift, then the shifted sum.
    double terms[16];
    std::vector<double> spill;
    double* buf = terms;
    if (means.size() > 16) {
      spill.resize(means.size());
      buf = spill.data();
    }
    for (std::size_t i = 0; i < means.size(); ++i) {
      const double z = (v - means[i]) / sds[i];
      buf[i] = log_w[i] - log_sd[i] - 0.5 * z * z;
      peak = std::max(peak, buf[i]);
    }
    if (std::isinf(peak)) return std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t i = 0; i < means.size(); ++i) sum += std::exp(buf[i] - peak);
    return -(peak + std::log(sum)) + kLogSqrt2Pi;
  };

  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    mean += weights[i] * means[i];
    second += weights[i] * (sds[i] * sds[i] + means[i] * means[i]);
  }
  MomentOracle oracle{Point::Constant(1, mean), Point::Constant(1, second - mean * mean)};

  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  auto sampler = [cumulative, means, sds](Stream& s) {
    const double u = s.uniform() * cumulative.back();
    std::size_t i = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    i = std::min(i, cumulative.size() - 1);
    return Point::Constant(1, means[i] + sds[i] * s.standard_normal()).eval();
  };

  return TargetDistribution("normal_mixture", 1, std::move(potential), std::move(oracle),
                            std::move(sampler));
}

NormalLaw Ar1Oracle::marginal(long t) const {
  if (t < 0) throw std::invalid_argument("Ar1Oracle::marginal: negative time");
  const double decay = std::pow(rho, static_cast<double>(t));
  return {decay * x0, std::sqrt(std::max(0.0, 1.0 - decay * decay))};
}

double Ar1Oracle::innovation_sd() const { return std::sqrt(1.0 - rho * rho); }

Ar1Oracle make_ar1_oracle(double rho, double x0) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("make_ar1_oracle: |rho| must be < 1");
  return {rho, x0};
}

double true_tv_normal(double m1, double s1, double m2, double s2) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw std::invalid_argument("true_tv_normal: sds must be positive");
  if (m1 == m2 && s1 == s2) return 0.0;

  const NormalLaw p{m1, s1};
  const NormalLaw q{m2, s2};
  auto integrand = [&](double x) {
    return 0.5 * std::abs(std::exp(normal_log_density(x, p)) - std::exp(normal_log_density(x, q)));
  };

  // Beyond 40 sds both densities are below 1e-340.
  const double reach = 40.0 * std::max(s1, s2);
  const double lo = std::min(m1, m2) - reach;
  const double hi = std::max(m1, m2) + reach;

  // Split at the density crossings so each piece is smooth.
  std::vector<double> edges{lo};
  for (double c : normal_density_crossings(p, q)) {
    if (c > lo && c < hi) edges.push_back(c);
  }
  edges.push_back(hi);

  double total = 0.0;
  const double tol = 1e-8 / static_cast<double>(edges.size() - 1);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    total += integrate(integrand, edges[i], edges[i + 1], tol).value;
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace umcmc
