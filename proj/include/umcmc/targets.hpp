#pragma once

#include <optional>
#include <string>
#include <vector>

#include "umcmc/rng.hpp"
#include "umcmc/special.hpp"
#include "umcmc/types.hpp"

namespace umcmc {

using Potential = std::function<double(const PointRef&)>;
using DirectSampler = std::function<Point(Stream&)>;

/// Exact per-coordinate moments of an analytic target.
struct MomentOracle {
  Point mean;
  Point variance;
};

/// Target distribution pi, given through its potential U(x) = -log pi(x) + const.
///
/// The potential returns +infinity outside the support so that a
/// Metropolis step rejects such proposals without special casing.
/// Immutable after construction; safe to share between threads.
class TargetDistribution {
 public:
  TargetDistribution(std::string label, Eigen::Index dimension, Potential potential,
                     std::optional<MomentOracle> oracle = std::nullopt,
                     DirectSampler sampler = {});

  const std::string& label() const { return label_; }
  Eigen::Index dimension() const { return dimension_; }

  double potential(const PointRef& x) const { return potential_(x); }

  const std::optional<MomentOracle>& oracle() const { return oracle_; }

  bool has_direct_sampler() const { return static_cast<bool>(sampler_); }

  /// Exact draw from pi. Throws std::logic_error when no sampler exists.
  Point sample(Stream& stream) const;

 private:
  std::string label_;
  Eigen::Index dimension_;
  Potential potential_;
  std::optional<MomentOracle> oracle_;
  DirectSampler sampler_;
};

TargetDistribution make_std_normal(Eigen::Index dimension);

/// Univariate Normal mixture sum_i w_i N(mu_i, sd_i^2), evaluated in log space.
TargetDistribution make_normal_mixture(const std::vector<double>& weights,
                                       const std::vector<double>& means,
                                       const std::vector<double>& sds);

/// Gaussian AR(1) chain X_t = rho X_{t-1} + sqrt(1 - rho^2) eps_t started at x0.
/// It leaves N(0, 1) invariant and its marginal laws are known in closed form.
struct Ar1Oracle {
  double rho;
  double x0;

  /// Law of X_t. For t = 0 the law is the point mass at x0 (sd = 0).
  NormalLaw marginal(long t) const;
  NormalLaw invariant() const { return {0.0, 1.0}; }
  /// Standard deviation of the innovation term.
  double innovation_sd() const;
};

Ar1Oracle make_ar1_oracle(double rho, double x0);

/// Total variation distance between two univariate Normals, by adaptive
/// quadrature of (1/2) int |p - q| to absolute tolerance 1e-8.
/// Throws QuadratureError on non-convergence.
double true_tv_normal(double m1, double s1, double m2, double s2);

}  // namespace umcmc
