#pragma once

#include <cstdint>

#include "umcmc/coupled_chains.hpp"
#include "umcmc/kernels.hpp"
#include "umcmc/rng.hpp"
#include "umcmc/types.hpp"

namespace umcmc {

/// Unbiased estimate of g(x, y) = sum_t (P^t h(x) - P^t h(y)), the difference of
/// Poisson-equation solutions. Runs a lag-0 coupled pair from (x, y) and returns
/// sum_{t=0}^{tau-1} (h(X_t) - h(Y_t)) with tau = inf{t >= 1 : X_t = Y_t}.
/// Throws std::runtime_error when the pair has not met after max_sweeps steps.
double poisson_G(const PointRef& x, const PointRef& y, const TestFunction& h, const Kernel& kernel,
                 Stream& stream, std::int64_t max_sweeps = 1'000'000);

struct AsymptoticVarianceOptions {
  std::int64_t k = 0;
  std::int64_t lag = 1;
  std::int64_t ell = 0;
  /// Number of atom indices I averaged in term (A).
  std::size_t m_I = 1;
  std::int64_t max_sweeps = 1'000'000;
};

struct AsymptoticVarianceSample {
  double value = 0.0;  // 2 (A) - (B)
  double term_a = 0.0;
  double term_b = 0.0;
  std::int64_t tau_first = 0;
  std::int64_t tau_second = 0;
};

/// One unbiased estimate of the asymptotic variance v(P, h), built from two
/// independent signed measures pi1, pi2 and a Poisson estimate anchored at y:
/// (B) = (pi1(h^2) + pi2(h^2)) / 2 - pi1(h) pi2(h) and
/// (A) = N w_I G(Z_I, y) (h(Z_I) - pi2(h)) with I uniform over the atoms of pi1.
/// Throws std::domain_error if either signed measure is unavailable.
AsymptoticVarianceSample asymptotic_variance(const TestFunction& h, const Kernel& kernel,
                                             const CoupledInitialSampler& initial,
                                             const PointRef& y_anchor,
                                             const AsymptoticVarianceOptions& options, Stream& stream);

}  // namespace umcmc
