#include "umcmc/poisson.hpp"

#include <stdexcept>

#include "umcmc/signed_measure.hpp"

namespace umcmc {

double poisson_G(const PointRef& x, const PointRef& y, const TestFunction& h, const Kernel& kernel,
                 Stream& stream, std::int64_t max_sweeps) {
  if (max_sweeps < 1) throw std::invalid_argument("poisson_G: max_sweeps must be >= 1");
  Point a = x;
  Point b = y;
  double total = 0.0;
  for (std::int64_t t = 0; t < max_sweeps; ++t) {
    total += h(a) - h(b);
    CoupledStepResult next = kernel.coupled_step(a, b, stream);
    if (next.met) return total;
    a = std::move(next.next_x);
    b = std::move(next.next_y);
  }
  throw std::runtime_error("poisson_G: chains did not meet within max_sweeps");
}

AsymptoticVarianceSample asymptotic_variance(const TestFunction& h, const Kernel& kernel,
                                             const CoupledInitialSampler& initial,
                                             const PointRef& y_anchor,
                                             const AsymptoticVarianceOptions& options, Stream& stream) {
  if (options.m_I < 1) throw std::invalid_argument("asymptotic_variance: m_I must be >= 1");
  LaggedCouplingOptions run;
  run.lag = options.lag;
  run.length = options.ell;
  run.max_sweeps = options.max_sweeps;
  run.storage = StoragePolicy::full;

  const CoupledTrajectory first = run_lagged_coupling(initial, kernel, run, stream);
  const CoupledTrajectory second = run_lagged_coupling(initial, kernel, run, stream);
  const SignedMeasure pi1 = signed_measure(first, options.k, options.ell);
  const SignedMeasure pi2 = signed_measure(second, options.k, options.ell);

  const TestFunction h2 = [&h](const PointRef& x) {
    const double v = h(x);
    return v * v;
  };
  const double pi1_h = pi1.apply(h);
  const double pi2_h = pi2.apply(h);

  AsymptoticVarianceSample out;
  out.tau_first = first.tau;
  out.tau_second = second.tau;
  out.term_b = 0.5 * (pi1.apply(h2) + pi2.apply(h2)) - pi1_h * pi2_h;

  double a = 0.0;
  for (const WeightedAtom& draw : subsample(pi1, options.m_I, std::nullopt, stream)) {
    const double g = poisson_G(draw.atom, y_anchor, h, kernel, stream, options.max_sweeps);
    a += draw.weight * g * (h(draw.atom) - pi2_h);
  }
  out.term_a = a / static_cast<double>(options.m_I);
  out.value = 2.0 * out.term_a - out.term_b;
  return out;
}

}  // namespace umcmc
