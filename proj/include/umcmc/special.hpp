#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace umcmc {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

/// Univariate Normal law parametrised by mean and standard deviation.
struct NormalLaw {
  double mean = 0.0;
  double sd = 1.0;
};

double normal_cdf(double x);

/// Upper tail 1 - Phi(x), accurate for large x.
double normal_ccdf(double x);

/// Inverse of the standard normal CDF (Wichura, AS 241), relative error ~1e-16.
double normal_quantile(double p);

double normal_log_density(double x, double mean, double sd);

inline double normal_log_density(double x, const NormalLaw& law) {
  return normal_log_density(x, law.mean, law.sd);
}

/// Points where the two Normal densities are equal, sorted. Empty if the laws
/// coincide; one point for equal sds; two otherwise.
std::vector<double> normal_density_crossings(const NormalLaw& p, const NormalLaw& q);

/// Overlap c = int min(p, q) from Normal CDFs at the density crossings.
double normal_overlap(const NormalLaw& p, const NormalLaw& q);

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
};

/// Adaptive Gauss-Kronrod (7/15) integration on a finite interval. Throws
/// QuadratureError when the requested absolute tolerance is not reached
/// within `max_intervals` subdivisions.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-10, int max_intervals = 2000);

}  // namespace umcmc
