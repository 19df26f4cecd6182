#pragma once

#include <cstddef>
#include <stdexcept>

#include "umcmc/rng.hpp"
#include "umcmc/special.hpp"
#include "umcmc/types.hpp"

namespace umcmc {

/// A joint draw (X, Y). `identical` implies x and y are bitwise equal; the
/// equality is established by assignment, never by recomputation.
struct CoupledDraw {
  Point x;
  Point y;
  bool identical = false;
};

/// A law given by its log-density (up to a shared constant) and a sampler.
struct DensityHandle {
  std::function<double(const PointRef&)> log_density;
  std::function<Point(Stream&)> sampler;
};

/// Thrown when a rejection loop exceeds its iteration cap.
class CouplingError : public std::runtime_error {
 public:
  CouplingError(const std::string& what, std::size_t attempts)
      : std::runtime_error(what), attempts_(attempts) {}
  std::size_t attempts() const { return attempts_; }

 private:
  std::size_t attempts_;
};

struct EtaCouplingOptions {
  double eta = 1.0;
  std::size_t max_iterations = 1'000'000;
};

/// Loop counts of the last eta-coupling draw, for cost logging.
struct EtaCouplingStats {
  std::size_t residual_attempts = 0;
};

/// Coupling of p and q with parameter eta in (0, 1]. Maximal when eta = 1;
/// for eta < 1 the number of loop iterations has bounded variance.
/// Density ratios are evaluated as differences of log densities.
CoupledDraw eta_coupling(const DensityHandle& p, const DensityHandle& q, Stream& stream,
                         const EtaCouplingOptions& options = {},
                         EtaCouplingStats* stats = nullptr);

/// Maximal coupling of two univariate Normals via the mixture representation:
/// with probability c = int min(p, q) draw a common value from min(p, q) / c,
/// otherwise draw X and Y independently from the normalised residuals.
/// Overlap and residual draws use rejection from p and q.
CoupledDraw mixture_maximal_coupling(const NormalLaw& p, const NormalLaw& q, Stream& stream,
                                     std::size_t max_iterations = 1'000'000);

/// Reflection-maximal coupling of N(mu1, diag(sigma^2)) and N(mu2, diag(sigma^2)).
/// `sigma` has length 1 (shared scale) or the dimension of the means.
/// Consumes exactly dim normals and one uniform, whatever the inputs.
CoupledDraw reflection_maximal_coupling(const PointRef& mu1, const PointRef& mu2,
                                        const Eigen::Ref<const Eigen::VectorXd>& sigma,
                                        Stream& stream);

using QuantileFunction = std::function<double(double)>;

/// Common-random-numbers coupling X = F_p^-(U), Y = F_q^-(U) with one shared U.
CoupledDraw crn_quantile_coupling(const QuantileFunction& qf_p, const QuantileFunction& qf_q,
                                  Stream& stream);

/// Normal handle in any dimension with diagonal covariance.
DensityHandle normal_handle(const Point& mean, const Eigen::VectorXd& sigma);

/// sigma expanded to the requested dimension; validates positivity and length.
Eigen::VectorXd expand_scale(const Eigen::Ref<const Eigen::VectorXd>& sigma, Eigen::Index dim);

}  // namespace umcmc
