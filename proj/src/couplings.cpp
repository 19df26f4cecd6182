#include "umcmc/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace umcmc {

Eigen::VectorXd expand_scale(const Eigen::Ref<const Eigen::VectorXd>& sigma, Eigen::Index dim) {
  if (sigma.size() != 1 && sigma.size() != dim) {
    throw std::invalid_argument("scale must have length 1 or " + std::to_string(dim));
  }
  if (!(sigma.array() > 0.0).all()) throw std::invalid_argument("scale must be positive");
  if (sigma.size() == 1) return Eigen::VectorXd::Constant(dim, sigma[0]);
  return sigma;
}

DensityHandle normal_handle(const Point& mean, const Eigen::VectorXd& sigma) {
  const Eigen::VectorXd scale = expand_scale(sigma, mean.size());
  DensityHandle handle;
  handle.log_density = [mean, scale](const PointRef& x) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < mean.size(); ++i) total += normal_log_density(x[i], mean[i], scale[i]);
    return total;
  };
  handle.sampler = [mean, scale](Stream& s) {
    Point x(mean.size());
    for (Eigen::Index i = 0; i < mean.size(); ++i) x[i] = mean[i] + scale[i] * s.standard_normal();
    return x;
  };
  return handle;
}

CoupledDraw eta_coupling(const DensityHandle& p, const DensityHandle& q, Stream& stream,
                         const EtaCouplingOptions& options, EtaCouplingStats* stats) {
  if (!(options.eta > 0.0 && options.eta <= 1.0)) {
    throw std::invalid_argument("eta_coupling: eta must lie in (0, 1]");
  }
  const double log_eta = std::log(options.eta);

  CoupledDraw draw;
  draw.x = p.sampler(stream);
  const double log_w = std::log(stream.uniform());
  if (log_w <= std::min(log_eta, q.log_density(draw.x) - p.log_density(draw.x))) {
    draw.y = draw.x;
    draw.identical = true;
    if (stats) stats->residual_attempts = 0;
    return draw;
  }

  for (std::size_t attempt = 1; attempt <= options.max_iterations; ++attempt) {
    Point candidate = q.sampler(stream);
    const double log_w_star = std::log(stream.uniform());
    if (log_w_star > log_eta + p.log_density(candidate) - q.log_density(candidate)) {
      draw.y = std::move(candidate);
      if (stats) stats->residual_attempts = attempt;
      return draw;
    }
  }
  throw CouplingError("eta_coupling: residual loop exceeded " +
                          std::to_string(options.max_iterations) + " iterations",
                      options.max_iterations);
}

namespace {

// Draw from `law` truncated to [lo, hi] by inversion, working in whichever
// tail keeps the CDF differences well conditioned.
double truncated_normal(const NormalLaw& law, double lo, double hi, double u) {
  const double a = (lo - law.mean) / law.sd;
  const double b = (hi - law.mean) / law.sd;
  double z;
  if (a > 0.0) {
    const double ta = normal_ccdf(a);
    const double tb = normal_ccdf(b);
    z = -normal_quantile(ta - u * (ta - tb));
  } else {
    const double fa = normal_cdf(a);
    const double fb = normal_cdf(b);
    z = normal_quantile(fa + u * (fb - fa));
  }
  z = std::clamp(z, a, b);
  return law.mean + law.sd * z;
}

double law_mass(const NormalLaw& law, double lo, double hi) {
  const double a = (lo - law.mean) / law.sd;
  const double b = (hi - law.mean) / law.sd;
  if (a > 0.0) return normal_ccdf(a) - normal_ccdf(b);
  return normal_cdf(b) - normal_cdf(a);
}

// Proposal from `from`, accepted with probability 1 - min(1, other / from).
double residual_draw(const NormalLaw& from, const NormalLaw& other, Stream& stream,
                     std::size_t max_iterations) {
  for (std::size_t attempt = 0; attempt < max_iterations; ++attempt) {
    const double z = from.mean + from.sd * stream.standard_normal();
    const double log_ratio = normal_log_density(z, other) - normal_log_density(z, from);
    if (std::log(stream.uniform()) >= std::min(0.0, log_ratio)) return z;
  }
  throw CouplingError("mixture_maximal_coupling: residual loop exceeded " +
                          std::to_string(max_iterations) + " iterations",
                      max_iterations);
}

}  // namespace

CoupledDraw mixture_maximal_coupling(const NormalLaw& p, const NormalLaw& q, Stream& stream,
                                     std::size_t max_iterations) {
  if (!(p.sd > 0.0) || !(q.sd > 0.0)) {
    throw std::invalid_argument("mixture_maximal_coupling: sds must be positive");
  }
  CoupledDraw draw;
  if (p.mean == q.mean && p.sd == q.sd) {
    draw.x = Point::Constant(1, p.mean + p.sd * stream.standard_normal());
    draw.y = draw.x;
    draw.identical = true;
    return draw;
  }

  const double c = normal_overlap(p, q);
  const double u = stream.uniform();
  if (u < c) {
    // min(p, q) is piecewise one of the two laws between density crossings.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> edges{-inf};
    for (double cut : normal_density_crossings(p, q)) edges.push_back(cut);
    edges.push_back(inf);
    std::vector<NormalLaw> piece_law;
    std::vector<double> piece_mass;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double lo = edges[i];
      const double hi = edges[i + 1];
      const double mp = law_mass(p, lo, hi);
      const double mq = law_mass(q, lo, hi);
      piece_law.push_back(mp < mq ? p : q);
      piece_mass.push_back(std::min(mp, mq));
    }
    double total = 0.0;
    for (double m : piece_mass) total += m;
    double pick = stream.uniform() * total;
    std::size_t chosen = piece_mass.size() - 1;
    for (std::size_t i = 0; i < piece_mass.size(); ++i) {
      if (pick < piece_mass[i]) {
        chosen = i;
        break;
      }
      pick -= piece_mass[i];
    }
    draw.x = Point::Constant(
        1, truncated_normal(piece_law[chosen], edges[chosen], edges[chosen + 1], stream.open_uniform()));
    draw.y = draw.x;
    draw.identical = true;
    return draw;
  }

  draw.x = Point::Constant(1, residual_draw(p, q, stream, max_iterations));
  draw.y = Point::Constant(1, residual_draw(q, p, stream, max_iterations));
  return draw;
}

CoupledDraw reflection_maximal_coupling(const PointRef& mu1, const PointRef& mu2,
                                        const Eigen::Ref<const Eigen::VectorXd>& sigma,
                                        Stream& stream) {
  const Eigen::Index dim = mu1.size();
  if (mu2.size() != dim) throw std::invalid_argument("reflection_maximal_coupling: dimension mismatch");
  const Eigen::VectorXd scale = expand_scale(sigma, dim);

  Eigen::VectorXd xdot(dim);
  for (Eigen::Index i = 0; i < dim; ++i) xdot[i] = stream.standard_normal();
  const Eigen::VectorXd delta = ((mu1 - mu2).array() / scale.array()).matrix();
  const double log_u = std::log(stream.uniform());
  // log s(xdot + delta) - log s(xdot) for the standard Normal density s.
  const double log_ratio = -0.5 * (xdot + delta).squaredNorm() + 0.5 * xdot.squaredNorm();

  CoupledDraw draw;
  draw.x = mu1 + (scale.array() * xdot.array()).matrix();
  if (log_u < log_ratio) {
    draw.y = draw.x;
    draw.identical = true;
  } else {
    const Eigen::VectorXd e = delta / delta.norm();
    const Eigen::VectorXd ydot = xdot - 2.0 * e.dot(xdot) * e;
    draw.y = mu2 + (scale.array() * ydot.array()).matrix();
  }
  return draw;
}

CoupledDraw crn_quantile_coupling(const QuantileFunction& qf_p, const QuantileFunction& qf_q,
                                  Stream& stream) {
  const double u = stream.open_uniform();
  CoupledDraw draw;
  draw.x = Point::Constant(1, qf_p(u));
  draw.y = Point::Constant(1, qf_q(u));
  if (draw.x[0] == draw.y[0]) {
    draw.y = draw.x;
    draw.identical = true;
  }
  return draw;
}

}  // namespace umcmc
