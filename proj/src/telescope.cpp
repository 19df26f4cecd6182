#include "umcmc/telescope.hpp"

#include <cmath>
#include <stdexcept>

namespace umcmc {

GeometricTruncation::GeometricTruncation(double p) : p_(p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("GeometricTruncation: p must lie in (0, 1]");
}

double GeometricTruncation::pmf(std::int64_t k) const {
  if (k < 0) return 0.0;
  return p_ * std::pow(1.0 - p_, static_cast<double>(k));
}

double GeometricTruncation::tail(std::int64_t k) const {
  if (k <= 0) return 1.0;
  return std::pow(1.0 - p_, static_cast<double>(k));
}

std::int64_t GeometricTruncation::sample(Stream& stream) const {
  const double u = stream.open_uniform();
  if (p_ == 1.0) return 0;
  return static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-p_)));
}

PointMassTruncation::PointMassTruncation(std::int64_t k0) : k0_(k0) {
  if (k0 < 0) throw std::invalid_argument("PointMassTruncation: level must be nonnegative");
}

double telescope_single_term(const Sequence& a, const TruncationLaw& law, Stream& stream) {
  const std::int64_t xi = law.sample(stream);
  const double p = law.pmf(xi);
  if (!(p > 0.0)) throw std::domain_error("telescope_single_term: drawn level has zero probability");
  return a(xi) / p;
}

double telescope_coupled_sum(const Sequence& a, const TruncationLaw& law, Stream& stream) {
  const std::int64_t xi = law.sample(stream);
  double total = a(0);
  for (std::int64_t k = 1; k <= xi; ++k) {
    const double tail = law.tail(k);
    if (!(tail > 0.0)) throw std::domain_error("telescope_coupled_sum: reachable level has zero tail probability");
    total += a(k) / tail;
  }
  return total;
}

}  // namespace umcmc
