#pragma once

#include <cstdint>
#include <functional>

#include "umcmc/rng.hpp"

namespace umcmc {

/// Law of the truncation level xi on {0, 1, 2, ...}.
class TruncationLaw {
 public:
  virtual ~TruncationLaw() = default;
  /// P(xi = k)
  virtual double pmf(std::int64_t k) const = 0;
  /// P(xi >= k)
  virtual double tail(std::int64_t k) const = 0;
  virtual std::int64_t sample(Stream& stream) const = 0;
};

/// P(xi = k) = p (1 - p)^k, P(xi >= k) = (1 - p)^k.
class GeometricTruncation final : public TruncationLaw {
 public:
  explicit GeometricTruncation(double p);
  double pmf(std::int64_t k) const override;
  double tail(std::int64_t k) const override;
  std::int64_t sample(Stream& stream) const override;

 private:
  double p_;
};

/// xi = k0 with probability one.
class PointMassTruncation final : public TruncationLaw {
 public:
  explicit PointMassTruncation(std::int64_t k0);
  double pmf(std::int64_t k) const override { return k == k0_ ? 1.0 : 0.0; }
  double tail(std::int64_t k) const override { return k <= k0_ ? 1.0 : 0.0; }
  std::int64_t sample(Stream&) const override { return k0_; }

 private:
  std::int64_t k0_;
};

/// Terms a_0, a_1, ... of a series whose sum is estimated.
using Sequence = std::function<double(std::int64_t)>;

/// G = a_xi / P(xi = xi). Throws std::domain_error if the drawn level has
/// probability zero.
double telescope_single_term(const Sequence& a, const TruncationLaw& law, Stream& stream);

/// H = a_0 + sum_{k=1}^{xi} a_k / P(xi >= k).
double telescope_coupled_sum(const Sequence& a, const TruncationLaw& law, Stream& stream);

}  // namespace umcmc
