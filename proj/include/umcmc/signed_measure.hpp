#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "umcmc/coupled_chains.hpp"
#include "umcmc/rng.hpp"
#include "umcmc/types.hpp"

namespace umcmc {

/// Weighted atoms sum_n w_n delta_{Z_n}; weights may be negative.
struct SignedMeasure {
  StateTrace atoms;
  std::vector<double> weights;

  // Provenance.
  std::int64_t k = 0;
  std::int64_t ell = 0;
  std::int64_t lag = 1;
  std::int64_t tau = 0;

  std::size_t size() const { return weights.size(); }
  double total_weight() const;
  /// sum_n w_n h(Z_n)
  double apply(const TestFunction& h) const;
};

/// Unbiased signed approximation of pi built from a met trajectory.
///
/// Atoms are X_k..X_{max(ell, tau-1)} followed by Y_{t-L} for
/// t = k + L..tau - 1. X_t carries 1/(ell-k+1) when t <= ell plus v_t when it
/// takes part in the bias cancellation; Y_{t-L} carries -v_t. When tau <= ell + 1
/// the atom count is max(0, tau - (k + L)) + (ell - k + 1); otherwise the X
/// states beyond ell add max(0, tau - 1 - max(ell, k + L - 1)) atoms.
SignedMeasure signed_measure(const CoupledTrajectory& trajectory, std::int64_t k, std::int64_t ell);

/// Atom count of signed_measure for the given parameters.
std::int64_t signed_measure_size(std::int64_t k, std::int64_t ell, std::int64_t lag, std::int64_t tau);

struct WeightedAtom {
  Point atom;
  double weight = 0.0;
  std::size_t index = 0;  // position in the source measure
};

/// m independent draws of an atom index I. With no probabilities the index is
/// uniform and the atom is weighted N w_I; with probabilities xi (strictly
/// positive, summing to one) it is weighted w_I / xi_I. In both cases the
/// expected weighted h equals measure.apply(h).
std::vector<WeightedAtom> subsample(const SignedMeasure& measure, std::size_t m,
                                    const std::optional<std::vector<double>>& probabilities,
                                    Stream& stream);

}  // namespace umcmc
