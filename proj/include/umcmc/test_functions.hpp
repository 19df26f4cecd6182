#pragma once

#include <string>
#include <vector>

#include "umcmc/types.hpp"

namespace umcmc {

/// A test function with the serialisable name it was built from.
struct NamedFunction {
  std::string name;
  TestFunction fn;

  double operator()(const PointRef& x) const { return fn(x); }
};

namespace h {

/// x -> x[i]
NamedFunction coordinate(Eigen::Index i);
/// x -> x[i]^power
NamedFunction coordinate_power(Eigen::Index i, int power);
/// x -> c
NamedFunction constant(double c);
/// x -> |x|^2
NamedFunction squared_norm();
/// x -> f(x)^2
NamedFunction square(const NamedFunction& f);
/// x -> f(x) * g(x)
NamedFunction product(const NamedFunction& f, const NamedFunction& g);

}  // namespace h

/// Parses "x0", "x1^2", "const(2.5)", "norm2", and products "a*b" of those.
/// Throws std::invalid_argument on malformed input.
NamedFunction parse_test_function(const std::string& text);

std::vector<NamedFunction> parse_test_functions(const std::vector<std::string>& texts);

}  // namespace umcmc
