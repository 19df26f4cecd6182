#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace umcmc {

/// A state of the chain. Dense, column vector, double precision.
using Point = Eigen::VectorXd;
using PointRef = Eigen::Ref<const Point>;

/// Scalar test function h: R^d -> R.
using TestFunction = std::function<double(const PointRef&)>;

/// Append-only sequence of points of fixed dimension stored contiguously
/// (column t holds the state at time t).
class StateTrace {
 public:
  StateTrace() = default;
  explicit StateTrace(Eigen::Index dim) : dim_(dim) {}

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const { return data_.empty(); }

  void reserve(std::size_t count) { data_.reserve(count * static_cast<std::size_t>(dim_)); }

  void push_back(const PointRef& x) {
    if (x.size() != dim_) throw std::invalid_argument("StateTrace: dimension mismatch");
    data_.insert(data_.end(), x.data(), x.data() + dim_);
  }

  Eigen::Map<const Point> operator[](std::size_t t) const {
    return Eigen::Map<const Point>(data_.data() + t * static_cast<std::size_t>(dim_), dim_);
  }

  Eigen::Map<const Point> at(std::size_t t) const {
    if (t >= size()) throw std::out_of_range("StateTrace: index beyond stored range");
    return (*this)[t];
  }

  Eigen::Map<const Point> back() const { return (*this)[size() - 1]; }

 private:
  Eigen::Index dim_ = 0;
  std::vector<double> data_;
};

}  // namespace umcmc
