#pragma once

#include <cstddef>
#include <vector>

namespace ahpa {

/// Dense row-major n x n matrix of doubles.
class SquareMatrix {
public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  bool operator==(const SquareMatrix&) const = default;

private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

} // namespace ahpa
