#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace roughcalib::nn {

// Dense row-major buffer. Feature maps are {channels, length}; dense
// activations are {units}.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> values);

  static Tensor vector(std::vector<double> values);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  // Channel/position access for rank-2 feature maps.
  double& at(std::size_t c, std::size_t i) { return values_[c * shape_[1] + i]; }
  double at(std::size_t c, std::size_t i) const { return values_[c * shape_[1] + i]; }

  void reshape(std::vector<std::size_t> shape);
  bool all_finite() const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
};

std::size_t shape_product(const std::vector<std::size_t>& shape);

}  // namespace roughcalib::nn
