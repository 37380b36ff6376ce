#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dupliq::neural {

/// Row-major array of doubles; the first axis is the batch.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  /// Throws ContractError when data does not fill the shape.
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  std::size_t rank() const { return shape.size(); }
  std::size_t size() const { return data.size(); }
  std::size_t dim(std::size_t axis) const { return shape.at(axis); }
  /// Elements per leading-axis slice.
  std::size_t stride0() const { return shape.empty() || shape[0] == 0 ? 0 : data.size() / shape[0]; }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  bool operator==(const Tensor&) const = default;
};

std::size_t element_count(std::span<const std::size_t> shape);
std::string shape_string(std::span<const std::size_t> shape);

/// Rows of `t` along the batch axis, in the given order.
Tensor take_rows(const Tensor& t, std::span<const std::size_t> rows);

}  // namespace dupliq::neural
