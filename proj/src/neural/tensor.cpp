#include "dupliq/neural/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "dupliq/common.hpp"

namespace dupliq::neural {

std::size_t element_count(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(std::span<const std::size_t> shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

Tensor::Tensor(std::vector<std::size_t> s, double fill) : shape(std::move(s)), data(element_count(shape), fill) {}

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
  if (data.size() != element_count(shape)) {
    throw ContractError("tensor data of size " + std::to_string(data.size()) + " does not fill shape " +
                        shape_string(shape));
  }
}

Tensor take_rows(const Tensor& t, std::span<const std::size_t> rows) {
  if (t.rank() == 0) throw ContractError("cannot take rows of a scalar tensor");
  std::vector<std::size_t> shape = t.shape;
  shape[0] = rows.size();
  Tensor out(shape);
  const std::size_t stride = t.stride0();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= t.shape[0]) throw ContractError("row index out of range");
    std::copy_n(t.data.begin() + static_cast<std::ptrdiff_t>(rows[i] * stride), stride,
                out.data.begin() + static_cast<std::ptrdiff_t>(i * stride));
  }
  return out;
}

}  // namespace dupliq::neural
