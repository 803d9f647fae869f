#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ltn {

// Dense row-major tensor of 64-bit floats. Rank 0 is a scalar.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims);  // zero-filled

  static Tensor scalar(double v);
  static Tensor vector(std::vector<double> values);
  static Tensor zeros_like(const Tensor& other);

  std::size_t rank() const { return shape.size(); }
  std::size_t numel() const { return data.size(); }
  bool is_scalar() const { return shape.empty(); }
  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  // Scalar access; throws std::logic_error on non-scalar tensors.
  double item() const;

  bool all_finite() const;
  std::string shape_str() const;  // e.g. "(30, 60)"
};

std::size_t shape_numel(const std::vector<std::size_t>& dims);

}  // namespace ltn
