/// @file tensor.hpp
/// @brief Dense row-major real and complex tensors.
///
/// Every numeric container in the library is one of these two types. Shapes
/// are lists of positive extents; the last axis is contiguous. Field samples
/// use channel-last layout, i.e. a 2D field with C channels is [n0, n1, C].
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mgfno {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Row-major strides for `shape` (last axis has stride 1).
std::vector<std::size_t> row_major_strides(const Shape& shape);

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape) { return Tensor(std::move(shape), 0.0); }
  static Tensor ones(Shape shape) { return Tensor(std::move(shape), 1.0); }
  static Tensor scalar(double v) { return Tensor(Shape{1}, v); }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double& at(std::initializer_list<std::size_t> index);
  double at(std::initializer_list<std::size_t> index) const;

  /// Same data, new shape. Throws if the element count differs.
  Tensor reshaped(Shape shape) const;

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);

  double sum() const;
  double squared_norm() const;
  double norm() const;
  double max_abs() const;
  bool all_finite() const;

 private:
  std::size_t flat_index(std::initializer_list<std::size_t> index) const;

  Shape shape_;
  std::vector<double> data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(Tensor a, double s);
Tensor operator*(double s, Tensor a);

/// Complex tensor stored as separate real and imaginary planes.
class ComplexTensor {
 public:
  ComplexTensor() = default;
  explicit ComplexTensor(Shape shape);
  ComplexTensor(Shape shape, std::vector<double> re, std::vector<double> im);

  /// Promote a real tensor (imaginary part zero).
  static ComplexTensor from_real(const Tensor& x);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return re_.size(); }

  std::span<double> re() { return re_; }
  std::span<const double> re() const { return re_; }
  std::span<double> im() { return im_; }
  std::span<const double> im() const { return im_; }

  ComplexTensor reshaped(Shape shape) const;

  Tensor real_part() const;
  Tensor imag_part() const;
  /// Elementwise |z|.
  Tensor abs() const;

  ComplexTensor& operator+=(const ComplexTensor& other);
  ComplexTensor& operator*=(double s);

  double squared_norm() const;
  double max_abs() const;
  bool all_finite() const;

 private:
  Shape shape_;
  std::vector<double> re_;
  std::vector<double> im_;
};

ComplexTensor operator+(ComplexTensor a, const ComplexTensor& b);
ComplexTensor operator-(ComplexTensor a, const ComplexTensor& b);
ComplexTensor operator*(ComplexTensor a, double s);

void require_same_shape(const Shape& a, const Shape& b, const char* what);

}  // namespace mgfno
