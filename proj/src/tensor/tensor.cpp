#include "mgfno/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mgfno {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::vector<std::size_t> row_major_strides(const Shape& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) strides[i - 1] = strides[i] * shape[i];
  return strides;
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + shape_string(a) +
                                " vs " + shape_string(b));
  }
}

namespace {

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor shape must have at least one axis");
  for (auto e : shape) {
    if (e == 0) throw std::invalid_argument("tensor extents must be positive: " + shape_string(shape));
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  validate_shape(shape_);
  if (data_.size() != shape_size(shape_)) {
    throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                " does not match shape " + shape_string(shape_));
  }
}

std::size_t Tensor::flat_index(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) throw std::out_of_range("tensor index rank mismatch");
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (auto i : index) {
    if (i >= shape_[axis]) throw std::out_of_range("tensor index out of range");
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return flat;
}

double& Tensor::at(std::initializer_list<std::size_t> index) { return data_[flat_index(index)]; }
double Tensor::at(std::initializer_list<std::size_t> index) const { return data_[flat_index(index)]; }

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    throw std::invalid_argument("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return Tensor(std::move(shape), data_);
}

Tensor& Tensor::operator+=(const Tensor& other) {
  require_same_shape(shape_, other.shape_, "tensor +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  require_same_shape(shape_, other.shape_, "tensor -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

double Tensor::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double Tensor::squared_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

double Tensor::norm() const { return std::sqrt(squared_norm()); }

double Tensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(Tensor a, double s) { return a *= s; }
Tensor operator*(double s, Tensor a) { return a *= s; }

ComplexTensor::ComplexTensor(Shape shape) : shape_(std::move(shape)) {
  validate_shape(shape_);
  re_.assign(shape_size(shape_), 0.0);
  im_.assign(re_.size(), 0.0);
}

ComplexTensor::ComplexTensor(Shape shape, std::vector<double> re, std::vector<double> im)
    : shape_(std::move(shape)), re_(std::move(re)), im_(std::move(im)) {
  validate_shape(shape_);
  if (re_.size() != shape_size(shape_) || im_.size() != re_.size()) {
    throw std::invalid_argument("complex tensor planes do not match shape " + shape_string(shape_));
  }
}

ComplexTensor ComplexTensor::from_real(const Tensor& x) {
  return ComplexTensor(x.shape(), x.storage(), std::vector<double>(x.size(), 0.0));
}

ComplexTensor ComplexTensor::reshaped(Shape shape) const {
  if (shape_size(shape) != re_.size()) {
    throw std::invalid_argument("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  return ComplexTensor(std::move(shape), re_, im_);
}

Tensor ComplexTensor::real_part() const { return Tensor(shape_, re_); }
Tensor ComplexTensor::imag_part() const { return Tensor(shape_, im_); }

Tensor ComplexTensor::abs() const {
  Tensor out(shape_);
  for (std::size_t i = 0; i < re_.size(); ++i) out[i] = std::hypot(re_[i], im_[i]);
  return out;
}

ComplexTensor& ComplexTensor::operator+=(const ComplexTensor& other) {
  require_same_shape(shape_, other.shape_, "complex +=");
  for (std::size_t i = 0; i < re_.size(); ++i) {
    re_[i] += other.re_[i];
    im_[i] += other.im_[i];
  }
  return *this;
}

ComplexTensor& ComplexTensor::operator*=(double s) {
  for (auto& v : re_) v *= s;
  for (auto& v : im_) v *= s;
  return *this;
}

double ComplexTensor::squared_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < re_.size(); ++i) s += re_[i] * re_[i] + im_[i] * im_[i];
  return s;
}

double ComplexTensor::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < re_.size(); ++i) m = std::max(m, std::hypot(re_[i], im_[i]));
  return m;
}

bool ComplexTensor::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(re_.begin(), re_.end(), finite) && std::all_of(im_.begin(), im_.end(), finite);
}

ComplexTensor operator+(ComplexTensor a, const ComplexTensor& b) { return a += b; }

ComplexTensor operator-(ComplexTensor a, const ComplexTensor& b) {
  require_same_shape(a.shape(), b.shape(), "complex -");
  for (std::size_t i = 0; i < a.size(); ++i) {
    a.re()[i] -= b.re()[i];
    a.im()[i] -= b.im()[i];
  }
  return a;
}

ComplexTensor operator*(ComplexTensor a, double s) { return a *= s; }

}  // namespace mgfno
