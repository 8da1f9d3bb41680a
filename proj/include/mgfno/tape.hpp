/// @file tape.hpp
/// @brief Define-by-run reverse-mode differentiation.
///
/// A Tape records every primitive as it is evaluated (values are computed
/// eagerly) together with its adjoint rule. Gradients of complex nodes use the
/// convention g = dL/dRe + i dL/dIm, under which the adjoint of a complex
/// linear map A is its conjugate transpose A^H.
///
/// A tape is single-use: build it, call backward() once, read gradients, throw
/// it away. Parameters are registered by address for the tape's lifetime and
/// receive stable integer ids in registration order.
#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mgfno/tensor.hpp"

namespace mgfno {

using NodeData = std::variant<Tensor, ComplexTensor>;

const Shape& data_shape(const NodeData& d);
NodeData zeros_like(const NodeData& d);
bool is_complex(const NodeData& d);

/// A named trainable value owned by a model.
struct Parameter {
  std::string name;
  NodeData value;

  std::size_t scalar_count() const;  // complex entries count as two reals
};

class Tape;

/// Handle to a node on a tape.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const;
  std::size_t index() const { return index_; }

  const NodeData& data() const;
  const Tensor& real() const;
  const ComplexTensor& cplx() const;
  bool is_complex() const;
  const Shape& shape() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  std::size_t index_ = 0;
};

class Tape {
 public:
  /// Adjoint rule: receives the gradient of the node's output.
  using Adjoint = std::function<void(Tape&, const NodeData& grad_out)>;

  Tape() = default;
  /// With gradients disabled every parameter becomes a constant leaf and no
  /// adjoints are stored (inference mode).
  explicit Tape(bool gradients_enabled) : gradients_enabled_(gradients_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor x);
  Var constant(ComplexTensor x);

  /// Leaf for a model parameter. Registering the same parameter twice returns
  /// the same node, so shared weights accumulate gradients.
  Var param(const Parameter& p);

  /// Append a primitive's output. `inputs` decide whether the output needs a
  /// gradient; the adjoint is dropped when none of them do.
  Var record(NodeData value, std::initializer_list<Var> inputs, Adjoint adjoint);

  bool requires_grad(Var v) const;

  /// Accumulate into the gradient buffer of `v` (allocated on first use).
  void accumulate(Var v, const Tensor& g);
  void accumulate(Var v, const ComplexTensor& g);
  Tensor& grad_buffer_real(Var v);
  ComplexTensor& grad_buffer_complex(Var v);

  /// Reverse sweep from a scalar real node. Throws std::logic_error when
  /// called twice and std::invalid_argument for a non-scalar loss.
  void backward(Var loss);

  /// Gradient of a node after backward (zeros if unreached).
  NodeData grad(Var v) const;

  /// Gradient of a parameter after backward; zeros of the parameter's shape
  /// when it was never registered or not reachable from the loss.
  NodeData gradient(const Parameter& p) const;

  /// Registered parameter id -> gradient.
  std::map<std::size_t, NodeData> gradients() const;

  /// Stable id of a registered parameter (registration order).
  std::size_t parameter_id(const Parameter& p) const;
  std::size_t parameter_count() const { return param_nodes_.size(); }
  std::size_t node_count() const { return nodes_.size(); }
  bool backward_done() const { return backward_done_; }

  const NodeData& value(std::size_t index) const { return nodes_.at(index).value; }

 private:
  struct Node {
    NodeData value;
    std::optional<NodeData> grad;
    Adjoint adjoint;
    bool requires_grad = false;
  };

  Var push(Node node);

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_index_;  // -> param id
  std::vector<std::size_t> param_nodes_;                           // param id -> node
  bool backward_done_ = false;
  bool gradients_enabled_ = true;
};

enum class Activation { identity, relu, gelu, tanh, phi };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

/// Differentiable primitives. All inputs must live on the same tape.
namespace ad {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double s);
Var mul(Var a, Var b);  // elementwise, real
Var reshape(Var a, Shape shape);

/// 2D matrix product A[m,k] * B[k,n].
Var matmul(Var a, Var b);

/// Pointwise dense map over the last axis: x[..., din] -> x W^T + b, W[dout, din],
/// b[dout]. Pass an invalid Var for no bias.
Var linear(Var x, Var w, Var b);

/// Elementwise complex product with the conjugate-product adjoint.
Var cmul(Var a, Var b);

/// Per-mode channel mixing: X[M..., cin] (complex), R[M..., cin, cout] -> [M..., cout].
Var mode_mix(Var x, Var r);

Var fft(Var x, std::vector<std::size_t> axes);           // real or complex -> complex
Var ifft(Var x, std::vector<std::size_t> axes);          // complex -> complex, 1/N
Var ifft_real(Var x, std::vector<std::size_t> axes);     // complex -> real part
Var rfft(Var x, std::size_t axis);
Var irfft(Var x, std::size_t axis, std::size_t n);

/// Zero all modes outside the retained low-frequency set on each full axis.
Var truncate(Var x, std::vector<std::size_t> axes, std::vector<std::size_t> k_max);

/// Gather a sub-block given per-axis index lists (empty list = keep axis whole).
Var gather(Var x, std::vector<std::vector<std::size_t>> index);
/// Adjoint of gather: place x into a zero tensor of `full` shape.
Var scatter(Var x, std::vector<std::vector<std::size_t>> index, Shape full);

Var activate(Var x, Activation act);

Var sum(Var x);          // -> scalar [1]
Var sum_squares(Var x);  // -> scalar [1]
Var sqrt(Var x);         // elementwise, zero gradient at 0

}  // namespace ad

/// Scalar activation values and derivatives (one-sided at knots).
double activation_value(Activation act, double x);
double activation_derivative(Activation act, double x);

}  // namespace mgfno
