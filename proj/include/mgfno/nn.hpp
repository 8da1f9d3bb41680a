/// @file nn.hpp
/// @brief Trainable layers, the phi activation and the Adam optimizer.
///
/// All layers act on a single sample laid out channel-last: [grid..., C].
#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgfno/tape.hpp"
#include "mgfno/tensor.hpp"

namespace mgfno {

/// Pointwise affine map over the channel axis (1x1 convolution).
struct LinearLayer {
  Parameter weight;  // [d_out, d_in]
  Parameter bias;    // [d_out]

  LinearLayer() = default;
  /// Uniform(-1/sqrt(d_in), 1/sqrt(d_in)) for weight and bias.
  LinearLayer(const std::string& name, std::size_t d_in, std::size_t d_out, std::mt19937_64& rng);

  std::size_t d_in() const;
  std::size_t d_out() const;

  Var apply(Tape& tape, Var x) const;
  void collect(std::vector<Parameter*>& out);
  void collect(std::vector<const Parameter*>& out) const;
};

/// Fourier-space kernel: rfft over the last spatial axis, full FFT over the
/// others, per-mode complex channel mixing on the retained low modes, inverse.
struct SpectralConvLayer {
  Parameter weights;  // complex; 1D [k, cin, cout], 2D [2k-1, k, cin, cout]
  std::size_t dim = 1;
  std::size_t modes = 0;

  SpectralConvLayer() = default;
  /// Entries of R uniform in [0, 1) (real and imaginary) scaled by 1/(cin*cout).
  SpectralConvLayer(const std::string& name, std::size_t dim, std::size_t modes, std::size_t cin, std::size_t cout,
                    std::mt19937_64& rng);

  std::size_t d_in() const;
  std::size_t d_out() const;

  /// Throws std::invalid_argument when the grid cannot hold the retained modes.
  void check_grid(const Shape& grid) const;

  Var apply(Tape& tape, Var v) const;
  void collect(std::vector<Parameter*>& out);
  void collect(std::vector<const Parameter*>& out) const;
};

/// Retained index lists for a spectral layer on a given grid (half spectrum on
/// the last spatial axis).
std::vector<std::vector<std::size_t>> spectral_mode_index(const Shape& grid, std::size_t modes);

enum class FourierVariant {
  standard,     // sigma(W v + S(v))
  channel_mlp,  // sigma(W v + MLP(S(v)))
  skip,         // sigma(v + W v + MLP(S(v)))
};

FourierVariant fourier_variant_from_string(const std::string& name);
std::string to_string(FourierVariant v);

/// Two pointwise layers with an activation between, same width throughout.
struct ChannelMlp {
  LinearLayer first;
  LinearLayer second;

  Var apply(Tape& tape, Var x, Activation act) const;
};

struct FourierLayer {
  LinearLayer w;
  SpectralConvLayer spectral;
  ChannelMlp mlp;  // unused by the standard variant
  FourierVariant variant = FourierVariant::standard;
  Activation activation = Activation::gelu;
  bool apply_activation = true;

  FourierLayer() = default;
  FourierLayer(const std::string& name, std::size_t dim, std::size_t width, std::size_t modes, FourierVariant variant,
               Activation activation, std::mt19937_64& rng);

  Var apply(Tape& tape, Var v) const;
  void collect(std::vector<Parameter*>& out);
  void collect(std::vector<const Parameter*>& out) const;
};

/// Elementwise phi(x) = relu(x)^2 - 3 relu(x-1)^2 + 3 relu(x-2)^2 - relu(x-3)^2.
Tensor phi_activation(const Tensor& x);

std::size_t parameter_count(const std::vector<const Parameter*>& params);

struct AdamConfig {
  double lr0 = 1e-3;
  std::size_t halving_period = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class NonFiniteGradient : public std::runtime_error {
 public:
  NonFiniteGradient(std::size_t id, const std::string& name)
      : std::runtime_error("non-finite gradient for parameter " + std::to_string(id) + " ('" + name + "')"),
        id_(id) {}
  std::size_t parameter_id() const { return id_; }

 private:
  std::size_t id_;
};

/// Adam with bias correction. Moment buffers are aligned with the parameter
/// list given at construction; complex parameters are updated as independent
/// real and imaginary parts.
class AdamState {
 public:
  AdamState(AdamConfig cfg, const std::vector<Parameter*>& params);

  double learning_rate(std::size_t epoch) const;

  /// Applies one update. Throws NonFiniteGradient before touching any
  /// parameter if a gradient entry is NaN or infinite.
  void step(const std::vector<Parameter*>& params, const std::vector<NodeData>& grads, std::size_t epoch);

  std::size_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t t_ = 0;
};

/// Checkpoint I/O through the named-tensor archive; entries are keyed by
/// parameter name. Loading checks names and shapes.
void save_parameters(const std::vector<const Parameter*>& params, const std::filesystem::path& path);
void load_parameters(const std::vector<Parameter*>& params, const std::filesystem::path& path);

}  // namespace mgfno
