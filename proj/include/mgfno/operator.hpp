/// @file operator.hpp
/// @brief Full operator models: FNO (lift, Fourier layers, projection) and
/// the multiscale wrapper summing coordinate-dilated branches.
#pragma once

#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgfno/nn.hpp"
#include "mgfno/tape.hpp"

namespace mgfno {

struct FnoConfig {
  std::size_t spatial_dim = 1;
  std::size_t in_channels = 1;   // function-valued input channels, coordinates come on top
  std::size_t out_channels = 1;
  std::size_t width = 64;
  std::size_t modes = 16;
  std::size_t n_layers = 4;
  std::size_t proj_dim = 128;
  FourierVariant variant = FourierVariant::standard;
  Activation activation = Activation::gelu;
  bool periodic = true;  // coordinate convention: i/n (periodic) or i/(n-1) (bounded)

  void validate() const;
  nlohmann::json to_json() const;
  static FnoConfig from_json(const nlohmann::json& j);
};

/// Normalized grid coordinates, one channel per spatial axis, multiplied by
/// `scale`: shape [grid..., dim].
Tensor grid_coordinates(const Shape& grid, bool periodic, double scale = 1.0);

/// Channel-last network input [grid..., 1 + dim] for a scalar field a[grid...].
Tensor with_coordinates(const Tensor& a, bool periodic, double coordinate_scale = 1.0);

/// Common interface of the trainable operators. Inputs and outputs are scalar
/// fields on a grid ([grid...]); coordinate channels are added internally.
class OperatorModel {
 public:
  virtual ~OperatorModel() = default;

  virtual Var forward(Tape& tape, const Tensor& a) const = 0;
  virtual std::vector<Parameter*> parameters() = 0;
  virtual std::vector<const Parameter*> parameters() const = 0;
  virtual std::size_t spatial_dim() const = 0;
  virtual nlohmann::json describe() const = 0;
  virtual std::unique_ptr<OperatorModel> clone() const = 0;

  /// Evaluation without recording gradients.
  Tensor predict(const Tensor& a) const;
  std::size_t parameter_count() const;
};

class FnoModel : public OperatorModel {
 public:
  FnoModel() = default;
  FnoModel(const FnoConfig& cfg, std::uint64_t seed, const std::string& name = "fno");

  const FnoConfig& config() const { return cfg_; }

  /// Raw network pass on a prepared input [grid..., in_channels + dim].
  Var forward_input(Tape& tape, Var input) const;
  /// Pass on a scalar field with coordinates scaled by `coordinate_scale`.
  Var forward_scaled(Tape& tape, const Tensor& a, double coordinate_scale) const;

  Var forward(Tape& tape, const Tensor& a) const override { return forward_scaled(tape, a, 1.0); }
  std::vector<Parameter*> parameters() override;
  std::vector<const Parameter*> parameters() const override;
  std::size_t spatial_dim() const override { return cfg_.spatial_dim; }
  nlohmann::json describe() const override;
  std::unique_ptr<OperatorModel> clone() const override { return std::make_unique<FnoModel>(*this); }

  LinearLayer lift;
  std::vector<FourierLayer> layers;
  LinearLayer proj0;
  LinearLayer proj1;

 private:
  FnoConfig cfg_;
};

struct MscaleConfig {
  std::vector<double> scales{1.0, 2.0, 4.0, 8.0};
  FnoConfig branch;
  /// One FnoModel reused by every scale (weight tying) versus one per scale.
  bool shared_branches = true;

  void validate() const;
  nlohmann::json to_json() const;
  static MscaleConfig from_json(const nlohmann::json& j);
};

/// Sum over scales of branch_i(a with coordinates * alpha_i). `branches` holds
/// one model per scale; the same pointer may repeat to tie weights.
Var mscale_forward(Tape& tape, const MscaleConfig& cfg, std::span<const FnoModel* const> branches, const Tensor& a);

class MscaleModel : public OperatorModel {
 public:
  MscaleModel() = default;
  /// The branch activation is forced to phi.
  MscaleModel(const MscaleConfig& cfg, std::uint64_t seed, const std::string& name = "mscale");

  const MscaleConfig& config() const { return cfg_; }
  const std::vector<FnoModel>& branches() const { return branches_; }
  std::vector<FnoModel>& branches() { return branches_; }

  Var forward(Tape& tape, const Tensor& a) const override;
  std::vector<Parameter*> parameters() override;
  std::vector<const Parameter*> parameters() const override;
  std::size_t spatial_dim() const override { return cfg_.branch.spatial_dim; }
  nlohmann::json describe() const override;
  std::unique_ptr<OperatorModel> clone() const override { return std::make_unique<MscaleModel>(*this); }

 private:
  MscaleConfig cfg_;
  std::vector<FnoModel> branches_;
};

/// Rebuild a model from describe() output (weights initialized from `seed`).
std::unique_ptr<OperatorModel> make_model(const nlohmann::json& description, std::uint64_t seed);

/// Per-sample ||pred - target|| / ||target|| on the tape (differentiable in pred).
Var relative_l2(Var pred, const Tensor& target);
double relative_l2(const Tensor& pred, const Tensor& target);
/// Mean of per-sample relative errors.
double relative_l2(const std::vector<Tensor>& preds, const std::vector<Tensor>& targets);

}  // namespace mgfno
