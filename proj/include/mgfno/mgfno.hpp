/// @file mgfno.hpp
/// @brief Three-level residual training of neural operators on a resolution
/// ladder and the resulting additive ensemble.
///
/// Level 1 learns a -> u on the coarsest grid. Each later level learns the
/// residual left by the levels before it, computed on the previous grid,
/// interpolated to the next one and then normalized with global train-split
/// statistics. The ensemble evaluates every level directly at the query
/// resolution and sums the de-normalized outputs.
#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mgfno/io.hpp"
#include "mgfno/nn.hpp"
#include "mgfno/operator.hpp"

namespace mgfno {

struct GridLevel {
  std::size_t resolution = 0;
  Dataset data;
};

/// Resolution ladder (coarse to fine) over the same underlying instances.
struct GridHierarchy {
  std::vector<GridLevel> levels;
  bool periodic = true;

  /// Checks strictly increasing resolutions, matching sample counts, grids
  /// consistent with the resolutions and a common generation seed when the
  /// metadata records one.
  void validate() const;
};

/// Interpolates a field onto `target` extents. On bounded grids node i of n
/// sits at i/(n-1); on periodic grids at i/n with wrap-around. For n -> 2n-1
/// (bounded) and n -> 2n (periodic) this is exactly the midpoint rule
/// v_{2i} = v_i, v_{2i+1} = (v_i + v_{i+1})/2 per axis, with the four-point
/// average at cell centers in 2D; other ladders use multilinear interpolation.
Tensor prolong_residual(const Tensor& r, const Shape& target, bool periodic);

struct NormalizationStats {
  double mean = 0.0;
  double std = 1.0;

  /// Global mean and standard deviation over all entries; std below 1e-12
  /// falls back to 1.
  static NormalizationStats from(const std::vector<Tensor>& samples);
  Tensor normalize(const Tensor& x) const;
  Tensor denormalize(const Tensor& x) const;
  nlohmann::json to_json() const { return {{"mean", mean}, {"std", std}}; }
  static NormalizationStats from_json(const nlohmann::json& j);
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;  // NaN when the test split is empty
};

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 20;
  std::size_t train_count = 0;  // first samples form the train split; 0 = all
  AdamConfig adam;
  std::uint64_t shuffle_seed = 0;
  bool shuffle = true;
  std::size_t threads = 1;
  /// Called after every epoch with the running optimizer step count.
  std::function<void(const EpochRecord&, std::size_t steps, const OperatorModel&)> on_epoch;
};

/// Minimizes the mean per-sample relative L2 loss with Adam over mini-batches.
/// Per-sample gradients are summed in sample order, so results do not depend
/// on the worker count. Throws TrainingDiverged on a non-finite loss or gradient.
std::vector<EpochRecord> train_level(OperatorModel& model, const Dataset& data, const TrainConfig& cfg);

/// Mean relative L2 error of model predictions over samples [begin, end).
double evaluate(const OperatorModel& model, const Dataset& data, std::size_t begin, std::size_t end,
                std::size_t threads = 1);

/// Additive ensemble: level 0 predicts u, level l > 0 predicts a normalized
/// residual with stats[l].
class EnsembleModel {
 public:
  EnsembleModel() = default;
  EnsembleModel(const EnsembleModel& other);
  EnsembleModel& operator=(const EnsembleModel& other);
  EnsembleModel(EnsembleModel&&) noexcept = default;
  EnsembleModel& operator=(EnsembleModel&&) noexcept = default;

  void add_level(std::unique_ptr<OperatorModel> model, NormalizationStats stats);
  void mark_trained(std::size_t level);

  std::size_t levels() const { return models_.size(); }
  bool trained(std::size_t level) const { return trained_.at(level); }
  OperatorModel& model(std::size_t level) { return *models_.at(level); }
  const OperatorModel& model(std::size_t level) const { return *models_.at(level); }
  const NormalizationStats& stats(std::size_t level) const { return stats_.at(level); }

  /// De-normalized contribution of one level at the resolution of `a`.
  Tensor level_prediction(std::size_t level, const Tensor& a) const;
  /// Sum of the first `count` levels (all levels by default). Requires those
  /// levels to be trained.
  Tensor predict(const Tensor& a, std::optional<std::size_t> count = std::nullopt) const;

  std::size_t parameter_count() const;

  /// Checkpoint bundle: one MGFT archive per level plus manifest.json.
  void save(const std::filesystem::path& dir) const;
  static EnsembleModel load(const std::filesystem::path& dir);

 private:
  std::vector<std::unique_ptr<OperatorModel>> models_;
  std::vector<NormalizationStats> stats_;
  std::vector<bool> trained_;
};

/// Largest retained mode count of a model (FNO or multiscale).
std::size_t model_modes(const OperatorModel& model);

/// Ensemble prediction; throws std::invalid_argument unless every axis of a
/// has at least 2 * max modes points.
Tensor ensemble_predict(const EnsembleModel& ens, const Tensor& a);

/// Mean relative error of the ensemble over samples [begin, end).
double evaluate(const EnsembleModel& ens, const Dataset& data, std::size_t begin, std::size_t end,
                std::size_t threads = 1);

struct ResidualDataset {
  Dataset data;  // next-level inputs, normalized prolonged residual targets
  NormalizationStats stats;
};

/// Residual u - ens(a) on `level`, interpolated onto `next`'s grid, then
/// normalized with statistics of the first `train_count` samples.
ResidualDataset compute_residual_dataset(const EnsembleModel& partial, const Dataset& level, const Dataset& next,
                                         std::size_t train_count, bool periodic, std::size_t threads = 1);

struct MgfnoConfig {
  FnoConfig level1;
  FnoConfig level2;
  MscaleConfig level3;
  std::vector<TrainConfig> training;  // one per level
  std::uint64_t seed = 0;             // model initialization
};

struct MgfnoResult {
  EnsembleModel ensemble;
  std::vector<std::vector<EpochRecord>> histories;
  std::vector<Dataset> targets;  // training targets per level (level 0: u)
};

/// Trains levels strictly in sequence on `hierarchy` (three levels).
MgfnoResult train_mgfno(const GridHierarchy& hierarchy, const MgfnoConfig& cfg);

}  // namespace mgfno
