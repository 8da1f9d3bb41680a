/// @file analysis.hpp
/// @brief Frequency-domain diagnostics: the spectral-bias experiment on
/// sin x + sin 5x, per-band spectral errors and resolution sweeps.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mgfno/io.hpp"
#include "mgfno/tensor.hpp"

namespace mgfno::analysis {

/// One row of a band-error trace. For single-frequency tracking band_lo ==
/// band_hi == the bin.
struct BandErrorEntry {
  std::size_t step = 0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  double rel_err = 0.0;
};
using BandErrorTrace = std::vector<BandErrorEntry>;

/// Largest radial wavenumber on a grid: n/2 in 1D, |(n0/2, n1/2)| in 2D.
double nyquist(const Shape& grid);

/// Edges {0, 4, 16, nyquist}: bands [0,4), [4,16), [16, nyquist]. Interior
/// edges at or above the nyquist wavenumber are dropped.
std::vector<double> default_band_edges(const Shape& grid);

/// ||(F pred - F target) 1_band|| / ||F target 1_band|| per band, using the
/// full DFT and the radial wavenumber |k| (signed bins folded). Band b covers
/// [edges[b], edges[b+1]), the last band also includes its upper edge. Bands
/// whose target energy is zero (below 1e-24 of the total, i.e. round-off) are
/// reported as std::nullopt.
std::vector<std::optional<double>> band_error(const Tensor& pred, const Tensor& target,
                                              const std::vector<double>& edges);

/// Fraction of the spectral energy of x at radial wavenumbers >= cutoff.
double energy_fraction_above(const Tensor& x, double cutoff);

struct FPrincipleConfig {
  enum class Optimizer { adam, gradient_descent };
  /// Mean squared error, or 1/2 sum of squares over the points.
  enum class Loss { mean_squared, half_sum_squared };

  std::uint64_t seed = 0;
  std::size_t points = 1000;  // samples of [-2 pi, 2 pi), endpoint excluded
  std::size_t hidden = 200;
  double learning_rate = 5e-4;
  double init_std = 0.1;
  Optimizer optimizer = Optimizer::adam;
  Loss loss = Loss::mean_squared;
  std::size_t max_steps = 3000;
  std::size_t record_every = 10;
  double threshold = 0.1;
  /// Stop once both tracked frequencies are below the threshold.
  bool stop_when_converged = true;
};

struct FPrinciplePoint {
  std::size_t step = 0;
  double low = 0.0;   // relative error |h_k - f_k| / |f_k| at the bin of sin x
  double high = 0.0;  // same at the bin of sin 5x
  double loss = 0.0;  // training loss
};

struct FPrincipleResult {
  std::size_t k_low = 0, k_high = 0;
  std::vector<FPrinciplePoint> trace;
  std::optional<std::size_t> low_step, high_step;  // first recorded step below threshold

  /// The low bin converged and did so strictly before the high bin (which
  /// may not converge at all within the step budget).
  bool ordering_holds() const { return low_step && (!high_step || *low_step < *high_step); }
  BandErrorTrace band_trace() const;
};

/// Trains the 1-hidden^2-1 ReLU network on f(x) = sin x + sin 5x with
/// full-batch updates of the mean squared error. Throws std::runtime_error
/// naming the step if the loss becomes non-finite.
FPrincipleResult fprinciple_experiment(const FPrincipleConfig& cfg);

using Predictor = std::function<Tensor(const Tensor&)>;

struct SweepRow {
  std::size_t resolution = 0;
  std::string model;
  double rel_err = 0.0;
};

/// Mean relative L2 test error of each named predictor on samples [begin,
/// end) of every dataset (one dataset per evaluation resolution).
std::vector<SweepRow> superres_eval(const std::vector<std::pair<std::string, Predictor>>& models,
                                    const std::vector<Dataset>& datasets, std::size_t begin, std::size_t end,
                                    std::size_t threads = 1);

/// Mean band errors of a predictor over samples [begin, end); absent bands
/// are skipped in the mean.
std::vector<std::optional<double>> mean_band_error(const Predictor& model, const Dataset& data, std::size_t begin,
                                                   std::size_t end, const std::vector<double>& edges);

/// CSV emitters: `step,band_lo,band_hi,rel_err` and `resolution,model,rel_err`.
void write_trace_csv(const BandErrorTrace& trace, const std::filesystem::path& path);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

}  // namespace mgfno::analysis
