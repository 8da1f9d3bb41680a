/// @file data.hpp
/// @brief Random-field sampling and ground-truth generators for the Burgers
/// and Darcy benchmarks.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mgfno/io.hpp"
#include "mgfno/tensor.hpp"

namespace mgfno::data {

enum class GrfBoundary { periodic, neumann };

/// Gaussian random field N(0, scale * (-Lap + shift I)^(-exponent)) on the unit
/// interval or square.
struct GrfSpec {
  std::size_t dim = 1;
  double scale = 625.0;
  double shift = 25.0;
  double exponent = 2.0;
  GrfBoundary boundary = GrfBoundary::periodic;

  void validate() const;
  /// Standard deviation of the coefficient on the orthonormal eigenfunction
  /// with integer wavenumber vector k: sqrt(scale) * (lambda_k + shift)^(-exponent/2),
  /// lambda_k = |2 pi k|^2 (periodic) or |pi k|^2 (Neumann cosines).
  double mode_std(std::span<const std::size_t> k) const;

  static GrfSpec burgers() { return {}; }
  static GrfSpec darcy() { return {2, 1.0, 9.0, 2.0, GrfBoundary::neumann}; }
};

/// One field sample at `resolution` points per axis. Periodic grids use
/// x_i = i/n; Neumann grids include both end points, x_i = i/(n-1).
Tensor sample_grf(const GrfSpec& spec, std::size_t resolution, std::uint64_t seed);

/// Per-sample seed derived from a run seed (splitmix64 of seed and index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct BurgersSpec {
  double viscosity = 0.1;
  double t_end = 1.0;
  double dt = 2.5e-5;  // halving it moves the solution by < 1e-6 relative
};

/// Advances u_t + (u^2/2)_x = nu u_xx on the periodic unit interval. The heat
/// part is applied exactly in Fourier space (Strang halves), the convective
/// part by forward Euler on the 2/3-dealiased pseudo-spectral flux.
/// Throws std::runtime_error if the solution blows up.
Tensor burgers_solve(const Tensor& u0, const BurgersSpec& spec);

struct DarcySpec {
  GrfSpec grf = GrfSpec::darcy();
  double high = 12.0;  // coefficient where the field is >= 0
  double low = 3.0;
  double forcing = 1.0;
  double tol = 1e-10;  // relative residual of the multigrid solve
};

/// Solves -div(a grad u) = f, u = 0 on the boundary, on the (n x n) node grid of a.
Tensor darcy_solve(const Tensor& a, double forcing = 1.0, double tol = 1e-10);

/// Thresholded random coefficient and its solution at odd resolution n >= 17.
std::pair<Tensor, Tensor> darcy_generate(const DarcySpec& spec, std::size_t resolution, std::uint64_t seed);

/// Strided subsampling of every axis. Periodic grids need factor | n and keep
/// n/factor points; bounded grids need factor | (n-1) and keep both ends.
Tensor downsample(const Tensor& x, std::size_t factor, bool periodic);

/// Downsample the grid axes of a dataset (axis 0 is the sample axis).
Dataset downsample(const Dataset& ds, std::size_t factor, bool periodic);

/// Generates `count` Burgers pairs at `generation_resolution` and returns
/// one index-aligned dataset per entry of `resolutions` (each must divide
/// the generation resolution).
std::vector<Dataset> generate_burgers(const GrfSpec& grf, const BurgersSpec& spec, std::size_t count,
                                      std::uint64_t seed, std::size_t generation_resolution,
                                      const std::vector<std::size_t>& resolutions, std::size_t threads = 1);

/// Darcy analogue; resolutions must satisfy (gen-1) % (res-1) == 0.
std::vector<Dataset> generate_darcy(const DarcySpec& spec, std::size_t count, std::uint64_t seed,
                                    std::size_t generation_resolution, const std::vector<std::size_t>& resolutions,
                                    std::size_t threads = 1);

}  // namespace mgfno::data
