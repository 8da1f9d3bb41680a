/// @file mg.hpp
/// @brief Geometric multigrid for -div(a grad u) + c u = f on uniform 1D/2D
/// vertex-centered grids.
///
/// Fields are stored on all grid nodes. Dirichlet grids have n nodes per axis
/// including both boundary nodes (h = 1/(n-1)) and carry zero boundary values;
/// periodic grids have n distinct nodes (h = 1/n). A Dirichlet grid coarsens
/// while its interval count is even, a periodic grid while n is even.
#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mgfno/tensor.hpp"

namespace mgfno::mg {

enum class Boundary { dirichlet, periodic };

class StencilSystem {
 public:
  /// `coefficient` holds a(x) > 0 at the nodes (absent: a = 1). Face
  /// coefficients are harmonic means of the two adjacent nodal values.
  StencilSystem(Shape nodes, Boundary boundary, Tensor rhs, std::optional<Tensor> coefficient = std::nullopt,
                double shift = 0.0);

  static StencilSystem poisson(Shape nodes, Boundary boundary = Boundary::dirichlet);

  std::size_t dim() const { return nodes_.size(); }
  const Shape& nodes() const { return nodes_; }
  Boundary boundary() const { return boundary_; }
  double spacing(std::size_t axis) const;
  double shift() const { return shift_; }
  const std::optional<Tensor>& coefficient() const { return coefficient_; }
  const Tensor& rhs() const { return rhs_; }
  void set_rhs(Tensor f);

  /// True for nodes carrying an unknown (everything except Dirichlet boundary nodes).
  bool is_unknown(std::size_t flat) const;
  std::size_t unknown_count() const;

  /// A u on unknown nodes; zero on Dirichlet boundary nodes.
  Tensor apply(const Tensor& u) const;
  Tensor diagonal() const;
  /// f - A u (zero on Dirichlet boundary nodes).
  Tensor residual(const Tensor& u) const;
  double residual_norm(const Tensor& u) const;

  bool can_coarsen() const;
  Shape coarse_nodes() const;
  /// Re-discretization on the next coarser grid; coefficient by injection,
  /// right-hand side zero.
  StencilSystem coarsened() const;

  /// Matrix entries over unknowns in lexicographic node order, as
  /// (row, column, value) triples.
  struct Entry {
    std::size_t row, col;
    double value;
  };
  std::vector<Entry> assemble() const;
  /// Node index of every unknown in assembly order.
  std::vector<std::size_t> unknown_nodes() const;

 private:
  double face(std::size_t axis, std::size_t p, std::size_t q) const;

  Shape nodes_;
  Boundary boundary_;
  Tensor rhs_;
  std::optional<Tensor> coefficient_;
  double shift_;
  std::vector<std::size_t> strides_;
};

/// One weighted Jacobi sweep u + omega D^{-1} (f - A u).
Tensor jacobi_sweep(const StencilSystem& system, const Tensor& u, double omega = 1.0);

/// Measured |c_{k+1} / c_k| of the discrete sine mode sin(p pi x) under one
/// sweep of the 1D Dirichlet Poisson problem with n nodes.
double convergence_factor(std::size_t n, std::size_t p, double omega = 1.0);

/// Analytic local factor |1 - 2 omega sin^2(theta / 2)|.
double convergence_factor_symbol(double theta, double omega);

/// Full weighting (1D [1/4, 1/2, 1/4], tensor product in 2D). Dirichlet
/// boundary nodes are injected.
Tensor restrict(const Tensor& fine, Boundary boundary);
/// Linear (1D) / bilinear (2D) interpolation.
Tensor prolong(const Tensor& coarse, Boundary boundary);

struct MgConfig {
  std::size_t levels = 0;  // total grid levels J; 0 coarsens as far as possible
  std::size_t pre_smooth = 2;
  std::size_t post_smooth = 2;
  double omega = 0.0;  // 0 selects 2/3 in 1D and 4/5 in 2D
  std::size_t max_cycles = 100;

  double smoothing_weight(std::size_t dim) const;
};

class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MgResult {
  Tensor u;
  std::vector<double> residual_history;  // relative residual norms, entry 0 is the initial guess
  bool converged = false;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// Grid hierarchy with a factorized coarsest level.
class Multigrid {
 public:
  Multigrid(const StencilSystem& system, MgConfig cfg);
  ~Multigrid();
  Multigrid(Multigrid&&) noexcept;
  Multigrid& operator=(Multigrid&&) noexcept;

  std::size_t levels() const { return systems_.size(); }
  const StencilSystem& level(std::size_t l) const { return systems_.at(l); }

  Tensor v_cycle(const Tensor& u) const;
  /// V-cycles until ||f - A u|| / ||f|| < tol. Throws NonConvergence after max_cycles.
  MgResult solve(double tol, const Tensor* initial = nullptr) const;

 private:
  Tensor cycle(std::size_t l, const Tensor& u, const Tensor& f) const;

  MgConfig cfg_;
  std::vector<StencilSystem> systems_;
  struct Coarse;
  std::unique_ptr<Coarse> coarse_;
};

Tensor v_cycle(const StencilSystem& system, const Tensor& u0, const MgConfig& cfg);
MgResult mg_solve(const StencilSystem& system, double tol, const MgConfig& cfg = {});

/// Sparse direct solve of the whole system (used at the coarsest level and
/// for small problems).
Tensor direct_solve(const StencilSystem& system);

}  // namespace mgfno::mg
