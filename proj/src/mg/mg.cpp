#include "mgfno/mg.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <functional>
#include <numbers>

namespace mgfno::mg {

namespace {

// Applies `kernel(in_line, out_line)` to every line along `axis`.
Tensor map_lines(const Tensor& x, std::size_t axis, std::size_t out_len,
                 const std::function<void(const std::vector<double>&, std::vector<double>&)>& kernel) {
  const Shape& s = x.shape();
  if (axis >= s.size()) throw std::out_of_range("axis out of range");
  Shape os = s;
  os[axis] = out_len;
  Tensor out(os);
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= s[d];
  for (std::size_t d = axis + 1; d < s.size(); ++d) inner *= s[d];
  const std::size_t n = s[axis];
  std::vector<double> in_line(n), out_line(out_len);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      for (std::size_t k = 0; k < n; ++k) in_line[k] = x[(o * n + k) * inner + i];
      kernel(in_line, out_line);
      for (std::size_t k = 0; k < out_len; ++k) out[(o * out_len + k) * inner + i] = out_line[k];
    }
  }
  return out;
}

Tensor smooth(const StencilSystem& sys, const Tensor& u, const Tensor& f, double omega) {
  const Tensor au = sys.apply(u);
  const Tensor diag = sys.diagonal();
  Tensor out = u;
  for (std::size_t p = 0; p < u.size(); ++p) {
    if (sys.is_unknown(p)) out[p] += omega * (f[p] - au[p]) / diag[p];
  }
  return out;
}

Tensor residual_with(const StencilSystem& sys, const Tensor& u, const Tensor& f) {
  Tensor r = sys.apply(u);
  for (std::size_t p = 0; p < r.size(); ++p) r[p] = sys.is_unknown(p) ? f[p] - r[p] : 0.0;
  return r;
}

class Factorized {
 public:
  explicit Factorized(const StencilSystem& sys) : nodes(sys.unknown_nodes()), shape(sys.nodes()) {
    if (sys.boundary() == Boundary::periodic && sys.shift() == 0.0) {
      throw SingularSystem("singular coarsest system: periodic operator without reaction term has constant null space");
    }
    const auto entries = sys.assemble();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(entries.size());
    for (const auto& e : entries) t.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
    const auto n = static_cast<Eigen::Index>(nodes.size());
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success) throw SingularSystem("singular coarsest system: factorization failed");
    const auto d = ldlt.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if (!(d[i] > 0.0)) throw SingularSystem("singular coarsest system: non-positive pivot");
    }
  }

  Tensor solve(const Tensor& f) const {
    Eigen::VectorXd b(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t k = 0; k < nodes.size(); ++k) b[static_cast<Eigen::Index>(k)] = f[nodes[k]];
    Eigen::VectorXd x = ldlt.solve(b);
    Tensor out(shape);
    for (std::size_t k = 0; k < nodes.size(); ++k) out[nodes[k]] = x[static_cast<Eigen::Index>(k)];
    return out;
  }
 private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  std::vector<std::size_t> nodes;
  Shape shape;
};

}  // namespace

StencilSystem::StencilSystem(Shape nodes, Boundary boundary, Tensor rhs, std::optional<Tensor> coefficient,
                             double shift)
    : nodes_(std::move(nodes)), boundary_(boundary), rhs_(std::move(rhs)), coefficient_(std::move(coefficient)),
      shift_(shift) {
  if (nodes_.empty() || nodes_.size() > 2) throw std::invalid_argument("stencil systems are 1D or 2D");
  for (auto n : nodes_) {
    if (n < 3) throw std::invalid_argument("grid extents must be at least 3");
  }
  require_same_shape(rhs_.shape(), nodes_, "stencil right-hand side");
  if (coefficient_) {
    require_same_shape(coefficient_->shape(), nodes_, "stencil coefficient");
    for (double a : coefficient_->data()) {
      if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("coefficient must be positive and finite");
    }
  }
  if (shift_ < 0.0) throw std::invalid_argument("reaction shift must be nonnegative");
  strides_ = row_major_strides(nodes_);
}

StencilSystem StencilSystem::poisson(Shape nodes, Boundary boundary) {
  Tensor f(nodes);
  return StencilSystem(std::move(nodes), boundary, std::move(f));
}

double StencilSystem::spacing(std::size_t axis) const {
  const double n = static_cast<double>(nodes_.at(axis));
  return boundary_ == Boundary::dirichlet ? 1.0 / (n - 1.0) : 1.0 / n;
}

void StencilSystem::set_rhs(Tensor f) {
  require_same_shape(f.shape(), nodes_, "stencil right-hand side");
  rhs_ = std::move(f);
}

bool StencilSystem::is_unknown(std::size_t flat) const {
  if (boundary_ == Boundary::periodic) return true;
  for (std::size_t d = 0; d < nodes_.size(); ++d) {
    const std::size_t i = (flat / strides_[d]) % nodes_[d];
    if (i == 0 || i + 1 == nodes_[d]) return false;
  }
  return true;
}

std::size_t StencilSystem::unknown_count() const {
  std::size_t c = 1;
  for (auto n : nodes_) c *= boundary_ == Boundary::dirichlet ? n - 2 : n;
  return c;
}

double StencilSystem::face(std::size_t, std::size_t p, std::size_t q) const {
  if (!coefficient_) return 1.0;
  const double a = (*coefficient_)[p], b = (*coefficient_)[q];
  return 2.0 * a * b / (a + b);
}

Tensor StencilSystem::apply(const Tensor& u) const {
  require_same_shape(u.shape(), nodes_, "stencil apply");
  Tensor out(nodes_);
  const std::size_t total = u.size();
  for (std::size_t p = 0; p < total; ++p) {
    if (!is_unknown(p)) continue;
    double v = shift_ * u[p];
    for (std::size_t d = 0; d < nodes_.size(); ++d) {
      const std::size_t n = nodes_[d];
      const std::size_t i = (p / strides_[d]) % n;
      const std::size_t m = p - i * strides_[d] + ((i + n - 1) % n) * strides_[d];
      const std::size_t q = p - i * strides_[d] + ((i + 1) % n) * strides_[d];
      const double h = spacing(d);
      v += (face(d, p, m) * (u[p] - u[m]) + face(d, p, q) * (u[p] - u[q])) / (h * h);
    }
    out[p] = v;
  }
  return out;
}

Tensor StencilSystem::diagonal() const {
  Tensor out(nodes_);
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (!is_unknown(p)) continue;
    double v = shift_;
    for (std::size_t d = 0; d < nodes_.size(); ++d) {
      const std::size_t n = nodes_[d];
      const std::size_t i = (p / strides_[d]) % n;
      const std::size_t m = p - i * strides_[d] + ((i + n - 1) % n) * strides_[d];
      const std::size_t q = p - i * strides_[d] + ((i + 1) % n) * strides_[d];
      const double h = spacing(d);
      v += (face(d, p, m) + face(d, p, q)) / (h * h);
    }
    out[p] = v;
  }
  return out;
}

Tensor StencilSystem::residual(const Tensor& u) const { return residual_with(*this, u, rhs_); }

double StencilSystem::residual_norm(const Tensor& u) const { return residual(u).norm(); }

bool StencilSystem::can_coarsen() const {
  for (auto n : nodes_) {
    if (boundary_ == Boundary::dirichlet) {
      if ((n - 1) % 2 != 0 || (n - 1) / 2 + 1 < 3) return false;
    } else if (n % 2 != 0 || n / 2 < 3) {
      return false;
    }
  }
  return true;
}

Shape StencilSystem::coarse_nodes() const {
  if (!can_coarsen()) throw std::invalid_argument("grid " + shape_string(nodes_) + " cannot be coarsened");
  Shape c = nodes_;
  for (auto& n : c) n = boundary_ == Boundary::dirichlet ? (n - 1) / 2 + 1 : n / 2;
  return c;
}

StencilSystem StencilSystem::coarsened() const {
  const Shape c = coarse_nodes();
  std::optional<Tensor> a;
  if (coefficient_) {
    Tensor ca(c);
    const auto cs = row_major_strides(c);
    for (std::size_t p = 0; p < ca.size(); ++p) {
      std::size_t fine = 0;
      for (std::size_t d = 0; d < c.size(); ++d) fine += 2 * ((p / cs[d]) % c[d]) * strides_[d];
      ca[p] = (*coefficient_)[fine];
    }
    a = std::move(ca);
  }
  return StencilSystem(c, boundary_, Tensor(c), std::move(a), shift_);
}

std::vector<std::size_t> StencilSystem::unknown_nodes() const {
  std::vector<std::size_t> out;
  out.reserve(unknown_count());
  for (std::size_t p = 0; p < shape_size(nodes_); ++p) {
    if (is_unknown(p)) out.push_back(p);
  }
  return out;
}

std::vector<StencilSystem::Entry> StencilSystem::assemble() const {
  const auto nodes = unknown_nodes();
  std::vector<std::size_t> index(shape_size(nodes_), static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < nodes.size(); ++k) index[nodes[k]] = k;
  std::vector<Entry> out;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::size_t p = nodes[k];
    double diag = shift_;
    for (std::size_t d = 0; d < nodes_.size(); ++d) {
      const std::size_t n = nodes_[d];
      const std::size_t i = (p / strides_[d]) % n;
      const double h2 = spacing(d) * spacing(d);
      for (std::size_t j : {(i + n - 1) % n, (i + 1) % n}) {
        const std::size_t q = p - i * strides_[d] + j * strides_[d];
        const double w = face(d, p, q) / h2;
        diag += w;
        if (index[q] != static_cast<std::size_t>(-1)) out.push_back({k, index[q], -w});
      }
    }
    out.push_back({k, k, diag});
  }
  return out;
}

Tensor jacobi_sweep(const StencilSystem& system, const Tensor& u, double omega) {
  return smooth(system, u, system.rhs(), omega);
}

double convergence_factor(std::size_t n, std::size_t p, double omega) {
  if (p < 1 || p + 1 >= n) throw std::invalid_argument("frequency must satisfy 1 <= p <= N-1");
  const StencilSystem sys = StencilSystem::poisson(Shape{n});
  Tensor u(Shape{n});
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::sin(static_cast<double>(p) * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  const Tensor next = jacobi_sweep(sys, u, omega);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += next[i] * u[i];
    den += u[i] * u[i];
  }
  return std::abs(num / den);
}

double convergence_factor_symbol(double theta, double omega) {
  const double s = std::sin(theta / 2.0);
  return std::abs(1.0 - 2.0 * omega * s * s);
}

Tensor restrict(const Tensor& fine, Boundary boundary) {
  Tensor out = fine;
  for (std::size_t axis = 0; axis < fine.rank(); ++axis) {
    const std::size_t n = out.extent(axis);
    if (boundary == Boundary::dirichlet) {
      if (n < 3 || (n - 1) % 2 != 0) throw std::invalid_argument("restrict: extent " + std::to_string(n) + " is not 2m+1");
      const std::size_t m = (n - 1) / 2 + 1;
      out = map_lines(out, axis, m, [m](const std::vector<double>& in, std::vector<double>& o) {
        o[0] = in[0];
        o[m - 1] = in[2 * (m - 1)];
        for (std::size_t I = 1; I + 1 < m; ++I) o[I] = 0.25 * in[2 * I - 1] + 0.5 * in[2 * I] + 0.25 * in[2 * I + 1];
      });
    } else {
      if (n < 2 || n % 2 != 0) throw std::invalid_argument("restrict: periodic extent " + std::to_string(n) + " is odd");
      const std::size_t m = n / 2;
      out = map_lines(out, axis, m, [m, n](const std::vector<double>& in, std::vector<double>& o) {
        for (std::size_t I = 0; I < m; ++I) {
          o[I] = 0.25 * in[(2 * I + n - 1) % n] + 0.5 * in[2 * I] + 0.25 * in[(2 * I + 1) % n];
        }
      });
    }
  }
  return out;
}

Tensor prolong(const Tensor& coarse, Boundary boundary) {
  Tensor out = coarse;
  for (std::size_t axis = 0; axis < coarse.rank(); ++axis) {
    const std::size_t m = out.extent(axis);
    if (boundary == Boundary::dirichlet) {
      if (m < 2) throw std::invalid_argument("prolong: extent too small");
      const std::size_t n = 2 * (m - 1) + 1;
      out = map_lines(out, axis, n, [m](const std::vector<double>& in, std::vector<double>& o) {
        for (std::size_t I = 0; I < m; ++I) o[2 * I] = in[I];
        for (std::size_t I = 0; I + 1 < m; ++I) o[2 * I + 1] = 0.5 * (in[I] + in[I + 1]);
      });
    } else {
      const std::size_t n = 2 * m;
      out = map_lines(out, axis, n, [m](const std::vector<double>& in, std::vector<double>& o) {
        for (std::size_t I = 0; I < m; ++I) {
          o[2 * I] = in[I];
          o[2 * I + 1] = 0.5 * (in[I] + in[(I + 1) % m]);
        }
      });
    }
  }
  return out;
}

double MgConfig::smoothing_weight(std::size_t dim) const {
  if (omega > 0.0) return omega;
  return dim == 1 ? 2.0 / 3.0 : 0.8;
}

struct Multigrid::Coarse : Factorized {
  using Factorized::Factorized;
};

Multigrid::Multigrid(const StencilSystem& system, MgConfig cfg) : cfg_(cfg) {
  if (cfg_.levels == 1) throw std::invalid_argument("multigrid needs at least two levels (J >= 2)");
  if (cfg_.pre_smooth + cfg_.post_smooth == 0) throw std::invalid_argument("multigrid needs at least one smoothing step");
  systems_.push_back(system);
  while ((cfg_.levels == 0 || systems_.size() < cfg_.levels) && systems_.back().can_coarsen()) {
    systems_.push_back(systems_.back().coarsened());
  }
  if (cfg_.levels != 0 && systems_.size() < cfg_.levels) {
    throw std::invalid_argument("grid " + shape_string(system.nodes()) + " supports only " +
                                std::to_string(systems_.size()) + " levels, " + std::to_string(cfg_.levels) +
                                " requested");
  }
  coarse_ = std::make_unique<Coarse>(systems_.back());
}

Multigrid::~Multigrid() = default;
Multigrid::Multigrid(Multigrid&&) noexcept = default;
Multigrid& Multigrid::operator=(Multigrid&&) noexcept = default;

Tensor Multigrid::cycle(std::size_t l, const Tensor& u0, const Tensor& f) const {
  const StencilSystem& sys = systems_[l];
  if (l + 1 == systems_.size()) return coarse_->solve(f);
  const double omega = cfg_.smoothing_weight(sys.dim());
  Tensor u = u0;
  for (std::size_t k = 0; k < cfg_.pre_smooth; ++k) u = smooth(sys, u, f, omega);
  const Tensor rc = restrict(residual_with(sys, u, f), sys.boundary());
  const Tensor ec = cycle(l + 1, Tensor(rc.shape()), rc);
  u += prolong(ec, sys.boundary());
  for (std::size_t k = 0; k < cfg_.post_smooth; ++k) u = smooth(sys, u, f, omega);
  return u;
}

Tensor Multigrid::v_cycle(const Tensor& u) const {
  require_same_shape(u.shape(), systems_.front().nodes(), "v_cycle initial guess");
  return cycle(0, u, systems_.front().rhs());
}

MgResult Multigrid::solve(double tol, const Tensor* initial) const {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const StencilSystem& sys = systems_.front();
  MgResult res{initial ? *initial : Tensor(sys.nodes()), {}, false};
  double fnorm = 0.0;
  for (std::size_t p = 0; p < sys.rhs().size(); ++p) {
    if (sys.is_unknown(p)) fnorm += sys.rhs()[p] * sys.rhs()[p];
  }
  fnorm = std::sqrt(fnorm);
  if (fnorm == 0.0) {
    res.u = Tensor(sys.nodes());
    res.residual_history.push_back(0.0);
    res.converged = true;
    return res;
  }
  res.residual_history.push_back(sys.residual_norm(res.u) / fnorm);
  for (std::size_t c = 0; c < cfg_.max_cycles; ++c) {
    if (res.residual_history.back() < tol) break;
    res.u = v_cycle(res.u);
    const double rel = sys.residual_norm(res.u) / fnorm;
    if (!std::isfinite(rel)) throw NonConvergence("multigrid diverged (non-finite residual)", res.residual_history);
    res.residual_history.push_back(rel);
  }
  res.converged = res.residual_history.back() < tol;
  if (!res.converged) {
    throw NonConvergence("multigrid did not reach relative residual " + std::to_string(tol) + " within " +
                             std::to_string(cfg_.max_cycles) + " cycles",
                         res.residual_history);
  }
  return res;
}

Tensor v_cycle(const StencilSystem& system, const Tensor& u0, const MgConfig& cfg) {
  return Multigrid(system, cfg).v_cycle(u0);
}

MgResult mg_solve(const StencilSystem& system, double tol, const MgConfig& cfg) {
  return Multigrid(system, cfg).solve(tol);
}

Tensor direct_solve(const StencilSystem& system) {
  return Factorized(system).solve(system.rhs());
}

}  // namespace mgfno::mg
