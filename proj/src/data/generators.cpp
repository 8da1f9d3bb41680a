#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "mgfno/data.hpp"
#include "mgfno/fft.hpp"
#include "mgfno/mg.hpp"
#include "mgfno/parallel.hpp"

namespace mgfno::data {

namespace {

using fft::cplx;
constexpr double pi = std::numbers::pi;

Tensor sample_periodic(const GrfSpec& spec, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const Shape shape(spec.dim, n);
  const std::size_t total = shape_size(shape);
  const auto strides = row_major_strides(shape);
  ComplexTensor C(shape);
  std::vector<std::size_t> k(spec.dim);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t partner = 0;
    for (std::size_t d = 0; d < spec.dim; ++d) {
      const std::size_t i = (p / strides[d]) % n;
      k[d] = std::min(i, n - i);
      partner += ((n - i) % n) * strides[d];
    }
    if (partner < p) continue;
    const double s = spec.mode_std(k);
    if (partner == p) {
      C.re()[p] = s * normal(rng);
    } else {
      const double re = normal(rng), im = normal(rng);
      C.re()[p] = s * re / std::sqrt(2.0);
      C.im()[p] = -s * im / std::sqrt(2.0);
      C.re()[partner] = C.re()[p];
      C.im()[partner] = -C.im()[p];
    }
  }
  std::vector<std::size_t> axes(spec.dim);
  for (std::size_t d = 0; d < spec.dim; ++d) axes[d] = d;
  Tensor f = fft_inverse(C, axes);
  f *= static_cast<double>(total);
  return f;
}

Tensor sample_neumann(const GrfSpec& spec, std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd B(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) B(i, k) = (k == 0 ? 1.0 : std::sqrt(2.0)) * std::cos(pi * k * x);
  }
  if (spec.dim == 1) {
    Eigen::VectorXd c(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t kk[] = {k};
      c[k] = spec.mode_std(kk) * normal(rng);
    }
    Eigen::VectorXd f = B * c;
    return Tensor(Shape{n}, std::vector<double>(f.data(), f.data() + n));
  }
  Eigen::MatrixXd c(n, n);
  for (std::size_t k0 = 0; k0 < n; ++k0) {
    for (std::size_t k1 = 0; k1 < n; ++k1) {
      const std::size_t kk[] = {k0, k1};
      c(k0, k1) = spec.mode_std(kk) * normal(rng);
    }
  }
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f = B * c * B.transpose();
  return Tensor(Shape{n, n}, std::vector<double>(f.data(), f.data() + n * n));
}

std::size_t factor_for(std::size_t from, std::size_t to, bool periodic) {
  const std::size_t a = periodic ? from : from - 1, b = periodic ? to : to - 1;
  if (to < 2 || b == 0 || a % b != 0) {
    throw std::invalid_argument("resolution " + std::to_string(to) + " is not a strided subsampling of " +
                                std::to_string(from));
  }
  return a / b;
}

std::vector<Dataset> assemble(const std::vector<Tensor>& a, const std::vector<Tensor>& u, bool periodic,
                              const std::vector<std::size_t>& resolutions, nlohmann::json meta) {
  std::vector<Dataset> out;
  const std::size_t gen = a.front().extent(0);
  const Tensor A = stack(a), U = stack(u);
  for (std::size_t res : resolutions) {
    const std::size_t f = factor_for(gen, res, periodic);
    meta["resolution"] = res;
    Dataset ds = downsample(Dataset{A, U, meta}, f, periodic);
    out.push_back(std::move(ds));
  }
  return out;
}

}  // namespace

void GrfSpec::validate() const {
  if (dim != 1 && dim != 2) throw std::invalid_argument("GRF dimension must be 1 or 2");
  if (!(scale > 0.0)) throw std::invalid_argument("GRF scale must be positive");
  if (!(shift > 0.0)) throw std::invalid_argument("GRF shift c must be positive");
  if (!(exponent > static_cast<double>(dim) / 2.0)) {
    throw std::invalid_argument("GRF exponent must exceed dimension/2 for a trace-class covariance");
  }
}

double GrfSpec::mode_std(std::span<const std::size_t> k) const {
  const double base = boundary == GrfBoundary::periodic ? 2.0 * pi : pi;
  double lam = 0.0;
  for (auto kd : k) lam += (base * kd) * (base * kd);
  return std::sqrt(scale) * std::pow(lam + shift, -exponent / 2.0);
}

Tensor sample_grf(const GrfSpec& spec, std::size_t resolution, std::uint64_t seed) {
  spec.validate();
  if (resolution < 4) throw std::invalid_argument("GRF resolution must be at least 4");
  std::mt19937_64 rng(seed);
  return spec.boundary == GrfBoundary::periodic ? sample_periodic(spec, resolution, rng)
                                                : sample_neumann(spec, resolution, rng);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Tensor burgers_solve(const Tensor& u0, const BurgersSpec& spec) {
  if (u0.rank() != 1) throw std::invalid_argument("Burgers solver expects a 1D periodic grid");
  if (!(spec.viscosity > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (!(spec.dt > 0.0) || !(spec.t_end >= 0.0)) throw std::invalid_argument("invalid Burgers time stepping");
  const std::size_t n = u0.size();
  const auto steps = static_cast<std::size_t>(std::llround(spec.t_end / spec.dt));
  if (steps == 0) return u0;
  const double dt = spec.t_end / static_cast<double>(steps);
  const fft::Plan& plan = fft::plan(n);

  std::vector<double> wave(n), full(n), half(n);
  std::vector<bool> keep(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = i <= n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n);
    wave[i] = 2.0 * pi * k;
    // The Nyquist bin carries no derivative information.
    if (2 * i == n) wave[i] = 0.0;
    keep[i] = 3.0 * std::abs(k) <= static_cast<double>(n);
    full[i] = std::exp(-spec.viscosity * wave[i] * wave[i] * dt);
    half[i] = std::exp(-spec.viscosity * wave[i] * wave[i] * dt / 2.0);
  }
  const double bound = 1e6 * std::max(1.0, u0.max_abs());

  std::vector<cplx> U(n), w(n);
  for (std::size_t i = 0; i < n; ++i) U[i] = u0[i];
  plan.forward(U);
  for (std::size_t i = 0; i < n; ++i) U[i] *= half[i];
  for (std::size_t s = 0; s < steps; ++s) {
    w = U;
    plan.backward(w);
    double peak = 0.0;
    for (auto& v : w) {
      const double u = v.real() / static_cast<double>(n);
      peak = std::max(peak, std::abs(u));
      v = 0.5 * u * u;
    }
    if (!std::isfinite(peak) || peak > bound) {
      throw std::runtime_error("Burgers solution blew up at step " + std::to_string(s) +
                               " (CFL violation; reduce dt)");
    }
    plan.forward(w);
    for (std::size_t i = 0; i < n; ++i) {
      if (keep[i]) U[i] -= dt * cplx(0.0, wave[i]) * w[i];
      U[i] *= s + 1 < steps ? full[i] : half[i];
    }
  }
  plan.backward(U);
  Tensor out(Shape{n});
  for (std::size_t i = 0; i < n; ++i) out[i] = U[i].real() / static_cast<double>(n);
  return out;
}

Tensor darcy_solve(const Tensor& a, double forcing, double tol) {
  if (a.rank() != 2 || a.extent(0) != a.extent(1)) throw std::invalid_argument("Darcy coefficient must be square 2D");
  const std::size_t n = a.extent(0);
  Tensor f(a.shape());
  for (std::size_t i = 1; i + 1 < n; ++i)
    for (std::size_t j = 1; j + 1 < n; ++j) f.at({i, j}) = forcing;
  mg::StencilSystem sys(a.shape(), mg::Boundary::dirichlet, std::move(f), a);
  return mg::mg_solve(sys, tol).u;
}

std::pair<Tensor, Tensor> darcy_generate(const DarcySpec& spec, std::size_t resolution, std::uint64_t seed) {
  if (resolution < 17 || resolution % 2 == 0) {
    throw std::invalid_argument("Darcy resolution must be odd and at least 17, got " + std::to_string(resolution));
  }
  if (spec.grf.dim != 2) throw std::invalid_argument("Darcy needs a 2D random field");
  Tensor a = sample_grf(spec.grf, resolution, seed);
  for (auto& v : a.storage()) v = v >= 0.0 ? spec.high : spec.low;
  Tensor u = darcy_solve(a, spec.forcing, spec.tol);
  return {std::move(a), std::move(u)};
}

Tensor downsample(const Tensor& x, std::size_t factor, bool periodic) {
  if (factor == 0) throw std::invalid_argument("downsample factor must be positive");
  Shape out_shape = x.shape();
  for (auto& n : out_shape) {
    const std::size_t span = periodic ? n : n - 1;
    if (span % factor != 0) {
      throw std::invalid_argument("downsample factor " + std::to_string(factor) + " does not divide extent " +
                                  std::to_string(n) + (periodic ? "" : " - 1"));
    }
    n = periodic ? n / factor : (n - 1) / factor + 1;
  }
  Tensor out(out_shape);
  const auto in_strides = row_major_strides(x.shape());
  const auto out_strides = row_major_strides(out_shape);
  for (std::size_t p = 0; p < out.size(); ++p) {
    std::size_t q = 0;
    for (std::size_t d = 0; d < out_shape.size(); ++d) q += ((p / out_strides[d]) % out_shape[d]) * factor * in_strides[d];
    out[p] = x[q];
  }
  return out;
}

Dataset downsample(const Dataset& ds, std::size_t factor, bool periodic) {
  std::vector<Tensor> a, u;
  for (std::size_t i = 0; i < ds.count(); ++i) {
    a.push_back(downsample(ds.input(i), factor, periodic));
    u.push_back(downsample(ds.output(i), factor, periodic));
  }
  Dataset out{stack(a), stack(u), ds.metadata};
  out.metadata["resolution"] = out.grid().front();
  return out;
}

std::vector<Dataset> generate_burgers(const GrfSpec& grf, const BurgersSpec& spec, std::size_t count,
                                      std::uint64_t seed, std::size_t generation_resolution,
                                      const std::vector<std::size_t>& resolutions, std::size_t threads) {
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  if (grf.dim != 1 || grf.boundary != GrfBoundary::periodic) {
    throw std::invalid_argument("Burgers initial data must be a 1D periodic field");
  }
  for (auto r : resolutions) factor_for(generation_resolution, r, true);
  std::vector<Tensor> a(count), u(count);
  parallel_for(count, threads, [&](std::size_t i) {
    a[i] = sample_grf(grf, generation_resolution, derive_seed(seed, i));
    u[i] = burgers_solve(a[i], spec);
  });
  nlohmann::json meta = {{"pde", "burgers"},
                         {"seed", seed},
                         {"generation_resolution", generation_resolution},
                         {"viscosity", spec.viscosity},
                         {"t_end", spec.t_end},
                         {"dt", spec.dt},
                         {"grf", {{"scale", grf.scale}, {"shift", grf.shift}, {"exponent", grf.exponent}}}};
  return assemble(a, u, true, resolutions, std::move(meta));
}

std::vector<Dataset> generate_darcy(const DarcySpec& spec, std::size_t count, std::uint64_t seed,
                                    std::size_t generation_resolution, const std::vector<std::size_t>& resolutions,
                                    std::size_t threads) {
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  for (auto r : resolutions) factor_for(generation_resolution, r, false);
  std::vector<Tensor> a(count), u(count);
  parallel_for(count, threads, [&](std::size_t i) {
    auto [ai, ui] = darcy_generate(spec, generation_resolution, derive_seed(seed, i));
    a[i] = std::move(ai);
    u[i] = std::move(ui);
  });
  nlohmann::json meta = {{"pde", "darcy"},
                         {"seed", seed},
                         {"generation_resolution", generation_resolution},
                         {"coefficient", {{"high", spec.high}, {"low", spec.low}}},
                         {"forcing", spec.forcing},
                         {"grf", {{"scale", spec.grf.scale}, {"shift", spec.grf.shift}, {"exponent", spec.grf.exponent}}}};
  return assemble(a, u, false, resolutions, std::move(meta));
}

}  // namespace mgfno::data
