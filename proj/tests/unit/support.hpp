// Shared helpers for the unit tests: random data and oracles.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "mgfno/tape.hpp"
#include "mgfno/tensor.hpp"

namespace testing {

using mgfno::ComplexTensor;
using mgfno::Parameter;
using mgfno::Shape;
using mgfno::Tape;
using mgfno::Tensor;
using mgfno::Var;

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = d(rng);
  return t;
}

inline ComplexTensor random_complex(Shape shape, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ComplexTensor t(std::move(shape));
  for (auto& v : t.re()) v = d(rng);
  for (auto& v : t.im()) v = d(rng);
  return t;
}

// O(N^2) DFT of a single complex line, sign -1 (forward) or +1.
inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x, int sign = -1) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
      acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// Norm-wise relative error between two gradient vectors.
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

inline double relative_error(const mgfno::Tensor& a, const mgfno::Tensor& b) { return relative_error(a.storage(), b.storage()); }

inline std::vector<double> flatten(const mgfno::NodeData& d) {
  if (const auto* t = std::get_if<Tensor>(&d)) return {t->data().begin(), t->data().end()};
  const auto& c = std::get<ComplexTensor>(d);
  std::vector<double> out(c.re().begin(), c.re().end());
  out.insert(out.end(), c.im().begin(), c.im().end());
  return out;
}

inline double& scalar_ref(Parameter& p, std::size_t i) {
  if (auto* t = std::get_if<Tensor>(&p.value)) return (*t)[i];
  auto& c = std::get<ComplexTensor>(p.value);
  return i < c.size() ? c.re()[i] : c.im()[i - c.size()];
}

// Builds the scalar loss on a fresh tape.
using LossFn = std::function<Var(Tape&)>;

// Reverse-mode gradients and central differences with step h, per parameter.
// Complex entries are perturbed in their real and imaginary parts separately,
// which matches the g = dL/dRe + i dL/dIm convention.
struct GradientPair {
  std::vector<std::vector<double>> analytic, numeric;
};

inline GradientPair gradient_pair(const std::vector<Parameter*>& params, const LossFn& loss, double h = 1e-6) {
  GradientPair out;
  {
    Tape tape;
    Var l = loss(tape);
    tape.backward(l);
    for (auto* p : params) out.analytic.push_back(flatten(tape.gradient(*p)));
  }
  auto eval = [&] {
    Tape tape;
    return loss(tape).real()[0];
  };
  for (std::size_t k = 0; k < params.size(); ++k) {
    std::vector<double> numeric(out.analytic[k].size());
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      double& v = scalar_ref(*params[k], i);
      const double saved = v;
      v = saved + h;
      const double fp = eval();
      v = saved - h;
      const double fm = eval();
      v = saved;
      numeric[i] = (fp - fm) / (2.0 * h);
    }
    out.numeric.push_back(std::move(numeric));
  }
  return out;
}

// Max over parameters of the norm-wise relative gradient error.
inline double gradient_check(const std::vector<Parameter*>& params, const LossFn& loss, double h = 1e-6) {
  const auto g = gradient_pair(params, loss, h);
  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) worst = std::max(worst, relative_error(g.analytic[k], g.numeric[k]));
  return worst;
}

// Norm-wise relative error of the whole gradient vector. Parameters whose
// gradient is many orders below the rest (e.g. feeding units outside the
// support of phi) are dominated by difference round-off in the per-parameter
// measure but not here.
inline double gradient_check_total(const std::vector<Parameter*>& params, const LossFn& loss, double h = 1e-6) {
  const auto g = gradient_pair(params, loss, h);
  std::vector<double> a, n;
  for (std::size_t k = 0; k < params.size(); ++k) {
    a.insert(a.end(), g.analytic[k].begin(), g.analytic[k].end());
    n.insert(n.end(), g.numeric[k].begin(), g.numeric[k].end());
  }
  return relative_error(a, n);
}

// Dense Dirichlet operator built straight from the five-point formula, with
// harmonic face means, on an n x n grid (or n nodes in 1D).
inline Tensor dense_dirichlet_solve(const Tensor& a, const Tensor& f) {
  const std::size_t dim = f.rank();
  const std::size_t n = f.extent(0);
  const std::size_t m = n - 2;
  const std::size_t unknowns = dim == 1 ? m : m * m;
  const double h = 1.0 / static_cast<double>(n - 1);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(unknowns, unknowns);
  Eigen::VectorXd b(unknowns);
  auto node = [&](std::size_t i, std::size_t j) { return dim == 1 ? i : i * n + j; };
  auto idx = [&](std::size_t i, std::size_t j) { return dim == 1 ? i - 1 : (i - 1) * m + (j - 1); };
  auto harm = [&](std::size_t p, std::size_t q) { return 2.0 * a[p] * a[q] / (a[p] + a[q]); };
  for (std::size_t i = 1; i + 1 < n; ++i) {
    for (std::size_t j = (dim == 1 ? 0 : 1); j + 1 < (dim == 1 ? 2 : n); ++j) {
      const std::size_t p = node(i, j), r = idx(i, j);
      b[r] = f[p];
      std::vector<std::pair<std::size_t, std::size_t>> nb = {{i - 1, j}, {i + 1, j}};
      if (dim == 2) {
        nb.push_back({i, j - 1});
        nb.push_back({i, j + 1});
      }
      for (auto [ii, jj] : nb) {
        const double w = harm(p, node(ii, jj)) / (h * h);
        A(r, r) += w;
        const bool interior = ii >= 1 && ii + 1 < n && (dim == 1 || (jj >= 1 && jj + 1 < n));
        if (interior) A(r, idx(ii, jj)) -= w;
      }
    }
  }
  Eigen::VectorXd x = A.partialPivLu().solve(b);
  Tensor u(f.shape());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    for (std::size_t j = (dim == 1 ? 0 : 1); j + 1 < (dim == 1 ? 2 : n); ++j) u[node(i, j)] = x[idx(i, j)];
  }
  return u;
}

}  // namespace testing
