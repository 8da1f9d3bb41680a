#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mgfno/data.hpp"
#include "mgfno/mg.hpp"
#include "support.hpp"

using namespace mgfno;
using namespace mgfno::data;
using testing::dense_dirichlet_solve;
using testing::relative_error;

namespace {

constexpr double pi = std::numbers::pi;

// Coefficient of a periodic sample on sqrt(2) cos(2 pi k x) (k > 0) or 1.
double periodic_cos_coefficient(const Tensor& f, std::size_t k) {
  const std::size_t n = f.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += f[i] * std::cos(2 * pi * k * i / static_cast<double>(n));
  return (k == 0 ? 1.0 : std::sqrt(2.0)) * s / n;
}

// Trapezoid-weighted cosine coefficient on a vertex grid (discrete orthogonal for k < n-1).
double neumann_coefficient(const Tensor& f, std::size_t k) {
  const std::size_t n = f.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    s += w * f[i] * std::cos(pi * k * i / static_cast<double>(n - 1));
  }
  return (k == 0 ? 1.0 : std::sqrt(2.0)) * s / static_cast<double>(n - 1);
}

double sample_std(const std::vector<double>& v) {
  double m = 0.0, s = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

// Discrete sine-series solution of the constant-coefficient Dirichlet problem
// with unit forcing on an n x n node grid.
Tensor sine_series_poisson(std::size_t n) {
  const std::size_t N = n - 1;
  const double h = 1.0 / N;
  std::vector<double> lam(N), fhat(N);
  for (std::size_t p = 1; p < N; ++p) {
    lam[p] = 4.0 / (h * h) * std::pow(std::sin(p * pi * h / 2.0), 2);
    double s = 0.0;
    for (std::size_t i = 1; i < N; ++i) s += std::sin(p * pi * i * h);
    fhat[p] = 2.0 / N * s;
  }
  Tensor u(Shape{n, n});
  for (std::size_t i = 1; i < N; ++i) {
    for (std::size_t j = 1; j < N; ++j) {
      double v = 0.0;
      for (std::size_t p = 1; p < N; ++p)
        for (std::size_t q = 1; q < N; ++q)
          v += fhat[p] * fhat[q] / (lam[p] + lam[q]) * std::sin(p * pi * i * h) * std::sin(q * pi * j * h);
      u.at({i, j}) = v;
    }
  }
  return u;
}

}  // namespace

TEST_CASE("random field mode statistics") {
  SUBCASE("periodic 1D follows the covariance law") {
    const GrfSpec spec = GrfSpec::burgers();
    const std::size_t k0[] = {0}, k1[] = {1};
    CHECK(spec.mode_std(k0) == doctest::Approx(1.0));
    CHECK(spec.mode_std(k1) / spec.mode_std(k0) == doctest::Approx(25.0 / (4 * pi * pi + 25.0)));
    std::vector<std::vector<double>> coeff(5);
    for (std::uint64_t s = 0; s < 10000; ++s) {
      const Tensor f = sample_grf(spec, 32, s);
      for (std::size_t k = 0; k < 5; ++k) coeff[k].push_back(periodic_cos_coefficient(f, k));
    }
    for (std::size_t k = 0; k < 5; ++k) {
      const std::size_t kk[] = {k};
      CHECK(sample_std(coeff[k]) == doctest::Approx(spec.mode_std(kk)).epsilon(0.05));
    }
  }
  SUBCASE("Neumann 1D uses the cosine basis") {
    GrfSpec spec{1, 4.0, 9.0, 2.0, GrfBoundary::neumann};
    std::vector<std::vector<double>> coeff(4);
    for (std::uint64_t s = 0; s < 10000; ++s) {
      const Tensor f = sample_grf(spec, 33, s);
      for (std::size_t k = 0; k < 4; ++k) coeff[k].push_back(neumann_coefficient(f, k));
    }
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t kk[] = {k};
      CHECK(sample_std(coeff[k]) == doctest::Approx(spec.mode_std(kk)).epsilon(0.05));
    }
  }
  SUBCASE("periodic 2D") {
    GrfSpec spec{2, 1.0, 4.0, 2.0, GrfBoundary::periodic};
    std::vector<double> c00, c10, c11;
    for (std::uint64_t s = 0; s < 4000; ++s) {
      const Tensor f = sample_grf(spec, 8, s);
      double a = 0.0, b = 0.0, c = 0.0;
      for (std::size_t i = 0; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
          const double v = f.at({i, j});
          a += v;
          b += v * std::sqrt(2.0) * std::cos(2 * pi * i / 8.0);
          c += v * 2.0 * std::cos(2 * pi * i / 8.0) * std::cos(2 * pi * j / 8.0);
        }
      }
      c00.push_back(a / 64);
      c10.push_back(b / 64);
      c11.push_back(c / 64);
    }
    const std::size_t k00[] = {0, 0}, k10[] = {1, 0}, k11[] = {1, 1};
    CHECK(sample_std(c00) == doctest::Approx(spec.mode_std(k00)).epsilon(0.05));
    CHECK(sample_std(c10) == doctest::Approx(spec.mode_std(k10)).epsilon(0.05));
    CHECK(sample_std(c11) == doctest::Approx(spec.mode_std(k11)).epsilon(0.05));
  }
}

TEST_CASE("random field determinism and validation") {
  const Tensor a = sample_grf(GrfSpec::darcy(), 17, 5);
  CHECK(a.storage() == sample_grf(GrfSpec::darcy(), 17, 5).storage());
  CHECK(a.storage() != sample_grf(GrfSpec::darcy(), 17, 6).storage());
  CHECK(a.shape() == Shape{17, 17});
  CHECK_THROWS(sample_grf(GrfSpec::burgers(), 3, 0));
  GrfSpec bad = GrfSpec::burgers();
  bad.shift = 0.0;
  CHECK_THROWS(sample_grf(bad, 16, 0));
  bad = GrfSpec::darcy();
  bad.exponent = 1.0;
  CHECK_THROWS(sample_grf(bad, 17, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("Burgers solver") {
  BurgersSpec spec;
  SUBCASE("zero stays zero") {
    CHECK(burgers_solve(Tensor(Shape{64}), spec).max_abs() == 0.0);
  }
  SUBCASE("small amplitude decays like the heat equation") {
    const double eps = 1e-4;
    Tensor u0(Shape{128});
    for (std::size_t i = 0; i < 128; ++i) u0[i] = eps * std::sin(2 * pi * i / 128.0);
    const Tensor u = burgers_solve(u0, spec);
    Tensor expected = u0 * std::exp(-spec.viscosity * 4 * pi * pi);
    CHECK(relative_error(u, expected) < 0.01);
  }
  SUBCASE("mean is conserved") {
    const Tensor u0 = sample_grf(GrfSpec::burgers(), 128, 3);
    const Tensor u = burgers_solve(u0, spec);
    CHECK(std::abs(u.sum() / 128 - u0.sum() / 128) < 1e-10);
  }
  SUBCASE("halving the time step changes little") {
    const Tensor u0 = sample_grf(GrfSpec::burgers(), 256, 4);
    BurgersSpec fine = spec;
    fine.dt /= 2;
    CHECK(relative_error(burgers_solve(u0, spec), burgers_solve(u0, fine)) < 1e-6);
  }
  SUBCASE("blow-up is detected") {
    Tensor u0(Shape{64});
    for (std::size_t i = 0; i < 64; ++i) u0[i] = 1e3 * std::sin(2 * pi * i / 64.0);
    BurgersSpec coarse;
    coarse.dt = 0.05;
    CHECK_THROWS_AS(burgers_solve(u0, coarse), std::runtime_error);
  }
  CHECK_THROWS(burgers_solve(Tensor(Shape{4, 4}), spec));
}

TEST_CASE("Darcy generator") {
  SUBCASE("unit coefficient matches the discrete sine series") {
    const Tensor u = darcy_solve(Tensor(Shape{85, 85}, 1.0));
    const Tensor ref = sine_series_poisson(85);
    CHECK(relative_error(u, ref) < 1e-8);
    CHECK(u.at({42, 42}) == doctest::Approx(0.0737).epsilon(2e-3));
  }
  SUBCASE("variable coefficient matches a dense solve") {
    auto [a, u] = darcy_generate(DarcySpec{}, 17, 8);
    Tensor f(Shape{17, 17});
    for (std::size_t i = 1; i < 16; ++i)
      for (std::size_t j = 1; j < 16; ++j) f.at({i, j}) = 1.0;
    CHECK(relative_error(u, dense_dirichlet_solve(a, f)) < 1e-8);
  }
  SUBCASE("pair properties") {
    DarcySpec spec;
    auto [a, u] = darcy_generate(spec, 33, 9);
    std::size_t high = 0;
    for (double v : a.data()) {
      CHECK((v == 12.0 || v == 3.0));
      high += v == 12.0;
    }
    CHECK(high > 0);
    CHECK(high < a.size());
    Tensor f(a.shape());
    for (std::size_t i = 1; i < 32; ++i)
      for (std::size_t j = 1; j < 32; ++j) f.at({i, j}) = 1.0;
    mg::StencilSystem sys(a.shape(), mg::Boundary::dirichlet, f, a);
    CHECK(sys.residual_norm(u) / f.norm() < 1e-8);
    const Tensor u2 = darcy_solve(a * 2.0);
    CHECK(relative_error(u2, u * 0.5) < 1e-9);
    auto [a2, u3] = darcy_generate(spec, 33, 9);
    CHECK(a2.storage() == a.storage());
    CHECK(u3.storage() == u.storage());
  }
  CHECK_THROWS(darcy_generate(DarcySpec{}, 16, 0));
  CHECK_THROWS(darcy_generate(DarcySpec{}, 15, 0));
}

TEST_CASE("downsampling") {
  Tensor x(Shape{8192});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  CHECK(downsample(x, 1, true).storage() == x.storage());
  const Tensor d = downsample(x, 8, true);
  CHECK(d.size() == 1024);
  CHECK(d[3] == 24.0);
  CHECK(downsample(downsample(x, 2, true), 4, true).storage() == d.storage());
  Tensor b(Shape{421, 421});
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = static_cast<double>(i);
  const Tensor b85 = downsample(b, 5, false);
  CHECK(b85.shape() == Shape{85, 85});
  CHECK(b85.at({84, 84}) == b.at({420, 420}));
  CHECK(b85.at({1, 2}) == b.at({5, 10}));
  CHECK(downsample(b, 2, false).shape() == Shape{211, 211});
  CHECK(downsample(b, 3, false).shape() == Shape{141, 141});
  CHECK_THROWS(downsample(x, 3, true));
  CHECK_THROWS(downsample(b, 4, true));
  CHECK_THROWS(downsample(x, 0, true));
}

TEST_CASE("dataset generation is aligned and thread independent") {
  BurgersSpec spec;
  spec.dt = 1e-3;
  const auto one = generate_burgers(GrfSpec::burgers(), spec, 4, 11, 128, {32, 64}, 1);
  const auto two = generate_burgers(GrfSpec::burgers(), spec, 4, 11, 128, {32, 64}, 2);
  REQUIRE(one.size() == 2);
  CHECK(one[0].grid() == Shape{32});
  CHECK(one[1].metadata["resolution"] == 64);
  for (std::size_t k = 0; k < 2; ++k) CHECK(dataset_bytes(one[k]) == dataset_bytes(two[k]));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(downsample(one[1].input(i), 2, true).storage() == one[0].input(i).storage());
    CHECK(downsample(one[1].output(i), 2, true).storage() == one[0].output(i).storage());
  }
  CHECK_THROWS(generate_burgers(GrfSpec::burgers(), spec, 2, 1, 128, {48}, 1));
  const auto darcy = generate_darcy(DarcySpec{}, 2, 3, 33, {17, 33}, 1);
  CHECK(darcy[0].grid() == Shape{17, 17});
  CHECK(darcy[1].metadata["pde"] == "darcy");
  CHECK_THROWS(generate_darcy(DarcySpec{}, 2, 3, 33, {15}, 1));
}
