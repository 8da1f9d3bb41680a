#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mgfno/fft.hpp"
#include "mgfno/tape.hpp"
#include "support.hpp"

using namespace mgfno;
using testing::gradient_check;
using testing::random_complex;
using testing::random_tensor;

namespace {

std::vector<std::complex<double>> line(const ComplexTensor& X) {
  std::vector<std::complex<double>> out(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) out[i] = {X.re()[i], X.im()[i]};
  return out;
}

const std::size_t ax0[] = {0};

}  // namespace

TEST_CASE("tensor shape validation") {
  CHECK_THROWS_AS(Tensor(Shape{}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor(Shape{2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor(Shape{2}, std::vector<double>{1, 2, 3}), std::invalid_argument);
  Tensor t(Shape{2, 3}, 1.5);
  CHECK(t.size() == 6);
  CHECK(t.at({1, 2}) == 1.5);
  CHECK_THROWS_AS(t.at({2, 0}), std::out_of_range);
  CHECK(t.sum() == doctest::Approx(9.0));
  CHECK_THROWS(t.reshaped(Shape{4}));
  CHECK(t.reshaped(Shape{3, 2}).shape() == Shape{3, 2});
}

TEST_CASE("fft of a delta is constant and the inverse returns the delta") {
  Tensor x(Shape{4}, std::vector<double>{1, 0, 0, 0});
  ComplexTensor X = fft_forward(x, ax0);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(X.re()[k] == doctest::Approx(1.0));
    CHECK(std::abs(X.im()[k]) < 1e-15);
  }
  ComplexTensor ones(Shape{4}, {1, 1, 1, 1}, {0, 0, 0, 0});
  Tensor back = fft_inverse(ones, ax0);
  CHECK(back[0] == doctest::Approx(1.0));
  for (std::size_t k = 1; k < 4; ++k) CHECK(std::abs(back[k]) < 1e-15);
}

TEST_CASE("fft of a constant concentrates in mode zero") {
  for (std::size_t n : {5u, 8u, 12u, 85u}) {
    Tensor x(Shape{n}, 2.5);
    ComplexTensor X = fft_forward(x, ax0);
    CHECK(X.re()[0] == doctest::Approx(2.5 * n));
    for (std::size_t k = 1; k < n; ++k) CHECK(std::hypot(X.re()[k], X.im()[k]) < 1e-10);
  }
}

TEST_CASE("pure sinusoid spectrum matches the naive DFT") {
  const std::size_t n = 64;
  Tensor x(Shape{n});
  std::vector<std::complex<double>> xc(n);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = std::sin(2.0 * std::numbers::pi * 3.0 * k / n);
    xc[k] = x[k];
  }
  ComplexTensor X = fft_forward(x, ax0);
  auto oracle = testing::naive_dft(xc);
  for (std::size_t k = 0; k < n; ++k) {
    const double mag = std::hypot(X.re()[k], X.im()[k]);
    if (k == 3 || k == 61) {
      CHECK(mag == doctest::Approx(32.0).epsilon(1e-12));
    } else {
      CHECK(mag < 1e-10);
    }
    CHECK(std::abs(std::complex<double>(X.re()[k], X.im()[k]) - oracle[k]) < 1e-10);
  }
}

TEST_CASE("radix-2 and Bluestein agree with the naive DFT") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 3u, 7u, 16u, 85u, 100u, 141u, 211u, 256u}) {
    ComplexTensor x = random_complex(Shape{n}, rng);
    auto oracle = testing::naive_dft(line(x));
    auto got = line(fft_forward(x, ax0));
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      err = std::max(err, std::abs(got[k] - oracle[k]));
      scale = std::max(scale, std::abs(oracle[k]));
    }
    CHECK(err <= 1e-11 * std::max(1.0, scale));
    auto inv_oracle = testing::naive_dft(line(x), +1);
    auto inv = line(fft_backward_unscaled(x, ax0));
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(inv[k] - inv_oracle[k]) <= 1e-10 * std::max(1.0, scale));
  }
}

TEST_CASE("fft axis out of range is rejected") {
  Tensor x(Shape{4, 4});
  const std::size_t bad[] = {2};
  CHECK_THROWS_AS(fft_forward(x, bad), std::out_of_range);
}

TEST_CASE("round trip and conjugate-symmetric spectra") {
  std::mt19937_64 rng(3);
  Tensor x = random_tensor(Shape{128}, rng);
  Tensor back = fft_inverse(fft_forward(x, ax0), ax0);
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(back[i] - x[i]));
  CHECK(err < 1e-12);

  ComplexTensor X(Shape{8});
  X.re()[0] = 1.0;
  X.re()[2] = 0.5;
  X.im()[2] = 0.25;
  X.re()[6] = 0.5;
  X.im()[6] = -0.25;
  ComplexTensor full = fft_inverse_complex(X, ax0);
  double residue = 0.0;
  for (double v : full.im()) residue = std::max(residue, std::abs(v));
  CHECK(residue < 1e-12);

  ComplexTensor asym(Shape{8});
  asym.im()[2] = 1.0;
  CHECK_THROWS_AS(fft_inverse(asym, ax0), std::domain_error);
}

TEST_CASE("Parseval holds for random lengths") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> len(4, 1024);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = len(rng);
    Tensor x = random_tensor(Shape{n}, rng);
    ComplexTensor X = fft_forward(x, ax0);
    const double lhs = x.squared_norm();
    const double rhs = X.squared_norm() / static_cast<double>(n);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * lhs);
  }
}

TEST_CASE("fft is linear") {
  std::mt19937_64 rng(5);
  for (std::size_t n : {64u, 85u}) {
    Tensor x = random_tensor(Shape{n}, rng);
    Tensor y = random_tensor(Shape{n}, rng);
    const double a = 0.7, b = -1.3;
    ComplexTensor lhs = fft_forward(x * a + y * b, ax0);
    ComplexTensor rhs = fft_forward(x, ax0) * a + fft_forward(y, ax0) * b;
    CHECK((lhs - rhs).max_abs() < 1e-12);
  }
}

TEST_CASE("2D transform over both axes matches separable naive DFTs") {
  std::mt19937_64 rng(9);
  const std::size_t n0 = 6, n1 = 5;
  Tensor x = random_tensor(Shape{n0, n1}, rng);
  const std::size_t both[] = {0, 1};
  ComplexTensor X = fft_forward(x, both);
  for (std::size_t k0 = 0; k0 < n0; ++k0) {
    for (std::size_t k1 = 0; k1 < n1; ++k1) {
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < n0; ++i) {
        for (std::size_t j = 0; j < n1; ++j) {
          const double ang = -2.0 * std::numbers::pi * (double(k0 * i) / n0 + double(k1 * j) / n1);
          acc += x.at({i, j}) * std::complex<double>(std::cos(ang), std::sin(ang));
        }
      }
      const std::size_t f = k0 * n1 + k1;
      CHECK(std::abs(std::complex<double>(X.re()[f], X.im()[f]) - acc) < 1e-11);
    }
  }
}

TEST_CASE("rfft keeps the nonnegative half and irfft inverts it") {
  std::mt19937_64 rng(13);
  for (std::size_t n : {8u, 9u, 85u, 128u}) {
    Tensor x = random_tensor(Shape{3, n, 2}, rng);
    ComplexTensor H = rfft(x, 1);
    CHECK(H.shape() == Shape{3, n / 2 + 1, 2});
    const std::size_t ax1[] = {1};
    ComplexTensor F = fft_forward(x, ax1);
    for (std::size_t b = 0; b < 3; ++b) {
      for (std::size_t k = 0; k < n / 2 + 1; ++k) {
        for (std::size_t c = 0; c < 2; ++c) {
          const std::size_t fh = (b * (n / 2 + 1) + k) * 2 + c;
          const std::size_t ff = (b * n + k) * 2 + c;
          CHECK(std::abs(H.re()[fh] - F.re()[ff]) < 1e-11);
          CHECK(std::abs(H.im()[fh] - F.im()[ff]) < 1e-11);
        }
      }
    }
    Tensor back = irfft(H, 1, n);
    CHECK((back - x).max_abs() < 1e-12);
  }
}

TEST_CASE("truncate_modes examples and properties") {
  const std::size_t n = 32;
  // Exact spectrum of cos(2 pi k x): n/2 at bins k and n-k.
  auto pure_mode = [&](std::size_t k) {
    ComplexTensor X(Shape{n});
    X.re()[k] = n / 2.0;
    X.re()[n - k] = n / 2.0;
    return X;
  };
  const std::size_t all[] = {n / 2 + 1};
  const std::size_t eight[] = {8};
  ComplexTensor X10 = pure_mode(10);
  CHECK((truncate_modes(X10, ax0, all) - X10).max_abs() == 0.0);
  CHECK(truncate_modes(X10, ax0, eight).squared_norm() == 0.0);
  ComplexTensor X3 = pure_mode(3);
  CHECK((truncate_modes(X3, ax0, eight) - X3).max_abs() == 0.0);

  const std::size_t zero[] = {0};
  CHECK_THROWS(truncate_modes(X3, ax0, zero));
  const std::size_t too_many[] = {n / 2 + 2};
  CHECK_THROWS(truncate_modes(X3, ax0, too_many));

  std::mt19937_64 rng(17);
  ComplexTensor R = random_complex(Shape{12, 10, 3}, rng);
  const std::size_t axes2[] = {0, 1};
  const std::size_t k2[] = {4, 3};
  ComplexTensor once = truncate_modes(R, axes2, k2);
  ComplexTensor twice = truncate_modes(once, axes2, k2);
  CHECK((once - twice).max_abs() == 0.0);
  CHECK(once.squared_norm() <= R.squared_norm());
  // Four corner blocks: (2k0-1) * (2k1-1) positions per channel survive.
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < once.size(); ++i) nonzero += (once.re()[i] != 0.0 || once.im()[i] != 0.0);
  CHECK(nonzero == 7 * 5 * 3);
}

TEST_CASE("retained mode indices") {
  CHECK(retained_mode_indices(16, 3, false) == std::vector<std::size_t>{0, 1, 2, 14, 15});
  CHECK(retained_mode_indices(16, 3, true) == std::vector<std::size_t>{0, 1, 2});
  CHECK_THROWS(retained_mode_indices(16, 0, false));
}

TEST_CASE("backward basics") {
  Parameter x{"x", Tensor(Shape{5}, 0.3)};
  {
    Tape tape;
    Var v = tape.param(x);
    Var zero = tape.constant(Tensor(Shape{5}));
    Var l = ad::sum(ad::add(v, zero));
    tape.backward(l);
    auto g = std::get<Tensor>(tape.gradient(x));
    for (double e : g.data()) CHECK(e == 1.0);
    CHECK_THROWS_AS(tape.backward(l), std::logic_error);
  }
  {
    Parameter y{"y", Tensor(Shape{2}, std::vector<double>{1, 2})};
    Tape tape;
    tape.backward(ad::sum_squares(tape.param(y)));
    auto g = std::get<Tensor>(tape.gradient(y));
    CHECK(g[0] == 2.0);
    CHECK(g[1] == 4.0);
  }
  {
    Tape tape;
    Var v = tape.param(x);
    CHECK_THROWS_AS(tape.backward(v), std::invalid_argument);
  }
  {
    Parameter unused{"unused", Tensor(Shape{3}, 1.0)};
    Tape tape;
    tape.param(unused);
    tape.backward(ad::sum(tape.param(x)));
    auto g = std::get<Tensor>(tape.gradient(unused));
    CHECK(g.shape() == Shape{3});
    CHECK(g.max_abs() == 0.0);
    CHECK(tape.parameter_id(x) == 1);
  }
}

TEST_CASE("matmul with identity") {
  std::mt19937_64 rng(1);
  Parameter w{"w", random_tensor(Shape{3, 4}, rng)};
  Tensor eye(Shape{3, 3});
  for (std::size_t i = 0; i < 3; ++i) eye.at({i, i}) = 1.0;
  Tape tape;
  Var out = ad::matmul(tape.constant(eye), tape.param(w));
  CHECK((out.real() - std::get<Tensor>(w.value)).max_abs() == 0.0);
  tape.backward(ad::sum(out));
  const Tensor g = std::get<Tensor>(tape.gradient(w));
  for (double e : g.data()) CHECK(e == 1.0);
}

TEST_CASE("shape mismatch is rejected") {
  Tape tape;
  Var a = tape.constant(Tensor(Shape{3}));
  Var b = tape.constant(Tensor(Shape{4}));
  CHECK_THROWS(ad::add(a, b));
  CHECK_THROWS(ad::mul(a, b));
  CHECK_THROWS(ad::matmul(tape.constant(Tensor(Shape{2, 3})), tape.constant(Tensor(Shape{2, 3}))));
  Tape other;
  CHECK_THROWS(ad::add(a, other.constant(Tensor(Shape{3}))));
}

TEST_CASE("every primitive passes the finite-difference check") {
  constexpr double tol = 1e-5;
  std::mt19937_64 rng(2024);
  Parameter a{"a", random_tensor(Shape{4, 6}, rng)};
  Parameter b{"b", random_tensor(Shape{4, 6}, rng)};
  Parameter w{"w", random_tensor(Shape{5, 6}, rng)};
  Parameter bias{"bias", random_tensor(Shape{5}, rng)};
  Parameter m{"m", random_tensor(Shape{6, 3}, rng)};
  Parameter za{"za", random_complex(Shape{4, 6}, rng)};
  Parameter zb{"zb", random_complex(Shape{4, 6}, rng)};
  Parameter rw{"rw", random_complex(Shape{4, 6, 2}, rng)};
  Parameter pos{"pos", random_tensor(Shape{7}, rng, 0.5, 2.0)};
  Tensor weights = random_tensor(Shape{4, 6}, rng);

  // Contracts a real node with fixed weights so gradients are not uniform.
  auto project = [&](Tape& t, Var v) {
    Tensor wv(v.shape());
    std::mt19937_64 local(99);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& e : wv.data()) e = d(local);
    return ad::sum(ad::mul(v, t.constant(wv)));
  };
  // Real readout of a complex node through a fixed complex product and ifft_real.
  auto cread = [&](Tape& t, Var z) {
    ComplexTensor cw(z.shape());
    std::mt19937_64 local(77);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& e : cw.re()) e = d(local);
    for (auto& e : cw.im()) e = d(local);
    Var prod = ad::cmul(z, t.constant(cw));
    std::vector<std::size_t> axes(z.shape().size());
    for (std::size_t i = 0; i < axes.size(); ++i) axes[i] = i;
    return ad::sum_squares(ad::ifft_real(prod, axes));
  };

  SUBCASE("add/sub/scale/mul") {
    CHECK(gradient_check({&a, &b}, [&](Tape& t) {
      Var x = t.param(a), y = t.param(b);
      return project(t, ad::mul(ad::sub(ad::scale(x, 1.7), y), ad::add(x, y)));
    }) < tol);
  }
  SUBCASE("matmul and reshape") {
    CHECK(gradient_check({&a, &m}, [&](Tape& t) {
      Var x = ad::reshape(t.param(a), Shape{4, 6});
      return ad::sum_squares(ad::matmul(x, t.param(m)));
    }) < tol);
  }
  SUBCASE("linear with and without bias") {
    CHECK(gradient_check({&a, &w, &bias}, [&](Tape& t) {
      Var x = ad::reshape(t.param(a), Shape{2, 2, 6});
      return ad::sum_squares(ad::linear(x, t.param(w), t.param(bias)));
    }) < tol);
    CHECK(gradient_check({&a, &w}, [&](Tape& t) {
      return ad::sum_squares(ad::linear(t.param(a), t.param(w), Var{}));
    }) < tol);
  }
  SUBCASE("complex multiply") {
    CHECK(gradient_check({&za, &zb}, [&](Tape& t) { return cread(t, ad::cmul(t.param(za), t.param(zb))); }) < tol);
  }
  SUBCASE("mode mixing") {
    CHECK(gradient_check({&za, &rw}, [&](Tape& t) { return cread(t, ad::mode_mix(t.param(za), t.param(rw))); }) < tol);
  }
  SUBCASE("fft and ifft") {
    const std::vector<std::size_t> axes{0, 1};
    CHECK(gradient_check({&a}, [&](Tape& t) { return cread(t, ad::fft(t.param(a), {1})); }) < tol);
    CHECK(gradient_check({&za}, [&](Tape& t) { return cread(t, ad::fft(t.param(za), axes)); }) < tol);
    CHECK(gradient_check({&za}, [&](Tape& t) { return cread(t, ad::ifft(t.param(za), {0})); }) < tol);
    CHECK(gradient_check({&za}, [&](Tape& t) { return project(t, ad::ifft_real(t.param(za), axes)); }) < tol);
  }
  SUBCASE("rfft and irfft on even and odd lengths") {
    for (std::size_t n : {6u, 7u}) {
      Parameter x{"x", random_tensor(Shape{3, n}, rng)};
      CHECK(gradient_check({&x}, [&](Tape& t) { return cread(t, ad::rfft(t.param(x), 1)); }) < tol);
      Parameter h{"h", random_complex(Shape{3, n / 2 + 1}, rng)};
      CHECK(gradient_check({&h}, [&](Tape& t) {
        Var y = ad::irfft(t.param(h), 1, n);
        Tensor wv(y.shape());
        for (std::size_t i = 0; i < wv.size(); ++i) wv[i] = std::sin(1.0 + i);
        return ad::sum(ad::mul(y, t.constant(wv)));
      }) < tol);
    }
  }
  SUBCASE("truncate, gather and scatter") {
    CHECK(gradient_check({&za}, [&](Tape& t) { return cread(t, ad::truncate(t.param(za), {1}, {2})); }) < tol);
    const std::vector<std::vector<std::size_t>> idx{{0, 3}, {1, 4, 5}};
    CHECK(gradient_check({&za}, [&](Tape& t) {
      Var g = ad::gather(t.param(za), idx);
      return cread(t, ad::scatter(g, idx, Shape{4, 6}));
    }) < tol);
    CHECK(gradient_check({&a}, [&](Tape& t) { return ad::sum_squares(ad::gather(t.param(a), idx)); }) < tol);
  }
  SUBCASE("activations") {
    for (Activation act : {Activation::identity, Activation::relu, Activation::gelu, Activation::tanh, Activation::phi}) {
      Parameter x{"x", random_tensor(Shape{20}, rng, -1.0, 4.0)};
      CHECK(gradient_check({&x}, [&](Tape& t) { return project(t, ad::reshape(ad::activate(t.param(x), act), Shape{4, 5})); }) < tol);
    }
  }
  SUBCASE("sqrt") {
    CHECK(gradient_check({&pos}, [&](Tape& t) { return ad::sum(ad::sqrt(ad::sum_squares(t.param(pos)))); }) < tol);
  }
}

TEST_CASE("gather and scatter are adjoint") {
  std::mt19937_64 rng(4);
  Tensor x = random_tensor(Shape{5, 7}, rng);
  const std::vector<std::vector<std::size_t>> idx{{1, 4}, {}};
  Tape tape;
  Var g = ad::gather(tape.constant(x), idx);
  CHECK(g.shape() == Shape{2, 7});
  Tensor y = random_tensor(Shape{2, 7}, rng);
  Var s = ad::scatter(tape.constant(y), idx, Shape{5, 7});
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) lhs += g.real()[i] * y[i];
  for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * s.real()[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}
