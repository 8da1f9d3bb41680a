#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "mgfno/analysis.hpp"
#include "support.hpp"

using namespace mgfno;
using namespace mgfno::analysis;

namespace {

constexpr double pi = std::numbers::pi;

Tensor waves_1d(std::size_t n, std::initializer_list<std::pair<double, double>> amp_freq) {
  Tensor t(Shape{n});
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    for (auto [a, k] : amp_freq) t[i] += a * std::sin(2 * pi * k * x);
  }
  return t;
}

}  // namespace

TEST_CASE("band edges follow the grid nyquist") {
  CHECK(default_band_edges(Shape{256}) == std::vector<double>{0, 4, 16, 128});
  CHECK(default_band_edges(Shape{16}) == std::vector<double>{0, 4, 8});
  CHECK(nyquist(Shape{64, 64}) == doctest::Approx(std::sqrt(2.0) * 32));
}

TEST_CASE("band error is zero for an exact prediction") {
  std::mt19937_64 rng(3);
  const Tensor t = testing::random_tensor(Shape{128}, rng);
  for (auto e : band_error(t, t, default_band_edges(t.shape()))) {
    REQUIRE(e);
    CHECK(*e == 0.0);
  }
}

TEST_CASE("band error isolates a damped high mode") {
  const Tensor target = waves_1d(64, {{1.0, 2}, {1.0, 20}});
  const Tensor pred = waves_1d(64, {{1.0, 2}, {0.5, 20}});
  const auto e = band_error(pred, target, default_band_edges(target.shape()));
  REQUIRE(e.size() == 3);
  CHECK(*e[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(e[1].has_value());
  CHECK(*e[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("low-passed prediction has error 1 above the cut only") {
  const Tensor target = waves_1d(128, {{1.0, 1}, {0.3, 7}, {0.2, 30}, {0.1, 64 - 1}});
  const Tensor pred = waves_1d(128, {{1.0, 1}, {0.3, 7}});
  const auto e = band_error(pred, target, {0, 16, 64});
  CHECK(*e[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(*e[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the top band includes the nyquist bin") {
  Tensor target(Shape{64});
  for (std::size_t i = 0; i < 64; ++i) target[i] = i % 2 == 0 ? 1.0 : -1.0;
  const auto e = band_error(Tensor(Shape{64}), target, default_band_edges(target.shape()));
  CHECK_FALSE(e[0]);
  CHECK(*e[2] == doctest::Approx(1.0));
}

TEST_CASE("a single covering band equals the spatial relative error") {
  std::mt19937_64 rng(11);
  for (Shape s : {Shape{100}, Shape{24, 36}}) {
    const Tensor t = testing::random_tensor(s, rng), p = testing::random_tensor(s, rng);
    const auto e = band_error(p, t, {0.0, nyquist(s)});
    CHECK(*e[0] == doctest::Approx(testing::relative_error(p, t)).epsilon(1e-10));
  }
}

TEST_CASE("radial wavenumber in 2D") {
  // cos(2 pi (3x + 4y)) lives at |k| = 5, inside [4, 16).
  Tensor t(Shape{32, 32});
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 32; ++j) t.at({i, j}) = std::cos(2 * pi * (3.0 * i + 4.0 * j) / 32.0);
  const auto e = band_error(Tensor(Shape{32, 32}), t, default_band_edges(t.shape()));
  CHECK_FALSE(e[0]);
  CHECK(*e[1] == doctest::Approx(1.0));
  CHECK_FALSE(e[2]);
  CHECK(energy_fraction_above(t, 5.0) == doctest::Approx(1.0));
  CHECK(energy_fraction_above(t, 5.01) == doctest::Approx(0.0));
}

TEST_CASE("band error rejects bad edges and shapes") {
  const Tensor t(Shape{8});
  CHECK_THROWS_AS(band_error(t, t, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(band_error(t, t, {0.0, 4.0, 4.0}), std::invalid_argument);
  CHECK_THROWS(band_error(t, Tensor(Shape{9}), {0.0, 4.0}));
}

TEST_CASE("spectral bias: the low frequency converges first") {
  FPrincipleConfig cfg;
  cfg.seed = 1;
  cfg.hidden = 100;
  cfg.max_steps = 500;
  cfg.stop_when_converged = false;
  const auto res = fprinciple_experiment(cfg);
  CHECK(res.k_low == 2);
  CHECK(res.k_high == 10);
  REQUIRE(res.trace.size() == 51);
  CHECK(res.trace.front().step == 0);
  CHECK(res.trace.back().step == 500);
  // A small random net is nearly flat, so both bins start near error 1.
  CHECK(res.trace.front().low > 0.8);
  CHECK(res.trace.front().high > 0.8);
  CHECK(res.trace.back().loss < res.trace.front().loss);
  REQUIRE(res.low_step);
  CHECK(res.ordering_holds());
  CHECK(res.band_trace().size() == 2 * res.trace.size());
}

TEST_CASE("spectral bias run is seed-deterministic") {
  FPrincipleConfig cfg;
  cfg.hidden = 20;
  cfg.points = 200;
  cfg.max_steps = 50;
  const auto a = fprinciple_experiment(cfg), b = fprinciple_experiment(cfg);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(a.trace[i].loss == b.trace[i].loss);
}

TEST_CASE("diverging gradient descent reports the step") {
  FPrincipleConfig cfg;
  cfg.hidden = 50;
  cfg.points = 200;
  cfg.init_std = 1.0;
  cfg.optimizer = FPrincipleConfig::Optimizer::gradient_descent;
  cfg.learning_rate = 10.0;
  cfg.max_steps = 200;
  try {
    fprinciple_experiment(cfg);
    FAIL("expected divergence");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("diverged at step") != std::string::npos);
  }
}

TEST_CASE("sweep and trace CSV layout") {
  Dataset ds;
  ds.inputs = Tensor(Shape{2, 16});
  ds.outputs = Tensor(Shape{2, 16});
  for (std::size_t i = 0; i < 32; ++i) ds.inputs.data()[i] = ds.outputs.data()[i] = 1.0 + i;
  const auto rows = superres_eval({{"identity", [](const Tensor& a) { return a; }},
                                   {"half", [](const Tensor& a) { return 0.5 * a; }}},
                                  {ds}, 0, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].resolution == 16);
  CHECK(rows[0].rel_err == 0.0);
  CHECK(rows[1].rel_err == doctest::Approx(0.5));

  const auto dir = std::filesystem::temp_directory_path() / "mgfno_analysis_csv";
  std::filesystem::create_directories(dir);
  write_sweep_csv(rows, dir / "sweep.csv");
  write_trace_csv({{10, 2, 2, 0.25}}, dir / "trace.csv");
  std::ifstream s(dir / "sweep.csv"), t(dir / "trace.csv");
  std::string line;
  std::getline(s, line);
  CHECK(line == "resolution,model,rel_err");
  std::getline(s, line);
  CHECK(line == "16,identity,0");
  std::getline(t, line);
  CHECK(line == "step,band_lo,band_hi,rel_err");
  std::getline(t, line);
  CHECK(line == "10,2,2,0.25");
  std::filesystem::remove_all(dir);
}
