#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mgfno/operator.hpp"
#include "support.hpp"

using namespace mgfno;
using testing::gradient_check;
using testing::random_tensor;

namespace {

FnoConfig small_config(std::size_t dim) {
  FnoConfig c;
  c.spatial_dim = dim;
  c.width = 4;
  c.modes = 3;
  c.n_layers = 2;
  c.proj_dim = 5;
  c.variant = FourierVariant::channel_mlp;
  c.activation = Activation::gelu;
  return c;
}

void zero_all(OperatorModel& m) {
  for (auto* p : m.parameters()) {
    if (auto* t = std::get_if<Tensor>(&p->value)) {
      *t = Tensor(t->shape());
    } else {
      auto& c = std::get<ComplexTensor>(p->value);
      c = ComplexTensor(c.shape());
    }
  }
}

// Smooth periodic field with a few low modes, sampled at n points.
Tensor band_limited(std::size_t n) {
  Tensor a(Shape{n});
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / n;
    a[i] = 0.3 * std::sin(2 * std::numbers::pi * x) + 0.2 * std::cos(2 * std::numbers::pi * 3 * x) + 0.1;
  }
  return a;
}

}  // namespace

TEST_CASE("coordinate channels") {
  Tensor c = grid_coordinates(Shape{4}, true);
  CHECK(c.shape() == Shape{4, 1});
  CHECK(c[3] == doctest::Approx(0.75));
  Tensor b = grid_coordinates(Shape{3, 5}, false, 2.0);
  CHECK(b.shape() == Shape{3, 5, 2});
  CHECK(b.at({2, 4, 0}) == doctest::Approx(2.0));
  CHECK(b.at({2, 4, 1}) == doctest::Approx(2.0));
  CHECK(b.at({1, 1, 1}) == doctest::Approx(0.5));
  Tensor a(Shape{4}, 7.0);
  Tensor in = with_coordinates(a, true);
  CHECK(in.shape() == Shape{4, 2});
  CHECK(in.at({2, 0}) == 7.0);
  CHECK(in.at({2, 1}) == doctest::Approx(0.5));
}

TEST_CASE("zero parameters give the projection bias") {
  FnoModel m(small_config(1), 1);
  zero_all(m);
  std::get<Tensor>(m.proj1.bias.value)[0] = 0.25;
  Tensor out = m.predict(band_limited(16));
  for (double v : out.data()) CHECK(v == 0.25);
}

TEST_CASE("Burgers architecture parameter count") {
  FnoConfig c;
  c.width = 64;
  c.modes = 16;
  c.n_layers = 4;
  c.proj_dim = 128;
  c.variant = FourierVariant::channel_mlp;
  FnoModel m(c, 0);
  CHECK(m.parameter_count() == 582849);
  c.variant = FourierVariant::standard;
  CHECK(FnoModel(c, 0).parameter_count() == 582849 - 4 * 2 * (64 * 64 + 64));
}

// The appended coordinate channel x = i/n jumps at the periodic wrap, so the
// lifted field is not band-limited and coarse grids alias at O(1/n).
TEST_CASE("the same parameters evaluate across resolutions") {
  FnoModel m(small_config(1), 3);
  Tensor ref = m.predict(band_limited(4096));
  auto max_gap = [&](std::size_t n) {
    Tensor p = m.predict(band_limited(n));
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(p[i] - ref[(4096 / n) * i]));
    return err;
  };
  const double e256 = max_gap(256);
  const double e1024 = max_gap(1024);
  CHECK(e256 < 1e-5);
  CHECK(e1024 < 0.3 * e256);
  CHECK_THROWS_AS(m.predict(band_limited(3)), std::invalid_argument);
}

TEST_CASE("full FNO gradient matches finite differences") {
  std::mt19937_64 rng(4);
  for (std::size_t dim : {1u, 2u}) {
    FnoModel m(small_config(dim), 5);
    Tensor a = random_tensor(dim == 1 ? Shape{12} : Shape{7, 8}, rng);
    Tensor y = random_tensor(a.shape(), rng);
    auto params = m.parameters();
    const double err = gradient_check(params, [&](Tape& t) { return relative_l2(m.forward(t, a), y); });
    CHECK(err < 1e-5);
  }
}

TEST_CASE("multiscale wrapper") {
  MscaleConfig cfg;
  cfg.branch = small_config(1);
  SUBCASE("single scale equals the branch") {
    cfg.scales = {1.0};
    MscaleModel ms(cfg, 9);
    const FnoModel& b = ms.branches().front();
    Tensor a = band_limited(16);
    Tensor direct = b.predict(a);
    Tensor wrapped = ms.predict(a);
    CHECK(direct.storage() == wrapped.storage());
    CHECK(b.config().activation == Activation::phi);
  }
  SUBCASE("zero branches sum their projection biases") {
    cfg.scales = {1.0, 2.0, 4.0};
    cfg.shared_branches = false;
    MscaleModel ms(cfg, 9);
    zero_all(ms);
    double expected = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      std::get<Tensor>(ms.branches()[i].proj1.bias.value)[0] = 0.1 * (i + 1);
      expected += 0.1 * (i + 1);
    }
    const Tensor out = ms.predict(band_limited(16));
    for (double v : out.data()) CHECK(v == doctest::Approx(expected).epsilon(1e-15));
  }
  SUBCASE("gradient through two branches") {
    std::mt19937_64 rng(10);
    cfg.scales = {1.0, 2.0};
    Tensor a = random_tensor(Shape{12}, rng);
    Tensor y = random_tensor(Shape{12}, rng);
    for (bool shared : {false, true}) {
      cfg.shared_branches = shared;
      MscaleModel ms(cfg, 11);
      auto params = ms.parameters();
      CHECK(gradient_check(params, [&](Tape& t) { return relative_l2(ms.forward(t, a), y); }) < 1e-5);
    }
  }
  SUBCASE("tied branches cost one FNO, independent branches one per scale") {
    cfg.scales = {1.0, 2.0, 4.0, 8.0};
    const std::size_t single = FnoModel(cfg.branch, 0).parameter_count();
    cfg.shared_branches = true;
    CHECK(MscaleModel(cfg, 0).parameter_count() == single);
    cfg.shared_branches = false;
    CHECK(MscaleModel(cfg, 0).parameter_count() == 4 * single);
  }
  SUBCASE("invalid configurations") {
    cfg.scales = {2.0, 4.0};
    CHECK_THROWS(MscaleModel(cfg, 0));
    cfg.scales = {1.0, 1.0};
    CHECK_THROWS(MscaleModel(cfg, 0));
    cfg.scales = {1.0, 2.0};
    FnoModel b(cfg.branch, 0);
    const FnoModel* one[] = {&b};
    Tape tape;
    CHECK_THROWS(mscale_forward(tape, cfg, one, band_limited(16)));
  }
}

TEST_CASE("relative L2") {
  std::mt19937_64 rng(12);
  Tensor y = random_tensor(Shape{10}, rng);
  CHECK(relative_l2(y, y) == 0.0);
  CHECK(relative_l2(Tensor(Shape{10}), y) == doctest::Approx(1.0));
  CHECK(relative_l2(y * 1.01, y) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK_THROWS(relative_l2(y, Tensor(Shape{10})));
  CHECK(relative_l2(std::vector<Tensor>{y, y * 1.5}, std::vector<Tensor>{y, y}) == doctest::Approx(0.25));
}

TEST_CASE("model description round trip") {
  MscaleConfig cfg;
  cfg.branch = small_config(2);
  cfg.branch.periodic = false;
  MscaleModel ms(cfg, 1, "lvl3");
  auto rebuilt = make_model(ms.describe(), 1);
  CHECK(rebuilt->describe() == ms.describe());
  CHECK(rebuilt->parameter_count() == ms.parameter_count());
  CHECK(rebuilt->parameters().front()->name == ms.parameters().front()->name);
  nlohmann::json bad = ms.describe();
  bad["config"]["branch"]["bogus"] = 1;
  CHECK_THROWS(make_model(bad, 1));
}
