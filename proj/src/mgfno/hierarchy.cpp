#include <cmath>
#include <string>

#include "mgfno/mgfno.hpp"

namespace mgfno {

namespace {

// Linear interpolation of every line along `axis` onto m points.
Tensor interpolate_axis(const Tensor& x, std::size_t axis, std::size_t m, bool periodic) {
  const Shape& s = x.shape();
  const std::size_t n = s[axis];
  Shape os = s;
  os[axis] = m;
  Tensor out(os);
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= s[d];
  for (std::size_t d = axis + 1; d < s.size(); ++d) inner *= s[d];
  // Source position j * span_n / span_m split into an integer node and an exact remainder.
  const std::size_t span_n = periodic ? n : n - 1, span_m = periodic ? m : m - 1;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t i0 = j * span_n / span_m, rem = j * span_n % span_m;
    const double t = static_cast<double>(rem) / static_cast<double>(span_m);
    const std::size_t i1 = periodic ? (i0 + 1) % n : std::min(i0 + 1, n - 1);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t k = 0; k < inner; ++k) {
        const double a = x[(o * n + i0) * inner + k];
        double v = a;
        if (rem != 0) v = rem * 2 == span_m ? 0.5 * (a + x[(o * n + i1) * inner + k]) : (1.0 - t) * a + t * x[(o * n + i1) * inner + k];
        out[(o * m + j) * inner + k] = v;
      }
    }
  }
  return out;
}

}  // namespace

void GridHierarchy::validate() const {
  if (levels.size() < 2) throw std::invalid_argument("a grid hierarchy needs at least two levels");
  const std::size_t dim = levels.front().data.grid().size();
  const std::size_t count = levels.front().data.count();
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& lv = levels[l];
    const Shape grid = lv.data.grid();
    if (grid.size() != dim) throw std::invalid_argument("hierarchy levels disagree on the spatial dimension");
    for (auto e : grid) {
      if (e != lv.resolution) {
        throw std::invalid_argument("level " + std::to_string(l + 1) + " grid " + shape_string(grid) +
                                    " does not match resolution " + std::to_string(lv.resolution));
      }
    }
    if (lv.data.count() != count) throw std::invalid_argument("hierarchy levels hold different sample counts");
    if (l > 0 && lv.resolution <= levels[l - 1].resolution) {
      throw std::invalid_argument("hierarchy resolutions must increase strictly");
    }
    const auto& m0 = levels.front().data.metadata;
    const auto& ml = lv.data.metadata;
    if (m0.contains("seed") && ml.contains("seed") && m0["seed"] != ml["seed"]) {
      throw std::invalid_argument("hierarchy levels come from different generation seeds");
    }
  }
}

Tensor prolong_residual(const Tensor& r, const Shape& target, bool periodic) {
  if (r.rank() != target.size()) {
    throw std::invalid_argument("prolongation target " + shape_string(target) + " has the wrong rank for " +
                                shape_string(r.shape()));
  }
  Tensor out = r;
  for (std::size_t d = 0; d < target.size(); ++d) {
    const std::size_t n = r.extent(d), m = target[d];
    if (m < n || n < 2) {
      throw std::invalid_argument("cannot prolong " + shape_string(r.shape()) + " onto " + shape_string(target));
    }
    out = interpolate_axis(out, d, m, periodic);
  }
  return out;
}

NormalizationStats NormalizationStats::from(const std::vector<Tensor>& samples) {
  if (samples.empty()) throw std::invalid_argument("normalization statistics need at least one sample");
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& t : samples) {
    for (double v : t.data()) sum += v;
    count += t.size();
  }
  const double mean = sum / static_cast<double>(count);
  double sq = 0.0;
  for (const auto& t : samples) {
    for (double v : t.data()) sq += (v - mean) * (v - mean);
  }
  const double std = std::sqrt(sq / static_cast<double>(count));
  return {mean, std < 1e-12 ? 1.0 : std};
}

Tensor NormalizationStats::normalize(const Tensor& x) const {
  Tensor out = x;
  for (auto& v : out.storage()) v = (v - mean) / std;
  return out;
}

Tensor NormalizationStats::denormalize(const Tensor& x) const {
  Tensor out = x;
  for (auto& v : out.storage()) v = v * std + mean;
  return out;
}

NormalizationStats NormalizationStats::from_json(const nlohmann::json& j) {
  NormalizationStats s{j.at("mean").get<double>(), j.at("std").get<double>()};
  if (!(s.std > 0.0)) throw std::invalid_argument("normalization std must be positive");
  return s;
}

}  // namespace mgfno
