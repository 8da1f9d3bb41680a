#include <cmath>

#include "mgfno/fft.hpp"
#include "mgfno/nn.hpp"

namespace mgfno {

LinearLayer::LinearLayer(const std::string& name, std::size_t d_in, std::size_t d_out, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Tensor w(Shape{d_out, d_in});
  for (auto& x : w.data()) x = dist(rng);
  Tensor b(Shape{d_out});
  for (auto& x : b.data()) x = dist(rng);
  weight = Parameter{name + ".weight", std::move(w)};
  bias = Parameter{name + ".bias", std::move(b)};
}

std::size_t LinearLayer::d_in() const { return std::get<Tensor>(weight.value).extent(1); }
std::size_t LinearLayer::d_out() const { return std::get<Tensor>(weight.value).extent(0); }

Var LinearLayer::apply(Tape& tape, Var x) const { return ad::linear(x, tape.param(weight), tape.param(bias)); }

void LinearLayer::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

void LinearLayer::collect(std::vector<const Parameter*>& out) const {
  out.push_back(&weight);
  out.push_back(&bias);
}

SpectralConvLayer::SpectralConvLayer(const std::string& name, std::size_t dim_, std::size_t modes_, std::size_t cin,
                                     std::size_t cout, std::mt19937_64& rng)
    : dim(dim_), modes(modes_) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("spectral layer supports 1 or 2 spatial dimensions");
  if (modes == 0) throw std::invalid_argument("spectral layer needs at least one mode");
  Shape s = dim == 1 ? Shape{modes, cin, cout} : Shape{2 * modes - 1, modes, cin, cout};
  ComplexTensor r(s);
  const double scale = 1.0 / static_cast<double>(cin * cout);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (auto& x : r.re()) x = scale * dist(rng);
  for (auto& x : r.im()) x = scale * dist(rng);
  weights = Parameter{name + ".weights", std::move(r)};
}

std::size_t SpectralConvLayer::d_in() const {
  const auto& s = std::get<ComplexTensor>(weights.value).shape();
  return s[s.size() - 2];
}

std::size_t SpectralConvLayer::d_out() const { return std::get<ComplexTensor>(weights.value).shape().back(); }

void SpectralConvLayer::check_grid(const Shape& grid) const {
  if (grid.size() != dim) {
    throw std::invalid_argument("spectral layer expects " + std::to_string(dim) + " spatial axes, got grid " +
                                shape_string(grid));
  }
  for (std::size_t d = 0; d + 1 < dim; ++d) {
    if (2 * modes - 1 > grid[d]) {
      throw std::invalid_argument("grid " + shape_string(grid) + " too small for " + std::to_string(modes) + " modes");
    }
  }
  if (modes > grid.back() / 2 + 1) {
    throw std::invalid_argument("grid " + shape_string(grid) + " too small for " + std::to_string(modes) + " modes");
  }
}

std::vector<std::vector<std::size_t>> spectral_mode_index(const Shape& grid, std::size_t modes) {
  std::vector<std::vector<std::size_t>> index;
  for (std::size_t d = 0; d + 1 < grid.size(); ++d) index.push_back(retained_mode_indices(grid[d], modes, false));
  index.push_back(retained_mode_indices(grid.back() / 2 + 1, modes, true));
  return index;
}

Var SpectralConvLayer::apply(Tape& tape, Var v) const {
  const Shape& vs = v.shape();
  const Shape grid(vs.begin(), vs.end() - 1);
  check_grid(grid);
  if (vs.back() != d_in()) {
    throw std::invalid_argument("spectral layer width " + std::to_string(d_in()) + " does not match input " +
                                shape_string(vs));
  }
  const std::size_t last = dim - 1;
  const std::size_t cout = d_out();
  Var R = tape.param(weights);
  Var h = ad::rfft(v, last);
  const auto index = spectral_mode_index(grid, modes);
  if (dim == 1) {
    Var low = ad::gather(h, {index[0], {}});
    Var mixed = ad::mode_mix(low, R);
    Var full = ad::scatter(mixed, {index[0], {}}, Shape{grid[0] / 2 + 1, cout});
    return ad::irfft(full, 0, grid[0]);
  }
  // 2D: restrict to the low half-spectrum columns before the full transform on axis 0.
  const std::size_t nh = grid[1] / 2 + 1;
  Var cols = ad::gather(h, {{}, index[1], {}});
  Var spec = ad::fft(cols, {0});
  Var low = ad::gather(spec, {index[0], {}, {}});
  Var mixed = ad::mode_mix(low, R);
  Var rows = ad::scatter(mixed, {index[0], {}, {}}, Shape{grid[0], index[1].size(), cout});
  Var back = ad::ifft(rows, {0});
  Var full = ad::scatter(back, {{}, index[1], {}}, Shape{grid[0], nh, cout});
  return ad::irfft(full, 1, grid[1]);
}

void SpectralConvLayer::collect(std::vector<Parameter*>& out) { out.push_back(&weights); }
void SpectralConvLayer::collect(std::vector<const Parameter*>& out) const { out.push_back(&weights); }

FourierVariant fourier_variant_from_string(const std::string& name) {
  if (name == "standard") return FourierVariant::standard;
  if (name == "channel_mlp") return FourierVariant::channel_mlp;
  if (name == "skip") return FourierVariant::skip;
  throw std::invalid_argument("unknown Fourier layer variant '" + name + "'");
}

std::string to_string(FourierVariant v) {
  switch (v) {
    case FourierVariant::standard: return "standard";
    case FourierVariant::channel_mlp: return "channel_mlp";
    case FourierVariant::skip: return "skip";
  }
  return "unknown";
}

Var ChannelMlp::apply(Tape& tape, Var x, Activation act) const {
  return second.apply(tape, ad::activate(first.apply(tape, x), act));
}

FourierLayer::FourierLayer(const std::string& name, std::size_t dim, std::size_t width, std::size_t modes,
                           FourierVariant variant_, Activation activation_, std::mt19937_64& rng)
    : variant(variant_), activation(activation_) {
  spectral = SpectralConvLayer(name + ".spectral", dim, modes, width, width, rng);
  if (variant != FourierVariant::standard) {
    mlp.first = LinearLayer(name + ".mlp0", width, width, rng);
    mlp.second = LinearLayer(name + ".mlp1", width, width, rng);
  }
  w = LinearLayer(name + ".w", width, width, rng);
}

Var FourierLayer::apply(Tape& tape, Var v) const {
  if (v.shape().back() != w.d_in()) {
    throw std::invalid_argument("Fourier layer width " + std::to_string(w.d_in()) + " does not match input " +
                                shape_string(v.shape()));
  }
  Var s = spectral.apply(tape, v);
  if (variant != FourierVariant::standard) s = mlp.apply(tape, s, activation);
  Var z = ad::add(w.apply(tape, v), s);
  if (variant == FourierVariant::skip) z = ad::add(v, z);
  return apply_activation ? ad::activate(z, activation) : z;
}

void FourierLayer::collect(std::vector<Parameter*>& out) {
  spectral.collect(out);
  if (variant != FourierVariant::standard) {
    mlp.first.collect(out);
    mlp.second.collect(out);
  }
  w.collect(out);
}

void FourierLayer::collect(std::vector<const Parameter*>& out) const {
  spectral.collect(out);
  if (variant != FourierVariant::standard) {
    mlp.first.collect(out);
    mlp.second.collect(out);
  }
  w.collect(out);
}

Tensor phi_activation(const Tensor& x) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = activation_value(Activation::phi, x[i]);
  return out;
}

std::size_t parameter_count(const std::vector<const Parameter*>& params) {
  std::size_t n = 0;
  for (const auto* p : params) n += p->scalar_count();
  return n;
}

}  // namespace mgfno
