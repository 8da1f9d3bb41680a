#include "mgfno/fft.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mgfno {

namespace fft {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Plan::Plan(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("fft length must be positive");
  pow2_ = is_power_of_two(n);
  if (pow2_) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    bitrev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      bitrev_[i] = r;
    }
    twiddle_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddle_[k] = {std::cos(a), std::sin(a)};
    }
    return;
  }
  m_ = 1;
  while (m_ < 2 * n - 1) m_ <<= 1;
  chirp_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small for long transforms.
    const std::size_t k2 = (k * k) % (2 * n);
    const double a = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp_[k] = {std::cos(a), std::sin(a)};
  }
  inner_.emplace_back(m_);
  chirp_hat_.assign(m_, cplx{0.0, 0.0});
  chirp_hat_[0] = std::conj(chirp_[0]);
  for (std::size_t k = 1; k < n; ++k) {
    chirp_hat_[k] = std::conj(chirp_[k]);
    chirp_hat_[m_ - k] = std::conj(chirp_[k]);
  }
  inner_.front().forward(chirp_hat_);
}

void Plan::forward(std::span<cplx> data) const { transform(data, false); }
void Plan::backward(std::span<cplx> data) const { transform(data, true); }

void Plan::transform(std::span<cplx> data, bool inverse) const {
  if (data.size() != n_) throw std::invalid_argument("fft buffer length does not match plan");
  if (n_ == 1) return;
  if (pow2_) {
    radix2(data, inverse);
  } else {
    bluestein(data, inverse);
  }
}

void Plan::radix2(std::span<cplx> data, bool inverse) const {
  const std::size_t n = n_;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        cplx w = twiddle_[j * step];
        if (inverse) w = std::conj(w);
        const cplx t = w * data[start + j + half];
        const cplx u = data[start + j];
        data[start + j] = u + t;
        data[start + j + half] = u - t;
      }
    }
  }
}

void Plan::bluestein(std::span<cplx> data, bool inverse) const {
  // Inverse with sign +1 is conj(forward(conj(x))).
  std::vector<cplx> a(m_, cplx{0.0, 0.0});
  for (std::size_t k = 0; k < n_; ++k) {
    const cplx x = inverse ? std::conj(data[k]) : data[k];
    a[k] = x * chirp_[k];
  }
  const Plan& inner = inner_.front();
  inner.forward(a);
  for (std::size_t k = 0; k < m_; ++k) a[k] *= chirp_hat_[k];
  inner.backward(a);
  const double scale = 1.0 / static_cast<double>(m_);
  for (std::size_t k = 0; k < n_; ++k) {
    const cplx y = a[k] * scale * chirp_[k];
    data[k] = inverse ? std::conj(y) : y;
  }
}

const Plan& plan(std::size_t n) {
  thread_local std::map<std::size_t, Plan> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Plan(n)).first;
  return it->second;
}

}  // namespace fft

namespace {

using fft::cplx;

struct AxisLines {
  std::size_t outer;
  std::size_t n;
  std::size_t inner;
};

AxisLines lines_for(const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw std::out_of_range("fft axis " + std::to_string(axis) + " out of range for shape " +
                            shape_string(shape));
  }
  AxisLines l{1, shape[axis], 1};
  for (std::size_t i = 0; i < axis; ++i) l.outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) l.inner *= shape[i];
  return l;
}

// Complex transform along one axis, in place on split planes.
void transform_axis(const Shape& shape, std::span<double> re, std::span<double> im, std::size_t axis,
                    bool inverse) {
  const auto l = lines_for(shape, axis);
  const auto& p = fft::plan(l.n);
  std::vector<cplx> buf(l.n);
  for (std::size_t o = 0; o < l.outer; ++o) {
    for (std::size_t i = 0; i < l.inner; ++i) {
      const std::size_t base = o * l.n * l.inner + i;
      for (std::size_t k = 0; k < l.n; ++k) buf[k] = {re[base + k * l.inner], im[base + k * l.inner]};
      if (inverse) {
        p.backward(buf);
      } else {
        p.forward(buf);
      }
      for (std::size_t k = 0; k < l.n; ++k) {
        re[base + k * l.inner] = buf[k].real();
        im[base + k * l.inner] = buf[k].imag();
      }
    }
  }
}

void check_axes(const Shape& shape, std::span<const std::size_t> axes) {
  for (auto a : axes) {
    if (a >= shape.size()) {
      throw std::out_of_range("fft axis " + std::to_string(a) + " out of range for shape " +
                              shape_string(shape));
    }
  }
}

}  // namespace

ComplexTensor fft_forward(const ComplexTensor& x, std::span<const std::size_t> axes) {
  check_axes(x.shape(), axes);
  ComplexTensor out = x;
  for (auto a : axes) transform_axis(out.shape(), out.re(), out.im(), a, false);
  return out;
}

ComplexTensor fft_forward(const Tensor& x, std::span<const std::size_t> axes) {
  return fft_forward(ComplexTensor::from_real(x), axes);
}

ComplexTensor fft_backward_unscaled(const ComplexTensor& X, std::span<const std::size_t> axes) {
  check_axes(X.shape(), axes);
  ComplexTensor out = X;
  for (auto a : axes) transform_axis(out.shape(), out.re(), out.im(), a, true);
  return out;
}

ComplexTensor fft_inverse_complex(const ComplexTensor& X, std::span<const std::size_t> axes) {
  ComplexTensor out = fft_backward_unscaled(X, axes);
  double n = 1.0;
  for (auto a : axes) n *= static_cast<double>(X.extent(a));
  out *= 1.0 / n;
  return out;
}

Tensor fft_inverse(const ComplexTensor& X, std::span<const std::size_t> axes) {
  ComplexTensor z = fft_inverse_complex(X, axes);
  double scale = 1.0;
  double residue = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    scale = std::max(scale, std::abs(z.re()[i]));
    residue = std::max(residue, std::abs(z.im()[i]));
  }
  if (residue > 1e-10 * scale) {
    throw std::domain_error("inverse fft: imaginary residue " + std::to_string(residue) +
                            " indicates a spectrum without conjugate symmetry");
  }
  return z.real_part();
}

ComplexTensor rfft(const Tensor& x, std::size_t axis) {
  const auto l = lines_for(x.shape(), axis);
  const std::size_t nh = l.n / 2 + 1;
  Shape out_shape = x.shape();
  out_shape[axis] = nh;
  ComplexTensor out(out_shape);
  const auto& p = fft::plan(l.n);
  std::vector<cplx> buf(l.n);
  auto xd = x.data();
  auto ore = out.re();
  auto oim = out.im();
  // Two real lines share one complex transform: z = a + i b.
  const std::size_t lines = l.outer * l.inner;
  auto line_base = [&](std::size_t line, std::size_t len) {
    const std::size_t o = line / l.inner;
    const std::size_t i = line % l.inner;
    return o * len * l.inner + i;
  };
  for (std::size_t line = 0; line < lines; line += 2) {
    const bool pair = line + 1 < lines;
    const std::size_t ba = line_base(line, l.n);
    const std::size_t bb = pair ? line_base(line + 1, l.n) : 0;
    for (std::size_t k = 0; k < l.n; ++k) {
      buf[k] = {xd[ba + k * l.inner], pair ? xd[bb + k * l.inner] : 0.0};
    }
    p.forward(buf);
    const std::size_t oa = line_base(line, nh);
    const std::size_t ob = pair ? line_base(line + 1, nh) : 0;
    for (std::size_t k = 0; k < nh; ++k) {
      const cplx zk = buf[k];
      const cplx zc = std::conj(buf[(l.n - k) % l.n]);
      const cplx A = 0.5 * (zk + zc);
      ore[oa + k * l.inner] = A.real();
      oim[oa + k * l.inner] = A.imag();
      if (pair) {
        const cplx B = cplx{0.0, -0.5} * (zk - zc);
        ore[ob + k * l.inner] = B.real();
        oim[ob + k * l.inner] = B.imag();
      }
    }
  }
  return out;
}

Tensor irfft(const ComplexTensor& X, std::size_t axis, std::size_t n) {
  const auto l = lines_for(X.shape(), axis);
  if (n == 0 || l.n != n / 2 + 1) {
    throw std::invalid_argument("irfft: half-spectrum extent " + std::to_string(l.n) +
                                " inconsistent with length " + std::to_string(n));
  }
  Shape out_shape = X.shape();
  out_shape[axis] = n;
  Tensor out(out_shape);
  const auto& p = fft::plan(n);
  std::vector<cplx> buf(n);
  auto xre = X.re();
  auto xim = X.im();
  auto od = out.data();
  const double inv_n = 1.0 / static_cast<double>(n);
  const std::size_t lines = l.outer * l.inner;
  auto spectrum = [&](std::size_t base, std::size_t k) {
    cplx v{xre[base + k * l.inner], xim[base + k * l.inner]};
    if (k == 0 || (n % 2 == 0 && k == n / 2)) v = {v.real(), 0.0};
    return v;
  };
  // Two Hermitian spectra A, B combine into Z = A + i B whose inverse is a + i b.
  for (std::size_t line = 0; line < lines; line += 2) {
    const bool pair = line + 1 < lines;
    const std::size_t o1 = line / l.inner, i1 = line % l.inner;
    const std::size_t ba = o1 * l.n * l.inner + i1;
    std::size_t bb = 0;
    if (pair) {
      const std::size_t o2 = (line + 1) / l.inner, i2 = (line + 1) % l.inner;
      bb = o2 * l.n * l.inner + i2;
    }
    for (std::size_t k = 0; k < l.n; ++k) {
      const cplx a = spectrum(ba, k);
      const cplx b = pair ? spectrum(bb, k) : cplx{};
      buf[k] = a + cplx{0.0, 1.0} * b;
      if (k > 0 && n - k >= l.n) buf[n - k] = std::conj(a) + cplx{0.0, 1.0} * std::conj(b);
    }
    p.backward(buf);
    const std::size_t oa = o1 * n * l.inner + i1;
    for (std::size_t k = 0; k < n; ++k) od[oa + k * l.inner] = buf[k].real() * inv_n;
    if (pair) {
      const std::size_t o2 = (line + 1) / l.inner, i2 = (line + 1) % l.inner;
      const std::size_t ob = o2 * n * l.inner + i2;
      for (std::size_t k = 0; k < n; ++k) od[ob + k * l.inner] = buf[k].imag() * inv_n;
    }
  }
  return out;
}

std::vector<std::size_t> retained_mode_indices(std::size_t n, std::size_t k_max, bool half_spectrum) {
  if (k_max == 0) throw std::invalid_argument("mode cutoff k_max must be positive");
  std::vector<std::size_t> idx;
  if (half_spectrum) {
    for (std::size_t k = 0; k < std::min(k_max, n); ++k) idx.push_back(k);
    return idx;
  }
  std::vector<bool> keep(n, false);
  for (std::size_t k = 0; k < k_max && k < n; ++k) {
    keep[k] = true;
    if (k > 0) keep[n - k] = true;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (keep[k]) idx.push_back(k);
  }
  return idx;
}

ComplexTensor truncate_modes(const ComplexTensor& X, std::span<const std::size_t> axes,
                             std::span<const std::size_t> k_max) {
  if (axes.size() != k_max.size()) throw std::invalid_argument("truncate_modes: one cutoff per axis");
  check_axes(X.shape(), axes);
  const Shape& shape = X.shape();
  std::vector<std::vector<bool>> keep(shape.size());
  for (std::size_t d = 0; d < shape.size(); ++d) keep[d].assign(shape[d], true);
  for (std::size_t j = 0; j < axes.size(); ++j) {
    const std::size_t a = axes[j];
    const std::size_t n = shape[a];
    if (k_max[j] == 0) throw std::invalid_argument("mode cutoff k_max must be positive");
    if (k_max[j] > n / 2 + 1) {
      throw std::invalid_argument("mode cutoff " + std::to_string(k_max[j]) + " exceeds extent/2+1 for " +
                                  std::to_string(n));
    }
    keep[a].assign(n, false);
    for (auto k : retained_mode_indices(n, k_max[j], false)) keep[a][k] = true;
  }
  ComplexTensor out(shape);
  const auto strides = row_major_strides(shape);
  for (std::size_t flat = 0; flat < X.size(); ++flat) {
    bool retained = true;
    std::size_t rem = flat;
    for (std::size_t d = 0; d < shape.size() && retained; ++d) {
      const std::size_t i = rem / strides[d];
      rem %= strides[d];
      retained = keep[d][i];
    }
    if (retained) {
      out.re()[flat] = X.re()[flat];
      out.im()[flat] = X.im()[flat];
    }
  }
  return out;
}

}  // namespace mgfno
