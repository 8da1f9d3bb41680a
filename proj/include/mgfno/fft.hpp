/// @file fft.hpp
/// @brief Discrete Fourier transforms over tensor axes.
///
/// Convention: the forward transform is unnormalized,
///   X_k = sum_n x_n exp(-2 pi i k n / N),
/// and the inverse carries the 1/N factor. Any length is supported: powers of
/// two use an iterative radix-2 kernel, everything else goes through
/// Bluestein's chirp-z reformulation on a power-of-two grid.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mgfno/tensor.hpp"

namespace mgfno {

namespace fft {

using cplx = std::complex<double>;

/// Precomputed 1D transform of a fixed length.
class Plan {
 public:
  explicit Plan(std::size_t n);

  std::size_t size() const { return n_; }

  /// In-place, unnormalized, sign -1.
  void forward(std::span<cplx> data) const;
  /// In-place, unnormalized, sign +1 (no 1/N).
  void backward(std::span<cplx> data) const;

 private:
  void transform(std::span<cplx> data, bool inverse) const;
  void radix2(std::span<cplx> data, bool inverse) const;
  void bluestein(std::span<cplx> data, bool inverse) const;

  std::size_t n_ = 0;
  bool pow2_ = true;
  std::vector<std::size_t> bitrev_;
  std::vector<cplx> twiddle_;  // exp(-2 pi i k / n), k < n/2

  // Bluestein state.
  std::size_t m_ = 0;
  std::vector<cplx> chirp_;         // exp(-i pi k^2 / n)
  std::vector<cplx> chirp_hat_;     // forward FFT of the conjugate chirp filter
  std::vector<Plan> inner_;         // single radix-2 plan of length m_
};

/// Per-thread cached plan for length n.
const Plan& plan(std::size_t n);

bool is_power_of_two(std::size_t n);

}  // namespace fft

/// Full complex DFT of a real tensor along `axes`; other axes are batch axes.
ComplexTensor fft_forward(const Tensor& x, std::span<const std::size_t> axes);
ComplexTensor fft_forward(const ComplexTensor& x, std::span<const std::size_t> axes);

/// Complex-to-complex inverse along `axes` (includes the 1/N factor).
ComplexTensor fft_inverse_complex(const ComplexTensor& X, std::span<const std::size_t> axes);

/// Inverse DFT returning the real part. Throws std::domain_error when the
/// discarded imaginary residue exceeds 1e-10 relative to the signal scale,
/// which means the input spectrum was not conjugate-symmetric.
Tensor fft_inverse(const ComplexTensor& X, std::span<const std::size_t> axes);

/// Unnormalized adjoint-direction transform (sign +1, no 1/N) along `axes`.
ComplexTensor fft_backward_unscaled(const ComplexTensor& X, std::span<const std::size_t> axes);

/// Half spectrum of a real signal along one axis: extent n becomes n/2 + 1.
ComplexTensor rfft(const Tensor& x, std::size_t axis);

/// Inverse of rfft. `n` is the real length along `axis`. Imaginary parts of
/// the DC bin (and of the Nyquist bin for even n) are ignored.
Tensor irfft(const ComplexTensor& X, std::size_t axis, std::size_t n);

/// Indices kept along one spectral axis of extent `n` with cutoff `k_max`:
/// [0, k_max) and, unless the axis is a half spectrum, the conjugate partners
/// n-k for k in [1, k_max).
std::vector<std::size_t> retained_mode_indices(std::size_t n, std::size_t k_max, bool half_spectrum);

/// Zero every mode outside the low-frequency set on each listed (full) axis.
/// In 2D the retained set is the four corner blocks of the coefficient array.
ComplexTensor truncate_modes(const ComplexTensor& X, std::span<const std::size_t> axes,
                             std::span<const std::size_t> k_max);

}  // namespace mgfno
