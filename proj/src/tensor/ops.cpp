#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mgfno/fft.hpp"
#include "mgfno/tape.hpp"

namespace mgfno {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;
using Eigen::Index;

Tape& common_tape(Var a, Var b) {
  Tape& t = a.tape();
  if (&b.tape() != &t) throw std::invalid_argument("primitive inputs live on different tapes");
  return t;
}

double axes_length(const Shape& shape, const std::vector<std::size_t>& axes) {
  double n = 1.0;
  for (auto a : axes) n *= static_cast<double>(shape.at(a));
  return n;
}

// Maps an output multi-index of a gathered block back to source flat offsets.
std::vector<std::size_t> gather_offsets(const Shape& full, const std::vector<std::vector<std::size_t>>& index,
                                        Shape& block) {
  if (index.size() > full.size()) throw std::invalid_argument("gather: more index lists than axes");
  block = full;
  std::vector<std::vector<std::size_t>> maps(full.size());
  for (std::size_t d = 0; d < full.size(); ++d) {
    if (d < index.size() && !index[d].empty()) {
      for (auto i : index[d]) {
        if (i >= full[d]) throw std::out_of_range("gather: index out of range");
      }
      maps[d] = index[d];
    } else {
      maps[d].resize(full[d]);
      for (std::size_t i = 0; i < full[d]; ++i) maps[d][i] = i;
    }
    block[d] = maps[d].size();
  }
  const auto fstrides = row_major_strides(full);
  std::vector<std::size_t> offsets(shape_size(block), 0);
  // Build offsets axis by axis (outer product of per-axis contributions).
  std::size_t count = 1;
  offsets[0] = 0;
  for (std::size_t d = 0; d < full.size(); ++d) {
    const std::size_t m = maps[d].size();
    for (std::size_t c = count; c-- > 0;) {
      const std::size_t base = offsets[c];
      for (std::size_t j = m; j-- > 0;) offsets[c * m + j] = base + maps[d][j] * fstrides[d];
    }
    count *= m;
  }
  return offsets;
}

}  // namespace

namespace ad {

Var add(Var a, Var b) {
  Tape& t = common_tape(a, b);
  require_same_shape(a.shape(), b.shape(), "add");
  if (a.is_complex() != b.is_complex()) throw std::invalid_argument("add: mixed real/complex operands");
  NodeData out = a.is_complex() ? NodeData(a.cplx() + b.cplx()) : NodeData(a.real() + b.real());
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const NodeData& g) {
    std::visit([&](const auto& gt) {
      tp.accumulate(a, gt);
      tp.accumulate(b, gt);
    }, g);
  });
}

Var sub(Var a, Var b) {
  Tape& t = common_tape(a, b);
  require_same_shape(a.shape(), b.shape(), "sub");
  if (a.is_complex() != b.is_complex()) throw std::invalid_argument("sub: mixed real/complex operands");
  NodeData out = a.is_complex() ? NodeData(a.cplx() - b.cplx()) : NodeData(a.real() - b.real());
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const NodeData& g) {
    std::visit([&](const auto& gt) {
      tp.accumulate(a, gt);
      tp.accumulate(b, gt * -1.0);
    }, g);
  });
}

Var scale(Var a, double s) {
  NodeData out = a.is_complex() ? NodeData(a.cplx() * s) : NodeData(a.real() * s);
  return a.tape().record(std::move(out), {a}, [a, s](Tape& tp, const NodeData& g) {
    std::visit([&](const auto& gt) { tp.accumulate(a, gt * s); }, g);
  });
}

Var mul(Var a, Var b) {
  Tape& t = common_tape(a, b);
  require_same_shape(a.shape(), b.shape(), "mul");
  const Tensor& x = a.real();
  const Tensor& y = b.real();
  Tensor out(x.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const NodeData& g) {
    const Tensor& gt = std::get<Tensor>(g);
    if (tp.requires_grad(a)) {
      Tensor& ga = tp.grad_buffer_real(a);
      const Tensor& y = b.real();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gt[i] * y[i];
    }
    if (tp.requires_grad(b)) {
      Tensor& gb = tp.grad_buffer_real(b);
      const Tensor& x = a.real();
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += gt[i] * x[i];
    }
  });
}

Var reshape(Var a, Shape shape) {
  const Shape original = a.shape();
  NodeData out = a.is_complex() ? NodeData(a.cplx().reshaped(shape)) : NodeData(a.real().reshaped(shape));
  return a.tape().record(std::move(out), {a}, [a, original](Tape& tp, const NodeData& g) {
    if (const auto* gt = std::get_if<Tensor>(&g)) {
      tp.accumulate(a, gt->reshaped(original));
    } else {
      tp.accumulate(a, std::get<ComplexTensor>(g).reshaped(original));
    }
  });
}

Var matmul(Var a, Var b) {
  Tape& t = common_tape(a, b);
  const Tensor& x = a.real();
  const Tensor& y = b.real();
  if (x.rank() != 2 || y.rank() != 2 || x.extent(1) != y.extent(0)) {
    throw std::invalid_argument("matmul: incompatible shapes " + shape_string(x.shape()) + " and " +
                                shape_string(y.shape()));
  }
  const Index m = static_cast<Index>(x.extent(0));
  const Index k = static_cast<Index>(x.extent(1));
  const Index n = static_cast<Index>(y.extent(1));
  Tensor out(Shape{x.extent(0), y.extent(1)});
  MapMat(out.data().data(), m, n).noalias() =
      ConstMapMat(x.data().data(), m, k) * ConstMapMat(y.data().data(), k, n);
  return t.record(std::move(out), {a, b}, [a, b, m, k, n](Tape& tp, const NodeData& g) {
    ConstMapMat G(std::get<Tensor>(g).data().data(), m, n);
    if (tp.requires_grad(a)) {
      Tensor& ga = tp.grad_buffer_real(a);
      MapMat(ga.data().data(), m, k).noalias() += G * ConstMapMat(b.real().data().data(), k, n).transpose();
    }
    if (tp.requires_grad(b)) {
      Tensor& gb = tp.grad_buffer_real(b);
      MapMat(gb.data().data(), k, n).noalias() += ConstMapMat(a.real().data().data(), m, k).transpose() * G;
    }
  });
}

Var linear(Var x, Var w, Var b) {
  Tape& t = common_tape(x, w);
  const Tensor& xv = x.real();
  const Tensor& wv = w.real();
  if (wv.rank() != 2) throw std::invalid_argument("linear: weight must be [d_out, d_in]");
  const std::size_t din = wv.extent(1);
  const std::size_t dout = wv.extent(0);
  if (xv.shape().back() != din) {
    throw std::invalid_argument("linear: input width " + std::to_string(xv.shape().back()) +
                                " does not match weight " + shape_string(wv.shape()));
  }
  if (b.valid()) {
    if (&b.tape() != &t) throw std::invalid_argument("primitive inputs live on different tapes");
    if (b.real().size() != dout) throw std::invalid_argument("linear: bias length mismatch");
  }
  const Index rows = static_cast<Index>(xv.size() / din);
  Shape out_shape = xv.shape();
  out_shape.back() = dout;
  Tensor out(out_shape);
  MapMat Y(out.data().data(), rows, static_cast<Index>(dout));
  Y.noalias() = ConstMapMat(xv.data().data(), rows, static_cast<Index>(din)) *
                ConstMapMat(wv.data().data(), static_cast<Index>(dout), static_cast<Index>(din)).transpose();
  if (b.valid()) {
    Eigen::Map<const Eigen::RowVectorXd> bias(b.real().data().data(), static_cast<Index>(dout));
    Y.rowwise() += bias;
  }
  auto adjoint = [x, w, b, rows, din, dout](Tape& tp, const NodeData& g) {
    ConstMapMat G(std::get<Tensor>(g).data().data(), rows, static_cast<Index>(dout));
    const auto di = static_cast<Index>(din);
    const auto dO = static_cast<Index>(dout);
    if (tp.requires_grad(x)) {
      Tensor& gx = tp.grad_buffer_real(x);
      MapMat(gx.data().data(), rows, di).noalias() += G * ConstMapMat(w.real().data().data(), dO, di);
    }
    if (tp.requires_grad(w)) {
      Tensor& gw = tp.grad_buffer_real(w);
      MapMat(gw.data().data(), dO, di).noalias() += G.transpose() * ConstMapMat(x.real().data().data(), rows, di);
    }
    if (b.valid() && tp.requires_grad(b)) {
      Tensor& gb = tp.grad_buffer_real(b);
      Eigen::Map<Eigen::RowVectorXd>(gb.data().data(), dO) += G.colwise().sum();
    }
  };
  if (b.valid()) return t.record(std::move(out), {x, w, b}, adjoint);
  return t.record(std::move(out), {x, w}, adjoint);
}

Var cmul(Var a, Var b) {
  Tape& t = common_tape(a, b);
  require_same_shape(a.shape(), b.shape(), "cmul");
  const ComplexTensor& x = a.cplx();
  const ComplexTensor& y = b.cplx();
  ComplexTensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.re()[i] = x.re()[i] * y.re()[i] - x.im()[i] * y.im()[i];
    out.im()[i] = x.re()[i] * y.im()[i] + x.im()[i] * y.re()[i];
  }
  return t.record(std::move(out), {a, b}, [a, b](Tape& tp, const NodeData& g) {
    const ComplexTensor& gt = std::get<ComplexTensor>(g);
    auto conj_product = [&](Var target, const ComplexTensor& other) {
      if (!tp.requires_grad(target)) return;
      ComplexTensor& acc = tp.grad_buffer_complex(target);
      for (std::size_t i = 0; i < gt.size(); ++i) {
        // g * conj(other)
        const double gr = gt.re()[i], gi = gt.im()[i];
        const double orr = other.re()[i], oi = other.im()[i];
        acc.re()[i] += gr * orr + gi * oi;
        acc.im()[i] += gi * orr - gr * oi;
      }
    };
    conj_product(a, b.cplx());
    conj_product(b, a.cplx());
  });
}

Var mode_mix(Var x, Var r) {
  Tape& t = common_tape(x, r);
  const ComplexTensor& X = x.cplx();
  const ComplexTensor& R = r.cplx();
  const Shape& xs = X.shape();
  const Shape& rs = R.shape();
  const std::size_t cin = xs.back();
  if (rs.size() != xs.size() + 1 || rs[rs.size() - 2] != cin ||
      !std::equal(xs.begin(), xs.end() - 1, rs.begin())) {
    throw std::invalid_argument("mode_mix: weights " + shape_string(rs) + " incompatible with modes " +
                                shape_string(xs));
  }
  const std::size_t cout = rs.back();
  const std::size_t modes = X.size() / cin;
  Shape out_shape = xs;
  out_shape.back() = cout;
  ComplexTensor out(out_shape);
  for (std::size_t m = 0; m < modes; ++m) {
    const double* xr = X.re().data() + m * cin;
    const double* xi = X.im().data() + m * cin;
    double* yr = out.re().data() + m * cout;
    double* yi = out.im().data() + m * cout;
    for (std::size_t i = 0; i < cin; ++i) {
      const double* wr = R.re().data() + (m * cin + i) * cout;
      const double* wi = R.im().data() + (m * cin + i) * cout;
      const double a = xr[i], b = xi[i];
      for (std::size_t o = 0; o < cout; ++o) {
        yr[o] += a * wr[o] - b * wi[o];
        yi[o] += a * wi[o] + b * wr[o];
      }
    }
  }
  return t.record(std::move(out), {x, r}, [x, r, modes, cin, cout](Tape& tp, const NodeData& g) {
    const ComplexTensor& G = std::get<ComplexTensor>(g);
    const ComplexTensor& X = x.cplx();
    const ComplexTensor& R = r.cplx();
    const bool need_x = tp.requires_grad(x);
    const bool need_r = tp.requires_grad(r);
    ComplexTensor* gx = need_x ? &tp.grad_buffer_complex(x) : nullptr;
    ComplexTensor* gr = need_r ? &tp.grad_buffer_complex(r) : nullptr;
    for (std::size_t m = 0; m < modes; ++m) {
      const double* g_r = G.re().data() + m * cout;
      const double* g_i = G.im().data() + m * cout;
      for (std::size_t i = 0; i < cin; ++i) {
        const std::size_t wbase = (m * cin + i) * cout;
        if (gx) {
          // gx = sum_o g * conj(R)
          const double* wr = R.re().data() + wbase;
          const double* wi = R.im().data() + wbase;
          double sr = 0.0, si = 0.0;
          for (std::size_t o = 0; o < cout; ++o) {
            sr += g_r[o] * wr[o] + g_i[o] * wi[o];
            si += g_i[o] * wr[o] - g_r[o] * wi[o];
          }
          gx->re()[m * cin + i] += sr;
          gx->im()[m * cin + i] += si;
        }
        if (gr) {
          // gR = g * conj(x)
          const double a = X.re()[m * cin + i], b = X.im()[m * cin + i];
          double* rr = gr->re().data() + wbase;
          double* ri = gr->im().data() + wbase;
          for (std::size_t o = 0; o < cout; ++o) {
            rr[o] += g_r[o] * a + g_i[o] * b;
            ri[o] += g_i[o] * a - g_r[o] * b;
          }
        }
      }
    }
  });
}

Var fft(Var x, std::vector<std::size_t> axes) {
  const bool real_in = !x.is_complex();
  ComplexTensor out = real_in ? fft_forward(x.real(), axes) : fft_forward(x.cplx(), axes);
  return x.tape().record(std::move(out), {x}, [x, axes, real_in](Tape& tp, const NodeData& g) {
    ComplexTensor gx = fft_backward_unscaled(std::get<ComplexTensor>(g), axes);
    if (real_in) {
      tp.accumulate(x, gx.real_part());
    } else {
      tp.accumulate(x, gx);
    }
  });
}

Var ifft(Var x, std::vector<std::size_t> axes) {
  ComplexTensor out = fft_inverse_complex(x.cplx(), axes);
  const double n = axes_length(x.shape(), axes);
  return x.tape().record(std::move(out), {x}, [x, axes, n](Tape& tp, const NodeData& g) {
    tp.accumulate(x, fft_forward(std::get<ComplexTensor>(g), axes) * (1.0 / n));
  });
}

Var ifft_real(Var x, std::vector<std::size_t> axes) {
  Tensor out = fft_inverse_complex(x.cplx(), axes).real_part();
  const double n = axes_length(x.shape(), axes);
  return x.tape().record(std::move(out), {x}, [x, axes, n](Tape& tp, const NodeData& g) {
    tp.accumulate(x, fft_forward(std::get<Tensor>(g), axes) * (1.0 / n));
  });
}

Var rfft(Var x, std::size_t axis) {
  ComplexTensor out = mgfno::rfft(x.real(), axis);
  const std::size_t n = x.shape().at(axis);
  return x.tape().record(std::move(out), {x}, [x, axis, n](Tape& tp, const NodeData& g) {
    const ComplexTensor& gh = std::get<ComplexTensor>(g);
    Shape full = gh.shape();
    full[axis] = n;
    std::vector<std::size_t> idx(gh.extent(axis));
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    std::vector<std::vector<std::size_t>> index(full.size());
    index[axis] = idx;
    Shape block;
    const auto offsets = gather_offsets(full, index, block);
    ComplexTensor padded(full);
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      padded.re()[offsets[i]] = gh.re()[i];
      padded.im()[offsets[i]] = gh.im()[i];
    }
    const std::size_t axes[] = {axis};
    tp.accumulate(x, fft_backward_unscaled(padded, axes).real_part());
  });
}

Var irfft(Var x, std::size_t axis, std::size_t n) {
  Tensor out = mgfno::irfft(x.cplx(), axis, n);
  return x.tape().record(std::move(out), {x}, [x, axis, n](Tape& tp, const NodeData& g) {
    ComplexTensor gh = mgfno::rfft(std::get<Tensor>(g), axis);
    const Shape& s = gh.shape();
    const std::size_t nh = s[axis];
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
    for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t k = 0; k < nh; ++k) {
        const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
        const double c = (edge ? 1.0 : 2.0) * inv_n;
        for (std::size_t i = 0; i < inner; ++i) {
          const std::size_t f = (o * nh + k) * inner + i;
          gh.re()[f] *= c;
          gh.im()[f] = edge ? 0.0 : gh.im()[f] * c;
        }
      }
    }
    tp.accumulate(x, gh);
  });
}

Var truncate(Var x, std::vector<std::size_t> axes, std::vector<std::size_t> k_max) {
  ComplexTensor out = truncate_modes(x.cplx(), axes, k_max);
  return x.tape().record(std::move(out), {x}, [x, axes, k_max](Tape& tp, const NodeData& g) {
    tp.accumulate(x, truncate_modes(std::get<ComplexTensor>(g), axes, k_max));
  });
}

Var gather(Var x, std::vector<std::vector<std::size_t>> index) {
  const Shape full = x.shape();
  Shape block;
  auto offsets = gather_offsets(full, index, block);
  NodeData out;
  if (x.is_complex()) {
    ComplexTensor o(block);
    const auto& src = x.cplx();
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      o.re()[i] = src.re()[offsets[i]];
      o.im()[i] = src.im()[offsets[i]];
    }
    out = std::move(o);
  } else {
    Tensor o(block);
    const auto& src = x.real();
    for (std::size_t i = 0; i < offsets.size(); ++i) o[i] = src[offsets[i]];
    out = std::move(o);
  }
  return x.tape().record(std::move(out), {x}, [x, offsets = std::move(offsets)](Tape& tp, const NodeData& g) {
    if (const auto* gt = std::get_if<Tensor>(&g)) {
      Tensor& acc = tp.grad_buffer_real(x);
      for (std::size_t i = 0; i < offsets.size(); ++i) acc[offsets[i]] += (*gt)[i];
    } else {
      const auto& gc = std::get<ComplexTensor>(g);
      ComplexTensor& acc = tp.grad_buffer_complex(x);
      for (std::size_t i = 0; i < offsets.size(); ++i) {
        acc.re()[offsets[i]] += gc.re()[i];
        acc.im()[offsets[i]] += gc.im()[i];
      }
    }
  });
}

Var scatter(Var x, std::vector<std::vector<std::size_t>> index, Shape full) {
  Shape block;
  auto offsets = gather_offsets(full, index, block);
  require_same_shape(block, x.shape(), "scatter");
  NodeData out;
  if (x.is_complex()) {
    ComplexTensor o(full);
    const auto& src = x.cplx();
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      o.re()[offsets[i]] += src.re()[i];
      o.im()[offsets[i]] += src.im()[i];
    }
    out = std::move(o);
  } else {
    Tensor o(full);
    const auto& src = x.real();
    for (std::size_t i = 0; i < offsets.size(); ++i) o[offsets[i]] += src[i];
    out = std::move(o);
  }
  return x.tape().record(std::move(out), {x}, [x, offsets = std::move(offsets)](Tape& tp, const NodeData& g) {
    if (const auto* gt = std::get_if<Tensor>(&g)) {
      Tensor& acc = tp.grad_buffer_real(x);
      for (std::size_t i = 0; i < offsets.size(); ++i) acc[i] += (*gt)[offsets[i]];
    } else {
      const auto& gc = std::get<ComplexTensor>(g);
      ComplexTensor& acc = tp.grad_buffer_complex(x);
      for (std::size_t i = 0; i < offsets.size(); ++i) {
        acc.re()[i] += gc.re()[offsets[i]];
        acc.im()[i] += gc.im()[offsets[i]];
      }
    }
  });
}

Var activate(Var x, Activation act) {
  const Tensor& v = x.real();
  Tensor out(v.shape());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = activation_value(act, v[i]);
  return x.tape().record(std::move(out), {x}, [x, act](Tape& tp, const NodeData& g) {
    const Tensor& gt = std::get<Tensor>(g);
    const Tensor& v = x.real();
    Tensor& acc = tp.grad_buffer_real(x);
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += gt[i] * activation_derivative(act, v[i]);
  });
}

Var sum(Var x) {
  return x.tape().record(Tensor::scalar(x.real().sum()), {x}, [x](Tape& tp, const NodeData& g) {
    const double s = std::get<Tensor>(g)[0];
    Tensor& acc = tp.grad_buffer_real(x);
    for (auto& v : acc.data()) v += s;
  });
}

Var sum_squares(Var x) {
  return x.tape().record(Tensor::scalar(x.real().squared_norm()), {x}, [x](Tape& tp, const NodeData& g) {
    const double s = 2.0 * std::get<Tensor>(g)[0];
    const Tensor& v = x.real();
    Tensor& acc = tp.grad_buffer_real(x);
    for (std::size_t i = 0; i < v.size(); ++i) acc[i] += s * v[i];
  });
}

Var sqrt(Var x) {
  const Tensor& v = x.real();
  Tensor out(v.shape());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) throw std::domain_error("sqrt of a negative value");
    out[i] = std::sqrt(v[i]);
  }
  return x.tape().record(std::move(out), {x}, [x](Tape& tp, const NodeData& g) {
    const Tensor& gt = std::get<Tensor>(g);
    const Tensor& v = x.real();
    Tensor& acc = tp.grad_buffer_real(x);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] > 0.0) acc[i] += gt[i] * 0.5 / std::sqrt(v[i]);
    }
  });
}

}  // namespace ad

namespace {

double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

double activation_value(Activation act, double x) {
  switch (act) {
    case Activation::identity:
      return x;
    case Activation::relu:
      return relu(x);
    case Activation::gelu:
      return 0.5 * x * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
    case Activation::tanh:
      return std::tanh(x);
    case Activation::phi: {
      const double a = relu(x), b = relu(x - 1.0), c = relu(x - 2.0), d = relu(x - 3.0);
      return a * a - 3.0 * b * b + 3.0 * c * c - d * d;
    }
  }
  throw std::invalid_argument("unknown activation");
}

double activation_derivative(Activation act, double x) {
  switch (act) {
    case Activation::identity:
      return 1.0;
    case Activation::relu:
      return x > 0.0 ? 1.0 : 0.0;
    case Activation::gelu: {
      const double cdf = 0.5 * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
      const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      return cdf + x * pdf;
    }
    case Activation::tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::phi:
      return 2.0 * relu(x) - 6.0 * relu(x - 1.0) + 6.0 * relu(x - 2.0) - 2.0 * relu(x - 3.0);
  }
  throw std::invalid_argument("unknown activation");
}

Activation activation_from_string(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "gelu") return Activation::gelu;
  if (name == "tanh") return Activation::tanh;
  if (name == "phi") return Activation::phi;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::gelu: return "gelu";
    case Activation::tanh: return "tanh";
    case Activation::phi: return "phi";
  }
  return "unknown";
}

}  // namespace mgfno
