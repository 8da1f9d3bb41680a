#include "mgfno/analysis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "mgfno/fft.hpp"
#include "mgfno/nn.hpp"
#include "mgfno/operator.hpp"
#include "mgfno/parallel.hpp"

namespace mgfno::analysis {

namespace {

constexpr double pi = std::numbers::pi;
// Band energy below this fraction of the total is FFT round-off.
constexpr double empty_band = 1e-24;

// Radial wavenumber of every full-DFT bin.
std::vector<double> radial_wavenumbers(const Shape& grid) {
  const auto strides = row_major_strides(grid);
  std::vector<double> out(shape_size(grid));
  for (std::size_t p = 0; p < out.size(); ++p) {
    double s = 0.0;
    for (std::size_t d = 0; d < grid.size(); ++d) {
      const std::size_t i = (p / strides[d]) % grid[d];
      const double k = static_cast<double>(std::min(i, grid[d] - i));
      s += k * k;
    }
    out[p] = std::sqrt(s);
  }
  return out;
}

ComplexTensor full_spectrum(const Tensor& x) {
  std::vector<std::size_t> axes(x.rank());
  for (std::size_t d = 0; d < axes.size(); ++d) axes[d] = d;
  return fft_forward(x, axes);
}

std::size_t band_of(double k, const std::vector<double>& edges) {
  const std::size_t bands = edges.size() - 1;
  for (std::size_t b = 0; b < bands; ++b) {
    const bool last = b + 1 == bands;
    if (k >= edges[b] && (k < edges[b + 1] || (last && k <= edges[b + 1]))) return b;
  }
  return bands;
}

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<Matrix> as_matrix(Parameter& p, std::size_t rows, std::size_t cols) {
  return {std::get<Tensor>(p.value).storage().data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

}  // namespace

double nyquist(const Shape& grid) {
  double s = 0.0;
  for (auto n : grid) s += std::pow(static_cast<double>(n / 2), 2);
  return std::sqrt(s);
}

std::vector<double> default_band_edges(const Shape& grid) {
  const double top = nyquist(grid);
  std::vector<double> edges;
  for (double e : {0.0, 4.0, 16.0}) {
    if (e < top) edges.push_back(e);
  }
  edges.push_back(top);
  return edges;
}

std::vector<std::optional<double>> band_error(const Tensor& pred, const Tensor& target,
                                              const std::vector<double>& edges) {
  require_same_shape(pred.shape(), target.shape(), "band_error");
  if (edges.size() < 2) throw std::invalid_argument("band_error needs at least one band");
  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    if (!(edges[b] < edges[b + 1])) throw std::invalid_argument("band edges must increase strictly");
  }
  const ComplexTensor P = full_spectrum(pred), T = full_spectrum(target);
  const auto k = radial_wavenumbers(target.shape());
  const std::size_t bands = edges.size() - 1;
  std::vector<double> num(bands, 0.0), den(bands, 0.0);
  double total = 0.0;
  for (std::size_t p = 0; p < k.size(); ++p) {
    const std::size_t b = band_of(k[p], edges);
    if (b == bands) continue;
    const double dr = P.re()[p] - T.re()[p], di = P.im()[p] - T.im()[p];
    num[b] += dr * dr + di * di;
    den[b] += T.re()[p] * T.re()[p] + T.im()[p] * T.im()[p];
    total += T.re()[p] * T.re()[p] + T.im()[p] * T.im()[p];
  }
  std::vector<std::optional<double>> out(bands);
  for (std::size_t b = 0; b < bands; ++b) {
    if (den[b] > empty_band * total) out[b] = std::sqrt(num[b] / den[b]);
  }
  return out;
}

double energy_fraction_above(const Tensor& x, double cutoff) {
  const ComplexTensor X = full_spectrum(x);
  const auto k = radial_wavenumbers(x.shape());
  double above = 0.0, total = 0.0;
  for (std::size_t p = 0; p < k.size(); ++p) {
    const double e = X.re()[p] * X.re()[p] + X.im()[p] * X.im()[p];
    total += e;
    if (k[p] >= cutoff) above += e;
  }
  return total > 0.0 ? above / total : 0.0;
}

BandErrorTrace FPrincipleResult::band_trace() const {
  BandErrorTrace out;
  for (const auto& p : trace) {
    out.push_back({p.step, static_cast<double>(k_low), static_cast<double>(k_low), p.low});
    out.push_back({p.step, static_cast<double>(k_high), static_cast<double>(k_high), p.high});
  }
  return out;
}

FPrincipleResult fprinciple_experiment(const FPrincipleConfig& cfg) {
  const std::size_t n = cfg.points, h = cfg.hidden;
  if (n < 16 || h == 0 || cfg.record_every == 0) throw std::invalid_argument("invalid F-Principle configuration");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");

  Eigen::VectorXd x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = -2.0 * pi + 4.0 * pi * static_cast<double>(i) / static_cast<double>(n);
    y[i] = std::sin(x[i]) + std::sin(5.0 * x[i]);
  }
  // Over a window of length 4 pi, angular frequency w sits at bin 2w.
  FPrincipleResult res;
  res.k_low = 2;
  res.k_high = 10;
  const fft::Plan& plan = fft::plan(n);
  auto bin = [&](const Eigen::VectorXd& v, std::size_t k) {
    std::vector<fft::cplx> buf(v.data(), v.data() + n);
    plan.forward(buf);
    return buf[k] / static_cast<double>(n);
  };
  const fft::cplx y_low = bin(y, res.k_low), y_high = bin(y, res.k_high);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, cfg.init_std);
  auto make = [&](const std::string& name, std::size_t rows, std::size_t cols) {
    Parameter p{name, Tensor(Shape{rows, cols})};
    for (auto& v : std::get<Tensor>(p.value).storage()) v = normal(rng);
    return p;
  };
  Parameter W1 = make("w1", 1, h), b1 = make("b1", 1, h), W2 = make("w2", h, h), b2 = make("b2", 1, h),
            W3 = make("w3", h, 1), b3 = make("b3", 1, 1);
  std::vector<Parameter*> params{&W1, &b1, &W2, &b2, &W3, &b3};
  AdamConfig acfg;
  acfg.lr0 = cfg.learning_rate;
  AdamState adam(acfg, params);

  Matrix X = x, H1, A1, H2, A2;
  std::vector<NodeData> grads;
  for (auto* p : params) grads.push_back(zeros_like(p->value));
  for (std::size_t step = 0; step <= cfg.max_steps; ++step) {
    auto w1 = as_matrix(W1, 1, h), w2 = as_matrix(W2, h, h), w3 = as_matrix(W3, h, 1);
    auto c1 = as_matrix(b1, 1, h), c2 = as_matrix(b2, 1, h), c3 = as_matrix(b3, 1, 1);
    H1 = (X * w1).rowwise() + c1.row(0);
    A1 = H1.cwiseMax(0.0);
    H2 = (A1 * w2).rowwise() + c2.row(0);
    A2 = H2.cwiseMax(0.0);
    Eigen::VectorXd out = (A2 * w3).col(0).array() + c3(0, 0);
    const Eigen::VectorXd diff = out - y;
    const bool mean = cfg.loss == FPrincipleConfig::Loss::mean_squared;
    const double loss = mean ? diff.squaredNorm() / static_cast<double>(n) : 0.5 * diff.squaredNorm();
    if (!std::isfinite(loss)) throw std::runtime_error("F-Principle training diverged at step " + std::to_string(step));
    if (step % cfg.record_every == 0) {
      const fft::cplx o = bin(out, res.k_low), p = bin(out, res.k_high);
      FPrinciplePoint pt{step, std::abs(o - y_low) / std::abs(y_low), std::abs(p - y_high) / std::abs(y_high), loss};
      res.trace.push_back(pt);
      if (!res.low_step && pt.low < cfg.threshold) res.low_step = step;
      if (!res.high_step && pt.high < cfg.threshold) res.high_step = step;
      if (cfg.stop_when_converged && res.low_step && res.high_step) break;
    }
    if (step == cfg.max_steps) break;

    Matrix g = (mean ? 2.0 / static_cast<double>(n) : 1.0) * diff;
    auto gmat = [&](std::size_t k) {
      return Eigen::Map<Matrix>(std::get<Tensor>(grads[k]).storage().data(),
                                static_cast<Eigen::Index>(data_shape(grads[k])[0]),
                                static_cast<Eigen::Index>(data_shape(grads[k])[1]));
    };
    gmat(4) = A2.transpose() * g;
    gmat(5)(0, 0) = g.sum();
    Matrix g2 = (g * w3.transpose()).cwiseProduct((H2.array() > 0.0).cast<double>().matrix());
    gmat(2) = A1.transpose() * g2;
    gmat(3) = g2.colwise().sum();
    Matrix g1 = (g2 * w2.transpose()).cwiseProduct((H1.array() > 0.0).cast<double>().matrix());
    gmat(0) = X.transpose() * g1;
    gmat(1) = g1.colwise().sum();

    if (cfg.optimizer == FPrincipleConfig::Optimizer::adam) {
      adam.step(params, grads, 0);
    } else {
      for (std::size_t k = 0; k < params.size(); ++k) {
        auto pv = std::get<Tensor>(params[k]->value).data();
        const auto gv = std::get<Tensor>(grads[k]).data();
        for (std::size_t i = 0; i < pv.size(); ++i) pv[i] -= cfg.learning_rate * gv[i];
      }
    }
  }
  return res;
}

std::vector<SweepRow> superres_eval(const std::vector<std::pair<std::string, Predictor>>& models,
                                    const std::vector<Dataset>& datasets, std::size_t begin, std::size_t end,
                                    std::size_t threads) {
  std::vector<SweepRow> rows;
  for (const auto& ds : datasets) {
    if (begin >= end || end > ds.count()) throw std::out_of_range("invalid evaluation range");
    for (const auto& [name, predict] : models) {
      std::vector<double> err(end - begin);
      parallel_for(err.size(), threads, [&](std::size_t k) {
        err[k] = relative_l2(predict(ds.input(begin + k)), ds.output(begin + k));
      });
      double sum = 0.0;
      for (double e : err) sum += e;
      rows.push_back({ds.grid().front(), name, sum / static_cast<double>(err.size())});
    }
  }
  return rows;
}

std::vector<std::optional<double>> mean_band_error(const Predictor& model, const Dataset& data, std::size_t begin,
                                                   std::size_t end, const std::vector<double>& edges) {
  if (begin >= end || end > data.count()) throw std::out_of_range("invalid evaluation range");
  const std::size_t bands = edges.size() - 1;
  std::vector<double> sum(bands, 0.0);
  std::vector<std::size_t> count(bands, 0);
  for (std::size_t i = begin; i < end; ++i) {
    const auto e = band_error(model(data.input(i)), data.output(i), edges);
    for (std::size_t b = 0; b < bands; ++b) {
      if (e[b]) {
        sum[b] += *e[b];
        ++count[b];
      }
    }
  }
  std::vector<std::optional<double>> out(bands);
  for (std::size_t b = 0; b < bands; ++b) {
    if (count[b] > 0) out[b] = sum[b] / static_cast<double>(count[b]);
  }
  return out;
}

void write_trace_csv(const BandErrorTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << std::setprecision(17) << "step,band_lo,band_hi,rel_err\n";
  for (const auto& e : trace) out << e.step << ',' << e.band_lo << ',' << e.band_hi << ',' << e.rel_err << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << std::setprecision(17) << "resolution,model,rel_err\n";
  for (const auto& r : rows) out << r.resolution << ',' << r.model << ',' << r.rel_err << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace mgfno::analysis
