#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "mgfno/mgfno.hpp"
#include "mgfno/parallel.hpp"

namespace mgfno {

namespace {

void add_into(NodeData& acc, const NodeData& g) {
  if (auto* t = std::get_if<Tensor>(&acc)) {
    const auto src = std::get<Tensor>(g).data();
    auto dst = t->data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    return;
  }
  auto& c = std::get<ComplexTensor>(acc);
  const auto& s = std::get<ComplexTensor>(g);
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.re()[i] += s.re()[i];
    c.im()[i] += s.im()[i];
  }
}

void scale_by(NodeData& acc, double s) {
  if (auto* t = std::get_if<Tensor>(&acc)) {
    for (auto& v : t->data()) v *= s;
    return;
  }
  auto& c = std::get<ComplexTensor>(acc);
  for (auto& v : c.re()) v *= s;
  for (auto& v : c.im()) v *= s;
}

struct SampleGrad {
  double loss = 0.0;
  std::vector<NodeData> grads;
};

SampleGrad sample_gradient(const OperatorModel& model, const std::vector<Parameter*>& params, const Tensor& a,
                           const Tensor& u) {
  Tape tape;
  Var loss = relative_l2(model.forward(tape, a), u);
  SampleGrad out;
  out.loss = loss.real()[0];
  tape.backward(loss);
  out.grads.reserve(params.size());
  for (const auto* p : params) out.grads.push_back(tape.gradient(*p));
  return out;
}

}  // namespace

double evaluate(const OperatorModel& model, const Dataset& data, std::size_t begin, std::size_t end,
                std::size_t threads) {
  if (begin >= end || end > data.count()) throw std::out_of_range("invalid evaluation range");
  std::vector<double> err(end - begin);
  parallel_for(err.size(), threads, [&](std::size_t k) {
    err[k] = relative_l2(model.predict(data.input(begin + k)), data.output(begin + k));
  });
  return std::accumulate(err.begin(), err.end(), 0.0) / static_cast<double>(err.size());
}

std::vector<EpochRecord> train_level(OperatorModel& model, const Dataset& data, const TrainConfig& cfg) {
  const std::size_t total = data.count();
  const std::size_t ntrain = cfg.train_count == 0 ? total : cfg.train_count;
  if (ntrain > total) {
    throw std::invalid_argument("train split of " + std::to_string(ntrain) + " exceeds " + std::to_string(total) +
                                " samples");
  }
  if (cfg.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  std::vector<EpochRecord> history;
  if (cfg.epochs == 0) return history;

  const auto params = model.parameters();
  AdamState adam(cfg.adam, params);
  std::vector<std::size_t> order(ntrain);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.shuffle_seed);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < ntrain; start += cfg.batch_size) {
      const std::size_t bs = std::min(cfg.batch_size, ntrain - start);
      std::vector<NodeData> grads;
      double batch_loss = 0.0;
      auto fold = [&](std::size_t k, SampleGrad&& g) {
        if (!std::isfinite(g.loss)) {
          throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch) + ", sample " +
                                 std::to_string(order[start + k]));
        }
        batch_loss += g.loss;
        if (grads.empty()) {
          grads = std::move(g.grads);
        } else {
          for (std::size_t p = 0; p < grads.size(); ++p) add_into(grads[p], g.grads[p]);
        }
      };
      if (cfg.threads <= 1) {
        for (std::size_t k = 0; k < bs; ++k) {
          const std::size_t i = order[start + k];
          fold(k, sample_gradient(model, params, data.input(i), data.output(i)));
        }
      } else {
        std::vector<SampleGrad> per(bs);
        parallel_for(bs, cfg.threads, [&](std::size_t k) {
          const std::size_t i = order[start + k];
          per[k] = sample_gradient(model, params, data.input(i), data.output(i));
        });
        for (std::size_t k = 0; k < bs; ++k) fold(k, std::move(per[k]));
      }
      for (auto& g : grads) scale_by(g, 1.0 / static_cast<double>(bs));
      try {
        adam.step(params, grads, epoch);
      } catch (const NonFiniteGradient& e) {
        throw TrainingDiverged(std::string(e.what()) + " at epoch " + std::to_string(epoch));
      }
      loss_sum += batch_loss;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(ntrain);
    rec.test_loss = ntrain < total ? evaluate(model, data, ntrain, total, cfg.threads)
                                   : std::numeric_limits<double>::quiet_NaN();
    history.push_back(rec);
    if (cfg.on_epoch) cfg.on_epoch(rec, adam.steps(), model);
  }
  return history;
}

}  // namespace mgfno
