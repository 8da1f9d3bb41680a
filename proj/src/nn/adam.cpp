#include <cmath>
#include <map>

#include "mgfno/io.hpp"
#include "mgfno/nn.hpp"

namespace mgfno {

namespace {

// Real view of a parameter or gradient: complex values as [re..., im...].
std::vector<std::span<double>> planes(NodeData& d) {
  if (auto* t = std::get_if<Tensor>(&d)) return {t->data()};
  auto& c = std::get<ComplexTensor>(d);
  return {c.re(), c.im()};
}

std::vector<std::span<const double>> planes(const NodeData& d) {
  if (const auto* t = std::get_if<Tensor>(&d)) return {t->data()};
  const auto& c = std::get<ComplexTensor>(d);
  return {c.re(), c.im()};
}

}  // namespace

AdamState::AdamState(AdamConfig cfg, const std::vector<Parameter*>& params) : cfg_(cfg) {
  if (cfg_.lr0 <= 0.0 || cfg_.halving_period == 0) throw std::invalid_argument("invalid Adam learning-rate schedule");
  for (const auto* p : params) {
    m_.emplace_back(p->scalar_count(), 0.0);
    v_.emplace_back(p->scalar_count(), 0.0);
  }
}

double AdamState::learning_rate(std::size_t epoch) const {
  return cfg_.lr0 * std::pow(0.5, static_cast<double>(epoch / cfg_.halving_period));
}

void AdamState::step(const std::vector<Parameter*>& params, const std::vector<NodeData>& grads, std::size_t epoch) {
  if (params.size() != m_.size() || grads.size() != params.size()) {
    throw std::invalid_argument("Adam step: parameter/gradient count does not match optimizer state");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    require_same_shape(data_shape(params[k]->value), data_shape(grads[k]), "Adam gradient");
    if (is_complex(params[k]->value) != is_complex(grads[k])) {
      throw std::invalid_argument("Adam step: gradient kind differs from parameter '" + params[k]->name + "'");
    }
    for (auto plane : planes(grads[k])) {
      for (double g : plane) {
        if (!std::isfinite(g)) throw NonFiniteGradient(k, params[k]->name);
      }
    }
  }
  ++t_;
  const double lr = learning_rate(epoch);
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    std::size_t j = 0;
    auto gp = planes(grads[k]);
    auto pp = planes(params[k]->value);
    for (std::size_t q = 0; q < pp.size(); ++q) {
      for (std::size_t i = 0; i < pp[q].size(); ++i, ++j) {
        const double g = gp[q][i];
        double& m = m_[k][j];
        double& v = v_[k][j];
        m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
        v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g * g;
        pp[q][i] -= lr * (m / c1) / (std::sqrt(v / c2) + cfg_.eps);
      }
    }
  }
}

void save_parameters(const std::vector<const Parameter*>& params, const std::filesystem::path& path) {
  std::vector<NamedTensor> entries;
  for (const auto* p : params) entries.push_back({p->name, p->value});
  archive_write(entries, path);
}

void load_parameters(const std::vector<Parameter*>& params, const std::filesystem::path& path) {
  std::map<std::string, NodeData> stored;
  for (auto& e : archive_read(path)) stored.emplace(e.name, std::move(e.value));
  for (auto* p : params) {
    auto it = stored.find(p->name);
    if (it == stored.end()) throw std::runtime_error("checkpoint " + path.string() + " lacks parameter '" + p->name + "'");
    if (is_complex(it->second) != is_complex(p->value) || data_shape(it->second) != data_shape(p->value)) {
      throw std::runtime_error("checkpoint parameter '" + p->name + "' has shape " +
                               shape_string(data_shape(it->second)) + ", model expects " +
                               shape_string(data_shape(p->value)));
    }
    p->value = it->second;
  }
  if (stored.size() != params.size()) {
    throw std::runtime_error("checkpoint " + path.string() + " holds " + std::to_string(stored.size()) +
                             " parameters, model has " + std::to_string(params.size()));
  }
}

}  // namespace mgfno
