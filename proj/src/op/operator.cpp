#include "mgfno/operator.hpp"

#include <cmath>
#include <stdexcept>

namespace mgfno {

void FnoConfig::validate() const {
  if (spatial_dim != 1 && spatial_dim != 2) throw std::invalid_argument("spatial_dim must be 1 or 2");
  if (in_channels == 0 || out_channels == 0 || width == 0 || modes == 0 || n_layers == 0 || proj_dim == 0) {
    throw std::invalid_argument("FNO sizes must be positive");
  }
}

nlohmann::json FnoConfig::to_json() const {
  return {{"spatial_dim", spatial_dim}, {"in_channels", in_channels}, {"out_channels", out_channels},
          {"width", width},             {"modes", modes},             {"n_layers", n_layers},
          {"proj_dim", proj_dim},       {"variant", to_string(variant)}, {"activation", to_string(activation)},
          {"periodic", periodic}};
}

FnoConfig FnoConfig::from_json(const nlohmann::json& j) {
  FnoConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "spatial_dim") c.spatial_dim = value.get<std::size_t>();
    else if (key == "in_channels") c.in_channels = value.get<std::size_t>();
    else if (key == "out_channels") c.out_channels = value.get<std::size_t>();
    else if (key == "width") c.width = value.get<std::size_t>();
    else if (key == "modes") c.modes = value.get<std::size_t>();
    else if (key == "n_layers") c.n_layers = value.get<std::size_t>();
    else if (key == "proj_dim") c.proj_dim = value.get<std::size_t>();
    else if (key == "variant") c.variant = fourier_variant_from_string(value.get<std::string>());
    else if (key == "activation") c.activation = activation_from_string(value.get<std::string>());
    else if (key == "periodic") c.periodic = value.get<bool>();
    else throw std::invalid_argument("unknown model key '" + key + "'");
  }
  c.validate();
  return c;
}

Tensor grid_coordinates(const Shape& grid, bool periodic, double scale) {
  const std::size_t dim = grid.size();
  Shape s = grid;
  s.push_back(dim);
  Tensor out(s);
  const auto strides = row_major_strides(grid);
  const std::size_t points = shape_size(grid);
  for (std::size_t p = 0; p < points; ++p) {
    std::size_t rem = p;
    for (std::size_t d = 0; d < dim; ++d) {
      const std::size_t i = rem / strides[d];
      rem %= strides[d];
      const double h = periodic ? 1.0 / static_cast<double>(grid[d]) : 1.0 / static_cast<double>(grid[d] - 1);
      out[p * dim + d] = scale * static_cast<double>(i) * h;
    }
  }
  return out;
}

Tensor with_coordinates(const Tensor& a, bool periodic, double coordinate_scale) {
  const Shape& grid = a.shape();
  const std::size_t dim = grid.size();
  Tensor coords = grid_coordinates(grid, periodic, coordinate_scale);
  Shape s = grid;
  s.push_back(1 + dim);
  Tensor out(s);
  for (std::size_t p = 0; p < a.size(); ++p) {
    out[p * (1 + dim)] = a[p];
    for (std::size_t d = 0; d < dim; ++d) out[p * (1 + dim) + 1 + d] = coords[p * dim + d];
  }
  return out;
}

Tensor OperatorModel::predict(const Tensor& a) const {
  Tape tape(false);
  return forward(tape, a).real();
}

std::size_t OperatorModel::parameter_count() const { return mgfno::parameter_count(parameters()); }

FnoModel::FnoModel(const FnoConfig& cfg, std::uint64_t seed, const std::string& name) : cfg_(cfg) {
  cfg_.validate();
  std::mt19937_64 rng(seed);
  lift = LinearLayer(name + ".lift", cfg_.in_channels + cfg_.spatial_dim, cfg_.width, rng);
  for (std::size_t l = 0; l < cfg_.n_layers; ++l) {
    layers.emplace_back(name + ".layer" + std::to_string(l), cfg_.spatial_dim, cfg_.width, cfg_.modes, cfg_.variant,
                        cfg_.activation, rng);
  }
  proj0 = LinearLayer(name + ".proj0", cfg_.width, cfg_.proj_dim, rng);
  proj1 = LinearLayer(name + ".proj1", cfg_.proj_dim, cfg_.out_channels, rng);
}

Var FnoModel::forward_input(Tape& tape, Var input) const {
  const Shape& s = input.shape();
  if (s.size() != cfg_.spatial_dim + 1 || s.back() != cfg_.in_channels + cfg_.spatial_dim) {
    throw std::invalid_argument("FNO input " + shape_string(s) + " does not match the configured channels");
  }
  Var v = lift.apply(tape, input);
  for (const auto& layer : layers) v = layer.apply(tape, v);
  return proj1.apply(tape, ad::activate(proj0.apply(tape, v), cfg_.activation));
}

Var FnoModel::forward_scaled(Tape& tape, const Tensor& a, double coordinate_scale) const {
  if (a.rank() != cfg_.spatial_dim) {
    throw std::invalid_argument("FNO expects a " + std::to_string(cfg_.spatial_dim) + "D field, got " +
                                shape_string(a.shape()));
  }
  Var out = forward_input(tape, tape.constant(with_coordinates(a, cfg_.periodic, coordinate_scale)));
  return ad::reshape(out, a.shape());
}

std::vector<Parameter*> FnoModel::parameters() {
  std::vector<Parameter*> out;
  lift.collect(out);
  for (auto& l : layers) l.collect(out);
  proj0.collect(out);
  proj1.collect(out);
  return out;
}

std::vector<const Parameter*> FnoModel::parameters() const {
  std::vector<const Parameter*> out;
  lift.collect(out);
  for (const auto& l : layers) l.collect(out);
  proj0.collect(out);
  proj1.collect(out);
  return out;
}

nlohmann::json FnoModel::describe() const {
  return {{"type", "fno"}, {"name", lift.weight.name.substr(0, lift.weight.name.rfind(".lift"))}, {"config", cfg_.to_json()}};
}

void MscaleConfig::validate() const {
  if (scales.empty()) throw std::invalid_argument("multiscale model needs at least one scale");
  if (scales.front() != 1.0) throw std::invalid_argument("first multiscale factor must be 1");
  for (std::size_t i = 1; i < scales.size(); ++i) {
    if (!(scales[i] > scales[i - 1])) throw std::invalid_argument("multiscale factors must increase strictly");
  }
  branch.validate();
}

nlohmann::json MscaleConfig::to_json() const {
  return {{"scales", scales}, {"branch", branch.to_json()}, {"shared_branches", shared_branches}};
}

MscaleConfig MscaleConfig::from_json(const nlohmann::json& j) {
  MscaleConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "scales") c.scales = value.get<std::vector<double>>();
    else if (key == "branch") c.branch = FnoConfig::from_json(value);
    else if (key == "shared_branches") c.shared_branches = value.get<bool>();
    else throw std::invalid_argument("unknown multiscale key '" + key + "'");
  }
  c.validate();
  return c;
}

Var mscale_forward(Tape& tape, const MscaleConfig& cfg, std::span<const FnoModel* const> branches, const Tensor& a) {
  if (branches.size() != cfg.scales.size()) {
    throw std::invalid_argument("multiscale model has " + std::to_string(branches.size()) + " branches for " +
                                std::to_string(cfg.scales.size()) + " scales");
  }
  Var out = branches[0]->forward_scaled(tape, a, cfg.scales[0]);
  for (std::size_t i = 1; i < branches.size(); ++i) out = ad::add(out, branches[i]->forward_scaled(tape, a, cfg.scales[i]));
  return out;
}

MscaleModel::MscaleModel(const MscaleConfig& cfg, std::uint64_t seed, const std::string& name) : cfg_(cfg) {
  cfg_.branch.activation = Activation::phi;
  cfg_.validate();
  if (cfg_.shared_branches) {
    branches_.emplace_back(cfg_.branch, seed, name + ".branch");
  } else {
    for (std::size_t i = 0; i < cfg_.scales.size(); ++i) {
      branches_.emplace_back(cfg_.branch, seed + 7919 * (i + 1), name + ".branch" + std::to_string(i));
    }
  }
}

Var MscaleModel::forward(Tape& tape, const Tensor& a) const {
  std::vector<const FnoModel*> ptrs;
  for (std::size_t i = 0; i < cfg_.scales.size(); ++i) ptrs.push_back(&branches_[cfg_.shared_branches ? 0 : i]);
  return mscale_forward(tape, cfg_, ptrs, a);
}

std::vector<Parameter*> MscaleModel::parameters() {
  std::vector<Parameter*> out;
  for (auto& b : branches_) {
    auto p = b.parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<const Parameter*> MscaleModel::parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& b : branches_) {
    auto p = b.parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

nlohmann::json MscaleModel::describe() const {
  const std::string& n = branches_.front().lift.weight.name;
  return {{"type", "mscale"}, {"name", n.substr(0, n.rfind(".branch"))}, {"config", cfg_.to_json()}};
}

std::unique_ptr<OperatorModel> make_model(const nlohmann::json& description, std::uint64_t seed) {
  const std::string type = description.at("type").get<std::string>();
  const std::string name = description.value("name", type);
  if (type == "fno") return std::make_unique<FnoModel>(FnoConfig::from_json(description.at("config")), seed, name);
  if (type == "mscale") {
    return std::make_unique<MscaleModel>(MscaleConfig::from_json(description.at("config")), seed, name);
  }
  throw std::invalid_argument("unknown model type '" + type + "'");
}

Var relative_l2(Var pred, const Tensor& target) {
  require_same_shape(pred.shape(), target.shape(), "relative_l2");
  const double norm = target.norm();
  if (norm == 0.0) throw std::invalid_argument("relative_l2: target has zero norm");
  Var diff = ad::sub(pred, pred.tape().constant(target));
  return ad::scale(ad::sqrt(ad::sum_squares(diff)), 1.0 / norm);
}

double relative_l2(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred.shape(), target.shape(), "relative_l2");
  const double norm = target.norm();
  if (norm == 0.0) throw std::invalid_argument("relative_l2: target has zero norm");
  return (pred - target).norm() / norm;
}

double relative_l2(const std::vector<Tensor>& preds, const std::vector<Tensor>& targets) {
  if (preds.size() != targets.size() || preds.empty()) throw std::invalid_argument("relative_l2: set size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) acc += relative_l2(preds[i], targets[i]);
  return acc / static_cast<double>(preds.size());
}

}  // namespace mgfno
