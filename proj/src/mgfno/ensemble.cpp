#include <fstream>
#include <numeric>
#include <string>

#include "mgfno/mgfno.hpp"
#include "mgfno/parallel.hpp"

namespace mgfno {

EnsembleModel::EnsembleModel(const EnsembleModel& other) : stats_(other.stats_), trained_(other.trained_) {
  for (const auto& m : other.models_) models_.push_back(m->clone());
}

EnsembleModel& EnsembleModel::operator=(const EnsembleModel& other) {
  if (this != &other) {
    EnsembleModel copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void EnsembleModel::add_level(std::unique_ptr<OperatorModel> model, NormalizationStats stats) {
  if (!model) throw std::invalid_argument("ensemble level needs a model");
  if (!models_.empty() && model->spatial_dim() != models_.front()->spatial_dim()) {
    throw std::invalid_argument("ensemble levels disagree on the spatial dimension");
  }
  models_.push_back(std::move(model));
  stats_.push_back(stats);
  trained_.push_back(false);
}

void EnsembleModel::mark_trained(std::size_t level) { trained_.at(level) = true; }

Tensor EnsembleModel::level_prediction(std::size_t level, const Tensor& a) const {
  return stats_.at(level).denormalize(models_.at(level)->predict(a));
}

Tensor EnsembleModel::predict(const Tensor& a, std::optional<std::size_t> count) const {
  const std::size_t n = count.value_or(models_.size());
  if (n == 0 || n > models_.size()) throw std::invalid_argument("ensemble has no such level prefix");
  for (std::size_t l = 0; l < n; ++l) {
    if (!trained_[l]) throw std::logic_error("ensemble level " + std::to_string(l + 1) + " is not trained");
  }
  Tensor out = level_prediction(0, a);
  for (std::size_t l = 1; l < n; ++l) out += level_prediction(l, a);
  return out;
}

std::size_t EnsembleModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& m : models_) n += m->parameter_count();
  return n;
}

void EnsembleModel::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest = {{"format", "mgfno-ensemble"}, {"version", 1}, {"parameter_count", parameter_count()}};
  manifest["levels"] = nlohmann::json::array();
  for (std::size_t l = 0; l < models_.size(); ++l) {
    const std::string file = "level" + std::to_string(l + 1) + ".mgft";
    save_parameters(std::as_const(*models_[l]).parameters(), dir / file);
    manifest["levels"].push_back({{"model", models_[l]->describe()},
                                  {"stats", stats_[l].to_json()},
                                  {"trained", static_cast<bool>(trained_[l])},
                                  {"checkpoint", file},
                                  {"sha256", sha256_file(dir / file)}});
  }
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
}

EnsembleModel EnsembleModel::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw std::runtime_error("cannot open " + (dir / "manifest.json").string());
  const nlohmann::json manifest = nlohmann::json::parse(in);
  if (manifest.value("format", "") != "mgfno-ensemble") throw std::runtime_error("not an ensemble manifest");
  EnsembleModel ens;
  for (const auto& lv : manifest.at("levels")) {
    const std::filesystem::path file = dir / lv.at("checkpoint").get<std::string>();
    if (sha256_file(file) != lv.at("sha256").get<std::string>()) {
      throw std::runtime_error("checkpoint " + file.string() + " does not match its manifest hash");
    }
    auto model = make_model(lv.at("model"), 0);
    load_parameters(model->parameters(), file);
    ens.add_level(std::move(model), NormalizationStats::from_json(lv.at("stats")));
    if (lv.at("trained").get<bool>()) ens.mark_trained(ens.levels() - 1);
  }
  return ens;
}

std::size_t model_modes(const OperatorModel& model) {
  if (const auto* f = dynamic_cast<const FnoModel*>(&model)) return f->config().modes;
  if (const auto* m = dynamic_cast<const MscaleModel*>(&model)) return m->config().branch.modes;
  throw std::invalid_argument("unknown operator model type");
}

Tensor ensemble_predict(const EnsembleModel& ens, const Tensor& a) {
  std::size_t modes = 0;
  for (std::size_t l = 0; l < ens.levels(); ++l) modes = std::max(modes, model_modes(ens.model(l)));
  for (auto e : a.shape()) {
    if (e < 2 * modes) {
      throw std::invalid_argument("resolution " + shape_string(a.shape()) + " is below 2 x " + std::to_string(modes) +
                                  " retained modes");
    }
  }
  return ens.predict(a);
}

double evaluate(const EnsembleModel& ens, const Dataset& data, std::size_t begin, std::size_t end,
                std::size_t threads) {
  if (begin >= end || end > data.count()) throw std::out_of_range("invalid evaluation range");
  std::vector<double> err(end - begin);
  parallel_for(err.size(), threads, [&](std::size_t k) {
    err[k] = relative_l2(ensemble_predict(ens, data.input(begin + k)), data.output(begin + k));
  });
  return std::accumulate(err.begin(), err.end(), 0.0) / static_cast<double>(err.size());
}

ResidualDataset compute_residual_dataset(const EnsembleModel& partial, const Dataset& level, const Dataset& next,
                                         std::size_t train_count, bool periodic, std::size_t threads) {
  const std::size_t n = level.count();
  if (next.count() != n) {
    throw std::invalid_argument("level datasets are not index-aligned (" + std::to_string(n) + " vs " +
                                std::to_string(next.count()) + " samples)");
  }
  if (level.metadata.contains("seed") && next.metadata.contains("seed") &&
      level.metadata["seed"] != next.metadata["seed"]) {
    throw std::invalid_argument("level datasets come from different generation seeds");
  }
  const std::size_t ntrain = train_count == 0 ? n : train_count;
  if (ntrain > n) throw std::invalid_argument("train split exceeds the dataset");
  std::size_t trained = 0;
  while (trained < partial.levels() && partial.trained(trained)) ++trained;
  const Shape target = next.grid();
  std::vector<Tensor> prolonged(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const Tensor r = level.output(i) - partial.predict(level.input(i), trained);
    prolonged[i] = prolong_residual(r, target, periodic);
  });
  ResidualDataset out;
  out.stats = NormalizationStats::from({prolonged.begin(), prolonged.begin() + static_cast<std::ptrdiff_t>(ntrain)});
  std::vector<Tensor> targets(n);
  for (std::size_t i = 0; i < n; ++i) targets[i] = out.stats.normalize(prolonged[i]);
  out.data = Dataset{next.inputs, stack(targets), next.metadata};
  out.data.metadata["target"] = "normalized residual";
  out.data.metadata["residual_levels"] = trained;
  out.data.metadata["residual_stats"] = out.stats.to_json();
  return out;
}

MgfnoResult train_mgfno(const GridHierarchy& hierarchy, const MgfnoConfig& cfg) {
  hierarchy.validate();
  if (hierarchy.levels.size() != 3) throw std::invalid_argument("the V-cycle scheme trains exactly three levels");
  if (cfg.training.size() != 3) throw std::invalid_argument("need one training configuration per level");
  MgfnoResult res;
  const auto& L = hierarchy.levels;

  auto level1 = std::make_unique<FnoModel>(cfg.level1, cfg.seed, "level1");
  res.histories.push_back(train_level(*level1, L[0].data, cfg.training[0]));
  res.targets.push_back(L[0].data);
  res.ensemble.add_level(std::move(level1), {});
  res.ensemble.mark_trained(0);

  auto r2 = compute_residual_dataset(res.ensemble, L[0].data, L[1].data, cfg.training[1].train_count,
                                     hierarchy.periodic, cfg.training[1].threads);
  auto level2 = std::make_unique<FnoModel>(cfg.level2, cfg.seed + 1, "level2");
  res.histories.push_back(train_level(*level2, r2.data, cfg.training[1]));
  res.targets.push_back(r2.data);
  res.ensemble.add_level(std::move(level2), r2.stats);
  res.ensemble.mark_trained(1);

  auto r3 = compute_residual_dataset(res.ensemble, L[1].data, L[2].data, cfg.training[2].train_count,
                                     hierarchy.periodic, cfg.training[2].threads);
  auto level3 = std::make_unique<MscaleModel>(cfg.level3, cfg.seed + 2, "level3");
  res.histories.push_back(train_level(*level3, r3.data, cfg.training[2]));
  res.targets.push_back(r3.data);
  res.ensemble.add_level(std::move(level3), r3.stats);
  res.ensemble.mark_trained(2);
  return res;
}

}  // namespace mgfno
