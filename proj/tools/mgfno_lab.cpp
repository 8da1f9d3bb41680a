// mgfno-lab: data generation, training, evaluation, analysis and the
// classical multigrid demo behind one JSON-configured binary.
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "mgfno/analysis.hpp"
#include "mgfno/data.hpp"
#include "mgfno/io.hpp"
#include "mgfno/mg.hpp"
#include "mgfno/mgfno.hpp"
#include "mgfno/operator.hpp"
#include "mgfno/parallel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mgfno;
using namespace mgfno::mg;

namespace {

// Raised for anything wrong with the command line or the configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every accepted key with its default. Zero / empty values mean "pick the
// default for the chosen pde".
json default_config() {
  const json level = {{"width", 64},         {"modes", 16},           {"n_layers", 4},
                      {"proj_dim", 128},     {"variant", "channel_mlp"}, {"activation", "gelu"}};
  return {
      {"seed", 0},
      {"pde", "burgers"},
      {"data",
       {{"dir", ""},
        {"count", 1100},
        {"train", 1000},
        {"generation_resolution", 0},
        {"resolutions", json::array()},
        {"burgers", {{"viscosity", 0.1}, {"t_end", 1.0}, {"dt", 2.5e-5}}},
        {"darcy", {{"high", 12.0}, {"low", 3.0}, {"forcing", 1.0}, {"tol", 1e-10}}}}},
      {"model",
       {{"level1", level},
        {"level2", level},
        {"level3", {{"branch", level}, {"scales", {1.0, 2.0, 4.0, 8.0}}, {"shared_branches", true}}}}},
      {"train",
       {{"mode", "mgfno"},
        {"epochs", {200, 200, 200}},
        {"fno_epochs", 600},
        {"batch_size", 20},
        {"lr", 1e-3},
        {"halving", 100},
        {"band_every", 0}}},
      {"eval", {{"checkpoint", ""}, {"resolutions", json::array()}, {"name", "model"}}},
      {"analyze",
       {{"kind", "bands"},
        {"checkpoint", ""},
        {"edges", json::array()},
        {"fprinciple",
         {{"seeds", {0, 1, 2, 3, 4}},
          {"points", 1000},
          {"hidden", 200},
          {"lr", 5e-4},
          {"init_std", 0.1},
          {"optimizer", "adam"},
          {"loss", "mean"},
          {"max_steps", 3000},
          {"record_every", 10},
          {"threshold", 0.1}}}}},
      {"mg",
       {{"nodes", {129}},
        {"boundary", "dirichlet"},
        {"coefficient", "one"},
        {"rhs", "ones"},
        {"levels", 0},
        {"pre_smooth", 2},
        {"post_smooth", 2},
        {"omega", 0.0},
        {"jacobi_omega", 1.0},
        {"tol", 1e-10},
        {"max_cycles", 100}}},
  };
}

std::string kind_name(const json& v) {
  if (v.is_number_float()) return "number";
  if (v.is_number()) return "integer";
  return v.type_name();
}

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) return !(a.is_number_integer() || a.is_number_unsigned()) || !b.is_number_float();
  return a.type() == b.type();
}

// Overlay `src` onto `dst`, refusing keys or types the defaults do not know.
void merge(json& dst, const json& src, const std::string& where) {
  if (!src.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : src.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!dst.contains(key)) throw ConfigError("unknown key '" + path + "'");
    json& slot = dst[key];
    if (slot.is_object()) {
      merge(slot, value, path);
    } else if (!same_kind(slot, value)) {
      throw ConfigError("key '" + path + "' expects " + kind_name(slot) + ", got " + kind_name(value));
    } else {
      slot = value;
    }
  }
}

void apply_override(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;  // bare words are strings
  // Build the nested object and merge it so the same validation applies.
  json patch = value;
  std::string rest = key;
  std::vector<std::string> parts;
  for (std::size_t dot; (dot = rest.find('.')) != std::string::npos; rest = rest.substr(dot + 1)) {
    parts.push_back(rest.substr(0, dot));
  }
  parts.push_back(rest);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  merge(cfg, patch, "");
}

struct Run {
  json cfg;
  fs::path out;
  bool deterministic = false;
  std::size_t threads = 1;
  std::string command;
};

bool is_burgers(const Run& run) {
  const auto pde = run.cfg["pde"].get<std::string>();
  if (pde != "burgers" && pde != "darcy") throw ConfigError("pde must be burgers or darcy");
  return pde == "burgers";
}

std::size_t generation_resolution(const Run& run) {
  const auto g = run.cfg["data"]["generation_resolution"].get<std::size_t>();
  return g != 0 ? g : (is_burgers(run) ? 1024 : 421);
}

std::vector<std::size_t> resolutions(const Run& run) {
  auto r = run.cfg["data"]["resolutions"].get<std::vector<std::size_t>>();
  if (r.empty()) r = is_burgers(run) ? std::vector<std::size_t>{256, 512, 1024} : std::vector<std::size_t>{85, 141, 211};
  return r;
}

std::string dataset_file(const Run& run, std::size_t res) {
  return run.cfg["pde"].get<std::string>() + "_" + std::to_string(res) + ".mgfd";
}

std::vector<Dataset> generate(const Run& run) {
  const auto& d = run.cfg["data"];
  const auto count = d["count"].get<std::size_t>();
  const auto seed = run.cfg["seed"].get<std::uint64_t>();
  if (count == 0) throw ConfigError("data.count must be positive");
  if (is_burgers(run)) {
    data::BurgersSpec spec;
    spec.viscosity = d["burgers"]["viscosity"];
    spec.t_end = d["burgers"]["t_end"];
    spec.dt = d["burgers"]["dt"];
    return data::generate_burgers(data::GrfSpec::burgers(), spec, count, seed, generation_resolution(run),
                                  resolutions(run), run.threads);
  }
  data::DarcySpec spec;
  spec.high = d["darcy"]["high"];
  spec.low = d["darcy"]["low"];
  spec.forcing = d["darcy"]["forcing"];
  spec.tol = d["darcy"]["tol"];
  return data::generate_darcy(spec, count, seed, generation_resolution(run), resolutions(run), run.threads);
}

// Datasets from data.dir when given, otherwise generated in memory.
std::vector<Dataset> load_or_generate(const Run& run) {
  const auto dir = run.cfg["data"]["dir"].get<std::string>();
  if (dir.empty()) return generate(run);
  std::vector<Dataset> out;
  for (auto res : resolutions(run)) {
    const fs::path p = fs::path(dir) / dataset_file(run, res);
    if (!fs::exists(p)) throw ConfigError("missing dataset " + p.string());
    out.push_back(dataset_read(p));
  }
  return out;
}

std::size_t train_count(const Run& run, const Dataset& ds) {
  const auto n = run.cfg["data"]["train"].get<std::size_t>();
  if (n == 0 || n >= ds.count()) {
    throw ConfigError("data.train must leave a test split (" + std::to_string(n) + " of " +
                      std::to_string(ds.count()) + ")");
  }
  return n;
}

FnoConfig fno_config(const Run& run, const json& j) {
  FnoConfig c;
  c.spatial_dim = is_burgers(run) ? 1 : 2;
  c.periodic = is_burgers(run);
  c.width = j["width"];
  c.modes = j["modes"];
  c.n_layers = j["n_layers"];
  c.proj_dim = j["proj_dim"];
  c.variant = fourier_variant_from_string(j["variant"]);
  c.activation = activation_from_string(j["activation"]);
  c.validate();
  return c;
}

TrainConfig train_config(const Run& run, std::size_t epochs, std::size_t ntrain) {
  const auto& t = run.cfg["train"];
  TrainConfig c;
  c.epochs = epochs;
  c.batch_size = t["batch_size"];
  c.train_count = ntrain;
  c.adam.lr0 = t["lr"];
  c.adam.halving_period = t["halving"];
  c.shuffle_seed = run.cfg["seed"].get<std::uint64_t>();
  c.threads = run.threads;
  return c;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << std::setprecision(17);
  return out;
}

void write_manifest(const Run& run, json extra) {
  const std::string text = run.cfg.dump();
  extra["command"] = run.command;
  extra["config"] = run.cfg;
  extra["config_sha256"] = sha256_hex(std::vector<std::uint8_t>(text.begin(), text.end()));
  extra["deterministic"] = run.deterministic;
  extra["threads"] = run.threads;
  auto out = open_out(run.out / "manifest.json");
  out << extra.dump(2) << "\n";
}

void cmd_generate(const Run& run) {
  const auto sets = generate(run);
  json files = json::array();
  for (const auto& ds : sets) {
    const auto res = ds.grid().front();
    const fs::path p = run.out / dataset_file(run, res);
    dataset_write(ds, p);
    files.push_back({{"path", p.filename().string()}, {"resolution", res}, {"samples", ds.count()},
                     {"sha256", sha256_file(p)}});
  }
  write_manifest(run, {{"seed", run.cfg["seed"]}, {"files", files}});
}

void cmd_train(const Run& run) {
  const auto mode = run.cfg["train"]["mode"].get<std::string>();
  if (mode != "fno" && mode != "fno-skip" && mode != "mgfno") throw ConfigError("train.mode must be fno, fno-skip or mgfno");
  const auto sets = load_or_generate(run);
  const std::size_t ntrain = train_count(run, sets.front());
  const auto seed = run.cfg["seed"].get<std::uint64_t>();
  const auto band_every = run.cfg["train"]["band_every"].get<std::size_t>();

  EnsembleModel ens;
  std::vector<std::vector<EpochRecord>> histories;
  analysis::BandErrorTrace trace;
  auto tracer = [&](const Dataset& ds) {
    return [&trace, &ds, band_every, ntrain](const EpochRecord& rec, std::size_t steps, const OperatorModel& m) {
      if (band_every == 0 || (rec.epoch + 1) % band_every != 0) return;
      const auto edges = analysis::default_band_edges(ds.grid());
      const auto e = analysis::mean_band_error([&m](const Tensor& a) { return m.predict(a); }, ds, ntrain, ds.count(),
                                               edges);
      for (std::size_t b = 0; b < e.size(); ++b) {
        if (e[b]) trace.push_back({steps, edges[b], edges[b + 1], *e[b]});
      }
    };
  };

  if (mode == "mgfno") {
    if (sets.size() != 3) throw ConfigError("mgfno training needs exactly three resolutions");
    const auto epochs = run.cfg["train"]["epochs"].get<std::vector<std::size_t>>();
    if (epochs.size() != 3) throw ConfigError("train.epochs needs one entry per level");
    GridHierarchy h;
    h.periodic = is_burgers(run);
    for (const auto& ds : sets) h.levels.push_back({ds.grid().front(), ds});
    MgfnoConfig mc;
    const auto& m = run.cfg["model"];
    mc.level1 = fno_config(run, m["level1"]);
    mc.level2 = fno_config(run, m["level2"]);
    mc.level3.branch = fno_config(run, m["level3"]["branch"]);
    mc.level3.scales = m["level3"]["scales"].get<std::vector<double>>();
    mc.level3.shared_branches = m["level3"]["shared_branches"];
    mc.level3.validate();
    mc.seed = seed;
    for (std::size_t l = 0; l < 3; ++l) mc.training.push_back(train_config(run, epochs[l], ntrain));
    mc.training[0].on_epoch = tracer(sets.front());
    auto res = train_mgfno(h, mc);
    ens = std::move(res.ensemble);
    histories = std::move(res.histories);
  } else {
    FnoConfig c = fno_config(run, run.cfg["model"]["level1"]);
    if (mode == "fno-skip") c.variant = FourierVariant::skip;
    auto model = std::make_unique<FnoModel>(c, seed, mode);
    auto tc = train_config(run, run.cfg["train"]["fno_epochs"], ntrain);
    tc.on_epoch = tracer(sets.front());
    histories.push_back(train_level(*model, sets.front(), tc));
    ens.add_level(std::move(model), {});
    ens.mark_trained(0);
  }

  auto loss = open_out(run.out / "loss.csv");
  loss << "epoch,train_loss,test_loss\n";
  std::size_t epoch = 0;
  json levels = json::array();
  for (std::size_t l = 0; l < histories.size(); ++l) {
    for (const auto& r : histories[l]) loss << epoch++ << ',' << r.train_loss << ',' << r.test_loss << '\n';
    levels.push_back({{"epochs", histories[l].size()},
                      {"final_test_loss", histories[l].empty() ? json(nullptr) : json(histories[l].back().test_loss)}});
  }
  if (band_every > 0) analysis::write_trace_csv(trace, run.out / "band_trace.csv");
  ens.save(run.out / "checkpoint");
  json metrics = json::array();
  for (const auto& ds : sets) {
    if (ds.grid().front() < 2 * model_modes(ens.model(0))) continue;
    metrics.push_back({{"resolution", ds.grid().front()}, {"rel_err", evaluate(ens, ds, ntrain, ds.count(), run.threads)}});
  }
  write_manifest(run, {{"mode", mode},
                       {"parameter_count", ens.parameter_count()},
                       {"levels", levels},
                       {"checkpoint", "checkpoint"},
                       {"test_error", metrics}});
}

EnsembleModel load_checkpoint(const std::string& dir) {
  if (dir.empty()) throw ConfigError("a checkpoint directory is required");
  return EnsembleModel::load(dir);
}

std::vector<Dataset> eval_sets(const Run& run) {
  auto sets = load_or_generate(run);
  const auto wanted = run.cfg["eval"]["resolutions"].get<std::vector<std::size_t>>();
  if (wanted.empty()) return sets;
  std::vector<Dataset> out;
  for (auto r : wanted) {
    auto it = std::find_if(sets.begin(), sets.end(), [r](const Dataset& d) { return d.grid().front() == r; });
    if (it == sets.end()) throw ConfigError("no dataset at resolution " + std::to_string(r));
    out.push_back(*it);
  }
  return out;
}

void cmd_eval(const Run& run) {
  const auto ens = load_checkpoint(run.cfg["eval"]["checkpoint"]);
  const auto sets = eval_sets(run);
  const std::size_t ntrain = train_count(run, sets.front());
  const auto name = run.cfg["eval"]["name"].get<std::string>();
  std::vector<std::pair<std::string, analysis::Predictor>> models{
      {name, [&ens](const Tensor& a) { return ensemble_predict(ens, a); }}};
  const auto rows = analysis::superres_eval(models, sets, ntrain, sets.front().count(), run.threads);
  analysis::write_sweep_csv(rows, run.out / "metrics.csv");
  write_manifest(run, {{"checkpoint", run.cfg["eval"]["checkpoint"]}, {"rows", rows.size()}});
}

void cmd_analyze(const Run& run) {
  const auto& a = run.cfg["analyze"];
  const auto kind = a["kind"].get<std::string>();
  if (kind == "fprinciple") {
    const auto& f = a["fprinciple"];
    analysis::FPrincipleConfig c;
    c.points = f["points"];
    c.hidden = f["hidden"];
    c.learning_rate = f["lr"];
    c.init_std = f["init_std"];
    c.max_steps = f["max_steps"];
    c.record_every = f["record_every"];
    c.threshold = f["threshold"];
    const auto opt = f["optimizer"].get<std::string>(), loss = f["loss"].get<std::string>();
    if (opt != "adam" && opt != "gd") throw ConfigError("analyze.fprinciple.optimizer must be adam or gd");
    if (loss != "mean" && loss != "half_sum") throw ConfigError("analyze.fprinciple.loss must be mean or half_sum");
    c.optimizer = opt == "adam" ? analysis::FPrincipleConfig::Optimizer::adam
                                : analysis::FPrincipleConfig::Optimizer::gradient_descent;
    c.loss = loss == "mean" ? analysis::FPrincipleConfig::Loss::mean_squared
                            : analysis::FPrincipleConfig::Loss::half_sum_squared;
    auto summary = open_out(run.out / "fprinciple_summary.csv");
    summary << "seed,low_step,high_step,ordering_holds\n";
    std::size_t holds = 0;
    const auto seeds = f["seeds"].get<std::vector<std::uint64_t>>();
    for (auto s : seeds) {
      c.seed = s;
      const auto r = analysis::fprinciple_experiment(c);
      analysis::write_trace_csv(r.band_trace(), run.out / ("fprinciple_seed" + std::to_string(s) + ".csv"));
      auto step = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); };
      summary << s << ',' << step(r.low_step) << ',' << step(r.high_step) << ',' << r.ordering_holds() << '\n';
      holds += r.ordering_holds();
    }
    write_manifest(run, {{"kind", kind}, {"seeds", seeds.size()}, {"ordering_holds", holds}});
  } else if (kind == "bands") {
    const auto ens = load_checkpoint(a["checkpoint"]);
    const auto sets = eval_sets(run);
    const std::size_t ntrain = train_count(run, sets.front());
    auto out = open_out(run.out / "bands.csv");
    out << "resolution,band_lo,band_hi,rel_err\n";
    for (const auto& ds : sets) {
      auto edges = a["edges"].get<std::vector<double>>();
      if (edges.empty()) edges = analysis::default_band_edges(ds.grid());
      const auto e = analysis::mean_band_error([&ens](const Tensor& x) { return ensemble_predict(ens, x); }, ds,
                                               ntrain, ds.count(), edges);
      for (std::size_t b = 0; b < e.size(); ++b) {
        if (e[b]) out << ds.grid().front() << ',' << edges[b] << ',' << edges[b + 1] << ',' << *e[b] << '\n';
      }
    }
    write_manifest(run, {{"kind", kind}, {"checkpoint", a["checkpoint"]}});
  } else {
    throw ConfigError("analyze.kind must be bands or fprinciple");
  }
}

void cmd_mg_solve(const Run& run) {
  const auto& m = run.cfg["mg"];
  const auto nodes = m["nodes"].get<Shape>();
  if (nodes.empty() || nodes.size() > 2) throw ConfigError("mg.nodes must have one or two entries");
  const auto bname = m["boundary"].get<std::string>();
  if (bname != "dirichlet" && bname != "periodic") throw ConfigError("mg.boundary must be dirichlet or periodic");
  const Boundary boundary = bname == "dirichlet" ? Boundary::dirichlet : Boundary::periodic;
  const auto seed = run.cfg["seed"].get<std::uint64_t>();

  Tensor f(nodes);
  const auto rhs = m["rhs"].get<std::string>();
  if (rhs == "ones") {
    for (auto& v : f.data()) v = 1.0;
  } else if (rhs == "random") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& v : f.data()) v = u(rng);
  } else {
    throw ConfigError("mg.rhs must be ones or random");
  }
  std::optional<Tensor> coef;
  const auto cname = m["coefficient"].get<std::string>();
  if (cname == "darcy") {
    if (nodes.size() != 2 || nodes[0] != nodes[1]) throw ConfigError("mg.coefficient=darcy needs a square 2D grid");
    coef = data::darcy_generate(data::DarcySpec{}, nodes[0], seed).first;
  } else if (cname != "one") {
    throw ConfigError("mg.coefficient must be one or darcy");
  }
  const StencilSystem sys(nodes, boundary, f, coef);
  MgConfig cfg;
  cfg.levels = m["levels"];
  cfg.pre_smooth = m["pre_smooth"];
  cfg.post_smooth = m["post_smooth"];
  cfg.omega = m["omega"];
  cfg.max_cycles = m["max_cycles"];

  // Local smoothing curve of weighted Jacobi: measured factor per sine mode.
  const double jw = m["jacobi_omega"];
  const std::size_t n = nodes[0];
  if (n >= 3) {
    auto out = open_out(run.out / "theta_mu.csv");
    out << "theta,mu_loc\n";
    for (std::size_t p = 1; p + 1 < n; ++p) {
      const double theta = std::numbers::pi * static_cast<double>(p) / static_cast<double>(n - 1);
      out << theta << ',' << convergence_factor(n, p, jw) << '\n';
    }
  }

  MgResult res;
  std::string status = "converged";
  try {
    res = mg_solve(sys, m["tol"], cfg);
  } catch (const NonConvergence& e) {
    res.residual_history = e.residual_history();
    status = "not converged";
  }
  auto hist = open_out(run.out / "residual_history.csv");
  hist << "cycle,relative_residual\n";
  for (std::size_t k = 0; k < res.residual_history.size(); ++k) hist << k << ',' << res.residual_history[k] << '\n';
  if (status == "converged") archive_write({{"u", res.u}}, run.out / "solution.mgft");
  const Multigrid mg(sys, cfg);
  write_manifest(run, {{"status", status},
                       {"levels", mg.levels()},
                       {"omega", cfg.smoothing_weight(nodes.size())},
                       {"cycles", res.residual_history.empty() ? 0 : res.residual_history.size() - 1},
                       {"final_residual", res.residual_history.empty() ? json(nullptr) : json(res.residual_history.back())}});
  if (status != "converged") throw std::runtime_error("multigrid did not reach the tolerance");
}

void fail(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multigrid Fourier neural operator lab"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::vector<std::string> sets;
  bool deterministic = false;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"generate", "Generate index-aligned datasets at every resolution"},
      {"train", "Train an FNO, FNO-skip or three-level MgFNO"},
      {"eval", "Relative L2 test error of a checkpoint per resolution"},
      {"analyze", "Band errors of a checkpoint or the spectral-bias experiment"},
      {"mg-solve", "Classical multigrid solve with convergence report"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--set", sets, "Override a config key, e.g. --set train.lr=5e-4");
    sub->add_flag("--deterministic", deterministic, "Single-threaded, fixed batch order");
    sub->add_option("--out", out_dir, "Output directory")->required();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail("usage", e.what());
    return 2;
  }

  Run run;
  run.command = app.get_subcommands().front()->get_name();
  run.deterministic = deterministic;
  run.out = out_dir;
  try {
    run.cfg = default_config();
    std::ifstream in(config_path);
    const json user = json::parse(in, nullptr, false);
    if (user.is_discarded()) throw ConfigError("config " + config_path + " is not valid JSON");
    merge(run.cfg, user, "");
    for (const auto& s : sets) apply_override(run.cfg, s);
    run.threads = deterministic ? 1 : default_threads();
    is_burgers(run);
  } catch (const std::exception& e) {
    fail("config", e.what());
    return 2;
  }

  try {
    fs::create_directories(run.out);
    const auto t0 = std::chrono::steady_clock::now();
    if (run.command == "generate") cmd_generate(run);
    else if (run.command == "train") cmd_train(run);
    else if (run.command == "eval") cmd_eval(run);
    else if (run.command == "analyze") cmd_analyze(run);
    else cmd_mg_solve(run);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << json{{"status", "ok"}, {"command", run.command}, {"out", run.out.string()}, {"seconds", secs}}.dump()
              << std::endl;
  } catch (const ConfigError& e) {
    fail("config", e.what());
    return 2;
  } catch (const json::type_error& e) {
    fail("config", e.what());
    return 2;
  } catch (const std::exception& e) {
    fail("runtime", e.what());
    return 1;
  }
  return 0;
}
