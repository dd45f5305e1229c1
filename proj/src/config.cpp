#include "fkpath/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "fkpath/builtin_models.hpp"

namespace fkpath {

namespace {

thread_local const std::string* g_config_text = nullptr;

// 1-based line of the first occurrence of "key" in the config text; 0 when it
// cannot be located (useful enough to anchor schema messages to the file).
int line_of_key(const std::string& key) {
  if (g_config_text == nullptr) return 0;
  const std::string needle = "\"" + key + "\"";
  const auto pos = g_config_text->find(needle);
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(g_config_text->begin(),
                                         g_config_text->begin() + static_cast<long>(pos), '\n'));
}

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw ConfigError(msg, line_of_key(key));
}

int line_of_offset(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

ExperimentConfig::Experiment parse_experiment(const std::string& name) {
  using E = ExperimentConfig::Experiment;
  if (name == "oracle") return E::oracle;
  if (name == "simulate") return E::simulate;
  if (name == "duality") return E::duality;
  if (name == "gibbs") return E::gibbs;
  if (name == "bias-sweep") return E::bias_sweep;
  if (name == "jarzynski") return E::jarzynski;
  if (name == "check-conditions") return E::check_conditions;
  fail("experiment",
       "experiment must be one of oracle|simulate|duality|gibbs|bias-sweep|jarzynski|"
       "check-conditions, got \"" +
           name + "\"");
}

InitialLaw parse_init(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "dirac");
  if (kind == "dirac") {
    const auto& s = j.at("state");
    if (s.is_number_integer()) return InitialLaw::dirac(s.get<int>());
    return InitialLaw::dirac(s.get<TorusPoint>());
  }
  if (kind == "categorical") return InitialLaw::categorical(j.at("weights").get<std::vector<double>>());
  if (kind == "uniform") return InitialLaw::uniform();
  fail("init", "init.kind must be dirac|categorical|uniform, got \"" + kind + "\"");
}

}  // namespace

const char* experiment_name(ExperimentConfig::Experiment e) {
  using E = ExperimentConfig::Experiment;
  switch (e) {
    case E::oracle: return "oracle";
    case E::simulate: return "simulate";
    case E::duality: return "duality";
    case E::gibbs: return "gibbs";
    case E::bias_sweep: return "bias-sweep";
    case E::jarzynski: return "jarzynski";
    case E::check_conditions: return "check-conditions";
  }
  return "?";
}

ExperimentConfig parse_config_text(const std::string& text) {
  g_config_text = &text;
  struct Reset {
    ~Reset() { g_config_text = nullptr; }
  } reset;

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what(),
                      line_of_offset(text, e.byte));
  }

  ExperimentConfig cfg;
  if (!j.contains("experiment")) fail("experiment", "config must declare an experiment");
  cfg.experiment = parse_experiment(j.at("experiment").get<std::string>());
  if (!j.contains("model")) fail("model", "config must declare a model section");
  cfg.model_section = j.at("model");

  if (!j.contains("params") || !j.at("params").is_object())
    fail("params", "config must declare a params object");
  const auto& p = j.at("params");
  if (!p.contains("seed")) fail("params", "params.seed is mandatory: runs must be reproducible");
  cfg.seed = p.at("seed").get<std::uint64_t>();

  cfg.n = p.value("n", cfg.n);
  cfg.t = p.value("t", cfg.t);
  cfg.replicas = p.value("replicas", cfg.replicas);
  cfg.iters = p.value("iters", cfg.iters);
  cfg.burn_in = p.value("burn_in", cfg.burn_in);
  if (p.contains("n_list")) cfg.n_list = p.at("n_list").get<std::vector<int>>();

  using E = ExperimentConfig::Experiment;
  const bool needs_n = cfg.experiment == E::simulate || cfg.experiment == E::duality ||
                       cfg.experiment == E::gibbs || cfg.experiment == E::jarzynski;
  if (needs_n && cfg.n < 2) fail("n", "params.n must be >= 2 (got " + std::to_string(cfg.n) + ")");
  if (cfg.experiment == E::bias_sweep) {
    if (cfg.n_list.empty()) fail("n_list", "bias-sweep needs a nonempty params.n_list");
    for (int n : cfg.n_list)
      if (n < 2) fail("n_list", "every bias-sweep system size must be >= 2 (got " + std::to_string(n) + ")");
  }
  if (!(cfg.t >= 0.0)) fail("t", "params.t must be >= 0");
  if (cfg.replicas < 1) fail("replicas", "params.replicas must be >= 1");
  if (cfg.iters < 1) fail("iters", "params.iters must be >= 1");
  if (cfg.burn_in < 0) fail("burn_in", "params.burn_in must be >= 0");

  if (j.contains("init")) cfg.init = parse_init(j.at("init"));

  if (j.contains("output")) {
    const auto& o = j.at("output");
    cfg.out_dir = o.value("directory", std::string("out"));
    if (o.contains("formats")) {
      cfg.write_csv = false;
      cfg.write_json = false;
      for (const auto& f : o.at("formats")) {
        const std::string name = f.get<std::string>();
        if (name == "csv")
          cfg.write_csv = true;
        else if (name == "json")
          cfg.write_json = true;
        else
          fail("formats", "output.formats entries must be csv or json, got \"" + name + "\"");
      }
    }
  }

  cfg.threads = j.value("threads", 0);
  if (cfg.threads < 0) fail("threads", "threads must be >= 0");
  cfg.system = j.value("system", cfg.system);
  if (cfg.system != "mean_field" && cfg.system != "conditional")
    fail("system", "system must be mean_field or conditional, got \"" + cfg.system + "\"");
  cfg.dump_paths_every = j.value("dump_paths_every", 0);
  if (cfg.dump_paths_every < 0) fail("dump_paths_every", "dump_paths_every must be >= 0");
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string(), 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

FiniteCtmcModel::PotentialFn parse_potential(const nlohmann::json& pot, double& sup_out,
                                             bool& time_constant_out) {
  const std::string kind = pot.at("kind").get<std::string>();
  time_constant_out = true;
  if (kind == "constant-vector") {
    const auto values = pot.at("values").get<std::vector<double>>();
    for (double v : values)
      if (!(v >= 0.0)) fail("values", "potential values must be nonnegative");
    sup_out = pot.contains("potential_sup") ? pot.at("potential_sup").get<double>()
                                            : *std::max_element(values.begin(), values.end());
    return [values](double, int x) { return values.at(static_cast<std::size_t>(x)); };
  }
  if (kind == "linear-in-state") {
    const double intercept = pot.value("intercept", 0.0);
    const double slope = pot.at("slope").get<double>();
    if (!pot.contains("potential_sup"))
      fail("potential_sup", "linear-in-state potential needs an explicit potential_sup");
    sup_out = pot.at("potential_sup").get<double>();
    return [intercept, slope](double, int x) { return intercept + slope * x; };
  }
  fail("potential", "potential.kind must be constant-vector or linear-in-state, got \"" + kind + "\"");
}

}  // namespace

BuiltModel build_model(const nlohmann::json& model_section, double horizon) {
  BuiltModel out;
  if (model_section.contains("builtin")) {
    const std::string name = model_section.at("builtin").get<std::string>();
    if (name == "m2") {
      out.finite = std::make_shared<FiniteCtmcModel>(make_m2());
    } else if (name == "ring4") {
      out.finite = std::make_shared<FiniteCtmcModel>(make_ring4());
    } else if (name == "jarzynski2") {
      const double rate = model_section.value("beta_rate", 1.0);
      const double power = model_section.value("power", 1.0);
      out.schedule =
          std::make_unique<ScheduleFamily>(make_two_state_schedule(rate, power, horizon));
      out.finite = std::make_shared<FiniteCtmcModel>(make_schedule_model(*out.schedule, horizon));
    } else if (name == "torus1d") {
      out.model = std::make_shared<TorusDiffusionModel>(
          make_torus1d(model_section.value("drift_amplitude", 0.5),
                       model_section.value("diffusion_coeff", 0.7),
                       model_section.value("euler_step", 0.01)));
      return out;
    } else {
      fail("builtin", "unknown builtin model \"" + name + "\" (see `fkpath models`)");
    }
    out.model = out.finite;
    return out;
  }

  const std::string kind = model_section.value("kind", "");
  if (kind != "finite-ctmc")
    fail("model", "model section needs either a builtin name or kind=finite-ctmc");

  const auto rows = model_section.at("rate_matrix").get<std::vector<std::vector<double>>>();
  const int n = static_cast<int>(rows.size());
  if (n < 2) fail("rate_matrix", "rate_matrix must be at least 2x2");
  Eigen::MatrixXd rates(n, n);
  double max_exit = 0.0;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
      fail("rate_matrix", "rate_matrix must be square");
    double exit = 0.0;
    for (int j = 0; j < n; ++j) {
      rates(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (i != j) exit += rates(i, j);
    }
    max_exit = std::max(max_exit, exit);
  }
  const double rate_sup = model_section.value("rate_sup", max_exit);

  double pot_sup = 0.0;
  bool pot_const = true;
  auto pot_fn = parse_potential(model_section.at("potential"), pot_sup, pot_const);

  out.finite = std::make_shared<FiniteCtmcModel>(
      StateSpace::finite(n), [rates](double) { return rates; }, rate_sup, std::move(pot_fn),
      pot_sup, pot_const, /*rates_time_constant=*/true, model_section.dump());
  out.model = out.finite;
  return out;
}

}  // namespace fkpath
