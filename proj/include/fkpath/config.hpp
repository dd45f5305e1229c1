#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "fkpath/estimators.hpp"
#include "fkpath/model.hpp"

#include "json.hpp"

namespace fkpath {

// Config rejection with the 1-based line of the offending key when it can be
// located in the source text.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line_no)
      : std::runtime_error(line_no > 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg),
        line(line_no) {}
  int line = 0;
};

struct ExperimentConfig {
  enum class Experiment { oracle, simulate, duality, gibbs, bias_sweep, jarzynski, check_conditions };

  Experiment experiment = Experiment::oracle;
  nlohmann::json model_section;

  int n = 2;
  double t = 1.0;
  int replicas = 1000;
  int iters = 1000;
  int burn_in = 100;
  std::vector<int> n_list;
  std::uint64_t seed = 0;  // mandatory in the file: no nondeterministic defaults
  InitialLaw init = InitialLaw::dirac(0);

  std::filesystem::path out_dir = "out";
  bool write_csv = true;
  bool write_json = true;
  int threads = 0;  // 0: FKPATH_THREADS env, then hardware

  std::string system = "mean_field";  // simulate: which engine to drive
  int dump_paths_every = 0;           // gibbs: JSON path dump cadence, 0 = off
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& file);

// A model built from a config "model" section. `finite` is set when the model
// is a finite chain (the exact solver applies); `schedule` when the section
// describes a free-energy schedule family.
struct BuiltModel {
  std::shared_ptr<Model> model;
  std::shared_ptr<FiniteCtmcModel> finite;
  std::unique_ptr<ScheduleFamily> schedule;
};

BuiltModel build_model(const nlohmann::json& model_section, double horizon);

const char* experiment_name(ExperimentConfig::Experiment e);

}  // namespace fkpath
