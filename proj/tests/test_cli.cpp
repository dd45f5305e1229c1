#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fkpath/builtin_models.hpp"
#include "fkpath/config.hpp"
#include "fkpath/experiments.hpp"
#include "fkpath/parallel.hpp"

using namespace fkpath;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("fkpath_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string minimal_config(const std::string& experiment, const std::string& extra_params = "",
                           const std::string& outdir = "out") {
  return std::string("{\n") + "  \"experiment\": \"" + experiment + "\",\n" +
         "  \"model\": {\"builtin\": \"m2\"},\n" +
         "  \"params\": {\"n\": 3, \"t\": 1.0, \"replicas\": 400, \"seed\": 9" + extra_params +
         "},\n" + "  \"init\": {\"kind\": \"dirac\", \"state\": 0},\n" +
         "  \"output\": {\"directory\": \"" + outdir + "\", \"formats\": [\"csv\", \"json\"]}\n" +
         "}\n";
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const ExperimentConfig cfg = parse_config_text(minimal_config("oracle"));
  CHECK(cfg.experiment == ExperimentConfig::Experiment::oracle);
  CHECK(cfg.seed == 9);
  CHECK(cfg.n == 3);
  CHECK(cfg.write_csv);
  CHECK(cfg.write_json);

  // seed is mandatory
  CHECK_THROWS_AS(parse_config_text("{\"experiment\":\"oracle\",\"model\":{\"builtin\":\"m2\"},"
                                    "\"params\":{\"n\":3}}"),
                  ConfigError);

  // n >= 2, message names the violated bound and the line
  try {
    parse_config_text("{\"experiment\":\"simulate\",\n \"model\":{\"builtin\":\"m2\"},\n"
                      " \"params\":{\"n\": 1, \"seed\": 3}}");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(">= 2") != std::string::npos);
    CHECK(e.line == 3);
  }

  // malformed JSON carries a line anchor
  try {
    parse_config_text("{\n  \"experiment\": \"oracle\",\n  broken\n}");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line >= 2);
  }

  CHECK_THROWS_AS(parse_config_text(minimal_config("no-such-experiment")), ConfigError);
}

TEST_CASE("model building from config fragments") {
  const BuiltModel m2 = build_model({{"builtin", "m2"}}, 1.0);
  CHECK(m2.finite != nullptr);
  CHECK(m2.finite->n_states() == 2);

  const nlohmann::json explicit_model = {
      {"kind", "finite-ctmc"},
      {"rate_matrix", {{-1.0, 1.0}, {2.0, -2.0}}},
      {"potential", {{"kind", "constant-vector"}, {"values", {0.0, 1.0}}}}};
  const BuiltModel custom = build_model(explicit_model, 1.0);
  REQUIRE(custom.finite != nullptr);
  CHECK(custom.finite->rate_sup() == 2.0);
  CHECK(custom.finite->potential(0.0, 1) == 1.0);

  CHECK_THROWS_AS(build_model({{"builtin", "nope"}}, 1.0), ConfigError);

  // every catalog entry loads as a valid model section
  for (const BuiltinEntry& entry : builtin_catalog()) {
    const BuiltModel built = build_model(entry.config_fragment, 1.0);
    CHECK(built.model != nullptr);
    CHECK(built.model->potential_sup() == entry.potential_sup);
  }
}

TEST_CASE("experiments write byte-identical outputs for a fixed seed") {
  const fs::path dir_a = temp_dir("det_a");
  const fs::path dir_b = temp_dir("det_b");

  ExperimentConfig cfg = parse_config_text(minimal_config("simulate"));
  cfg.out_dir = dir_a;
  cfg.threads = 1;
  const ExperimentOutcome a = run_experiment(cfg);
  cfg.out_dir = dir_b;
  cfg.threads = 2;  // thread count must not affect the bytes
  const ExperimentOutcome b = run_experiment(cfg);

  CHECK(a.all_pass());
  CHECK(b.all_pass());
  CHECK(read_file(dir_a / "replicas.csv") == read_file(dir_b / "replicas.csv"));
  CHECK(read_file(dir_a / "simulate_summary.json") == read_file(dir_b / "simulate_summary.json"));
  CHECK(read_file(dir_a / "replicas.csv").rfind("# fkpath-schema v1", 0) == 0);

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("oracle experiment emits the solution record") {
  const fs::path dir = temp_dir("oracle");
  ExperimentConfig cfg = parse_config_text(minimal_config("oracle"));
  cfg.out_dir = dir;
  const ExperimentOutcome out = run_experiment(cfg);
  CHECK(out.all_pass());

  const nlohmann::json record = nlohmann::json::parse(read_file(dir / "oracle.json"));
  CHECK(record.at("z").get<double>() == doctest::Approx(0.822263423901809).epsilon(1e-9));
  CHECK(record.at("gamma").size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("conditional simulate reports the target histogram") {
  const fs::path dir = temp_dir("cond");
  ExperimentConfig cfg = parse_config_text(minimal_config("simulate"));
  cfg.system = "conditional";
  cfg.replicas = 3000;
  cfg.out_dir = dir;
  const ExperimentOutcome out = run_experiment(cfg);
  CHECK(out.all_pass());
  const nlohmann::json summary =
      nlohmann::json::parse(read_file(dir / "simulate_summary.json"));
  CHECK(summary.at("target_histogram").contains("frozen"));
  CHECK(summary.at("expected").get<double>() == doctest::Approx(2.0 / 3.0));
  fs::remove_all(dir);
}

TEST_CASE("FKPATH_THREADS overrides the configured worker count") {
  unsetenv("FKPATH_THREADS");
  CHECK(resolve_thread_count(4) == 4);
  setenv("FKPATH_THREADS", "3", 1);
  CHECK(resolve_thread_count(4) == 3);
  unsetenv("FKPATH_THREADS");
  CHECK(resolve_thread_count(0) >= 1);
}

TEST_CASE("every shipped config is schema-valid and buildable") {
  const fs::path config_dir = fs::path(FKPATH_SOURCE_DIR) / "configs";
  REQUIRE(fs::exists(config_dir));
  int count = 0;
  for (const auto& entry : fs::directory_iterator(config_dir)) {
    if (entry.path().extension() != ".json") continue;
    INFO(entry.path().string());
    const ExperimentConfig cfg = parse_config_file(entry.path());
    const BuiltModel built = build_model(cfg.model_section, cfg.t);
    CHECK(built.model != nullptr);
    ++count;
  }
  CHECK(count >= 8);
}

TEST_CASE("gibbs experiment dumps paths at the configured cadence") {
  const fs::path dir = temp_dir("gibbs_dump");
  ExperimentConfig cfg = parse_config_text(minimal_config("gibbs"));
  cfg.out_dir = dir;
  cfg.iters = 20;
  cfg.burn_in = 5;
  cfg.dump_paths_every = 5;
  run_experiment(cfg);  // statistical checks on a 20-step chain may fail; only the files matter
  const nlohmann::json dumps = nlohmann::json::parse(read_file(dir / "gibbs_paths.json"));
  CHECK(dumps.size() == 4);
  CHECK(dumps[0].at("iteration").get<int>() == 0);
  CHECK(dumps[0].at("path").contains("events"));
  const std::string trace = read_file(dir / "gibbs_trace.csv");
  CHECK(trace.rfind("# fkpath-schema v1", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("the torus model drives the same simulate pipeline") {
  const fs::path dir = temp_dir("torus");
  ExperimentConfig cfg = parse_config_text(
      "{\"experiment\":\"simulate\",\"model\":{\"builtin\":\"torus1d\"},"
      "\"params\":{\"n\":4,\"t\":0.5,\"replicas\":50,\"seed\":12},"
      "\"init\":{\"kind\":\"uniform\"},"
      "\"output\":{\"directory\":\"ignored\",\"formats\":[\"csv\",\"json\"]}}");
  cfg.out_dir = dir;
  const ExperimentOutcome out = run_experiment(cfg);
  CHECK(out.all_pass());  // only the accumulator cross-check applies off the finite path
  CHECK(fs::exists(dir / "replicas.csv"));
  fs::remove_all(dir);
}

TEST_CASE("run_config_file exit codes") {
  const fs::path dir = temp_dir("exit");
  const fs::path good = dir / "good.json";
  const fs::path bad_n = dir / "bad_n.json";
  const fs::path failing = dir / "failing.json";

  std::ofstream(good) << minimal_config("check-conditions", "", (dir / "out1").string());
  std::ofstream(bad_n) << "{\"experiment\":\"simulate\",\"model\":{\"builtin\":\"m2\"},"
                          "\"params\":{\"n\":1,\"seed\":4}}";
  // no doubling pair in n_list: the declared rate check cannot pass
  std::ofstream(failing) << "{\"experiment\":\"bias-sweep\",\"model\":{\"builtin\":\"m2\"},"
                            "\"params\":{\"n_list\":[2,5],\"replicas\":60,\"seed\":4},"
                            "\"output\":{\"directory\":\"" +
                                (dir / "out2").string() + "\"}}";

  CHECK(run_config_file(good.string()) == 0);
  CHECK(run_config_file(bad_n.string()) == 2);
  CHECK(run_config_file(failing.string()) == 3);
  CHECK(validate_config_file(good.string()) == 0);
  CHECK(validate_config_file(bad_n.string()) == 2);
  fs::remove_all(dir);
}
