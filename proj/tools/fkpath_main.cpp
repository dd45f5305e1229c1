#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "fkpath/builtin_models.hpp"
#include "fkpath/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fkpath - continuous-time weighted-path particle engine"};
  app.require_subcommand(1);

  std::string run_config;
  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", run_config, "JSON config file")->required();

  CLI::App* models = app.add_subcommand("models", "list built-in models");

  std::string validate_config;
  CLI::App* validate = app.add_subcommand("validate", "check a config file without running it");
  validate->add_option("config", validate_config, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (run->parsed()) return fkpath::run_config_file(run_config);
  if (validate->parsed()) return fkpath::validate_config_file(validate_config);
  if (models->parsed()) {
    for (const fkpath::BuiltinEntry& entry : fkpath::builtin_catalog()) {
      std::cout << entry.name << "\n  " << entry.summary << "\n  potential_sup: "
                << entry.potential_sup << "\n  config fragment: " << entry.config_fragment.dump()
                << "\n";
    }
    return 0;
  }
  return 2;
}
