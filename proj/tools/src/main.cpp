#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "rsopt/errors.hpp"

int main(int argc, char** argv) {
  using namespace rsopt::cli;
  CLI::App app{"Rate-splitting precoder optimization under partial CSIT"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  int jobs = 0;
  for (const char* name : {"solve-one", "esr-sweep", "dof", "m-sweep", "region", "selftest"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat key=value config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--set", overrides, "override section.key=value (repeatable)");
    sub->add_option("--jobs", jobs, "worker threads (overrides harness.jobs)");
  }
  CLI11_PARSE(app, argc, argv);

  try {
    const Command cmd = parse_command(app.get_subcommands().front()->get_name());
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config_file(config_path);
    for (const auto& o : overrides) apply_override(cfg, o);
    if (jobs > 0) cfg.harness.jobs = jobs;
    return run_command(cmd, cfg, out_dir, std::cout);
  } catch (const rsopt::ConfigError& e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rsopt::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
