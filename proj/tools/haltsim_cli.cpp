#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "haltsim/error.hpp"
#include "haltsim/harness.hpp"

namespace hs = haltsim::harness;

int main(int argc, char** argv) {
  CLI::App app{"haltsim: halting-protocol circuit and wave-packet simulator"};
  app.require_subcommand(1);

  std::string config_path, output;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "Run an experiment from a key=value config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--set", overrides, "Override a config key (key=value), repeatable");
  run->add_option("-o,--output", output, "CSV output path");

  bool full = false, inject = false;
  auto* validate = app.add_subcommand("validate", "Run the invariant suite");
  validate->add_flag("--full", full, "Include wave-packet cross-checks");
  validate->add_flag("--inject-fault", inject, "Add a non-unitary gate to exercise the failure path");

  std::string experiment;
  auto* schema = app.add_subcommand("schema", "Print the CSV header of an experiment");
  schema->add_option("experiment", experiment, "Experiment name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = hs::load_config(config_path);
      for (const auto& o : overrides) hs::apply_override(cfg, o);
      if (!output.empty()) cfg.output = output;
      const auto out = hs::run_experiment(cfg);
      std::cout << out.summary << "\nwrote " << out.path << "\n";
      return 0;
    }
    if (*validate) {
      hs::SuiteOptions opt;
      opt.level = full ? hs::Level::full : hs::Level::fast;
      opt.inject_fault = inject;
      opt.on_check = [](const hs::CheckResult& c) {
        std::printf("%s %s: %s [%s] (%.2fs)\n", c.passed ? "PASS" : "FAIL", c.module.c_str(), c.invariant.c_str(),
                    c.observed.c_str(), c.seconds);
        std::fflush(stdout);
      };
      const auto rep = hs::validate_suite(opt);
      if (rep.passed()) return 0;
      return static_cast<int>(haltsim::ErrorCategory::validation);
    }
    std::string line;
    for (const auto& h : hs::schema(experiment)) line += (line.empty() ? "" : ",") + h;
    std::cout << line << "\n";
    return 0;
  } catch (const haltsim::Error& e) {
    std::cerr << "error [" << haltsim::category_name(e.category()) << "] " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
