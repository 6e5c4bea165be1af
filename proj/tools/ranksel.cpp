#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ranksel/experiments.hpp"
#include "ranksel/types.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ranksel: candidate-selection experiments over noisy rankings"};
  app.require_subcommand(1);

  std::string config_path;
  ranksel::CliOverrides overrides;
  uint64_t seed = 0;
  std::string out_path;
  std::string format;

  std::string chosen;
  for (const std::string& kind : ranksel::experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(kind, "run the " + kind + " experiment");
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed, "RNG seed (overrides rng.seed)");
    sub->add_option("--out", out_path, "output file path (overrides output.path)");
    sub->add_option("--format", format, "csv or json (overrides output.format)")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->callback([&, kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommand(chosen);
  if (sub->count("--seed")) overrides.seed = seed;
  if (sub->count("--out")) overrides.out_path = out_path;
  if (sub->count("--format")) overrides.format = format;

  try {
    ranksel::run_experiment(chosen, config_path, overrides, std::cout);
  } catch (const ranksel::capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
