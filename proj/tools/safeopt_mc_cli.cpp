#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "safeopt_mc/experiment.hpp"

namespace {

safeopt_mc::io::ExperimentConfig resolve(const std::string& file, const std::optional<std::uint64_t>& seed,
                                         const std::optional<std::string>& out) {
  auto c = safeopt_mc::io::load_config(file);
  if (seed) c.seeds = {*seed};
  if (out) c.output_dir = *out;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe Bayesian optimization with multiple constraints"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool dry_run = false;
  app.add_option("--seed", seed, "Run only this root seed");
  app.add_option("--out", out, "Output directory (overrides the config)");
  app.add_flag("--dry-run", dry_run, "Print the resolved configuration and exit");

  std::string run_config, oracle_config, trace_dir;
  auto* run = app.add_subcommand("run", "Run a seeded experiment and write traces and summaries");
  run->add_option("config", run_config, "Experiment config (JSON)")->required();
  auto* summarize = app.add_subcommand("summarize", "Aggregate the traces in a directory");
  summarize->add_option("dir", trace_dir, "Directory with trace_seed*.csv files")->required();
  auto* oracle = app.add_subcommand("oracle", "Safely reachable set and baseline optimum of a synthetic config");
  oracle->add_option("config", oracle_config, "Experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto c = resolve(run_config, seed, out);
      if (dry_run) {
        std::cout << safeopt_mc::io::to_json(c).dump(2) << '\n';
        return 0;
      }
      const bool ok = safeopt_mc::run_experiment(c, c.output_dir);
      const auto report = safeopt_mc::summarize(c.output_dir);
      std::cout << report.dump(2) << '\n';
      if (!ok) {
        std::cerr << "error: at least one run failed; see the summaries in " << c.output_dir << '\n';
        return 3;
      }
      return 0;
    }
    if (*summarize) {
      std::cout << safeopt_mc::summarize(trace_dir).dump(2) << '\n';
      return 0;
    }
    if (*oracle) {
      const auto c = resolve(oracle_config, seed, out);
      if (dry_run) {
        std::cout << safeopt_mc::io::to_json(c).dump(2) << '\n';
        return 0;
      }
      std::optional<std::filesystem::path> dir;
      if (out) dir = *out;
      std::cout << safeopt_mc::oracle_report(c, dir).dump(2) << '\n';
      return 0;
    }
  } catch (const safeopt_mc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
