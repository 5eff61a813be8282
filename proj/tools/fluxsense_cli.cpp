// Command-line driver: forward solves, full sequential experiments, presets.

#include "fluxsense/assimilation.hpp"
#include "fluxsense/config.hpp"
#include "fluxsense/output.hpp"

#include <CLI11.hpp>

#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fluxsense;

namespace {

struct Source {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void add_source_options(CLI::App *cmd, Source &src) {
  auto *cfg = cmd->add_option("-c,--config", src.config_path, "Configuration file");
  auto *pre = cmd->add_option("-p,--preset", src.preset_name, "Named preset");
  cfg->excludes(pre);
  cmd->add_option("-s,--seed", src.seed, "Override the master seed");
  cmd->add_option("-o,--out", src.out_dir, "Output directory (overrides output.dir)");
}

ExperimentConfig resolve(const Source &src) {
  ExperimentConfig config;
  if (!src.config_path.empty())
    config = load_config(src.config_path);
  else if (!src.preset_name.empty())
    config = preset(src.preset_name);
  else
    throw ConfigError(0, "either --config or --preset is required");
  if (src.seed)
    config.seed = *src.seed;
  if (!src.out_dir.empty())
    config.output_dir = src.out_dir;
  config.validate();
  return config;
}

int run_one(const ExperimentConfig &config) {
  const auto result = run_experiment(config);
  write_bundle(result, config.output_dir);
  if (result.error) {
    std::cerr << "experiment failed: " << *result.error << '\n';
    return 1;
  }
  for (const auto &rec : result.rounds) {
    std::cout << "round " << rec.round + 1 << " t=" << rec.t_end << " sensors=("
              << rec.sensors.first << "," << rec.sensors.second
              << ") accept=" << rec.summary.acceptance_rate << " mean=["
              << rec.summary.mean.transpose() << "]"
              << (rec.stopped ? " [stop: sensor cycle]" : "") << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Dynamic-sensor Bayesian recovery of a heat source on the unit disc"};
  app.require_subcommand(1);

  Source forward_src;
  auto *forward = app.add_subcommand("forward", "Forward solve with the true source");
  add_source_options(forward, forward_src);

  Source exp_src;
  int replicates = 1;
  auto *experiment = app.add_subcommand("experiment", "Run the sequential inversion");
  add_source_options(experiment, exp_src);
  experiment->add_option("-r,--replicates", replicates,
                         "Independent seeds seed..seed+r-1, run concurrently")
      ->check(CLI::PositiveNumber);

  auto *presets_cmd = app.add_subcommand("presets", "Inspect built-in presets");
  presets_cmd->require_subcommand(1);
  presets_cmd->add_subcommand("list", "List preset names");
  std::string show_name;
  auto *show = presets_cmd->add_subcommand("show", "Print a preset as a config file");
  show->add_option("name", show_name)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*forward) {
      const auto config = resolve(forward_src);
      write_forward_dump(run_forward(config), config.output_dir);
      return 0;
    }
    if (*experiment) {
      const auto config = resolve(exp_src);
      if (replicates == 1)
        return run_one(config);
      std::vector<std::future<int>> jobs;
      for (int r = 0; r < replicates; ++r) {
        auto c = config;
        c.seed = config.seed + static_cast<std::uint64_t>(r);
        c.output_dir = (fs::path(config.output_dir) / ("rep_" + std::to_string(r))).string();
        jobs.push_back(std::async(std::launch::async, [c] { return run_one(c); }));
      }
      int status = 0;
      for (auto &j : jobs)
        status = std::max(status, j.get());
      return status;
    }
    if (presets_cmd->got_subcommand("list")) {
      for (const auto &name : preset_names())
        std::cout << name << '\n';
      return 0;
    }
    if (*show) {
      std::cout << serialize_config(preset(show_name));
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
