#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "enkbf/cli.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  int seeds = -1;
  std::uint64_t master_seed = 0;
  bool master_seed_set = false;
  int threads = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* config_opt =
      cmd->add_option("--config", flags.config_path, "experiment config file");
  if (config_required) config_opt->required();
  cmd->add_option("--out", flags.out_dir, "output directory override");
  cmd->add_option("--seeds", flags.seeds, "seed count override");
  cmd->add_option("--master-seed", flags.master_seed,
                  "master seed override")
      ->each([&flags](const std::string&) { flags.master_seed_set = true; });
  cmd->add_option("--threads", flags.threads,
                  "worker threads (0 = auto; ENKBF_LAB_THREADS wins)");
}

enkbf::ExperimentConfig load_config(const CommonFlags& flags) {
  enkbf::ExperimentConfig config =
      enkbf::ExperimentConfig::from_file(flags.config_path);
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (flags.seeds > 0) config.seeds = flags.seeds;
  if (flags.master_seed_set) config.master_seed = flags.master_seed;
  if (flags.threads >= 0) config.threads = flags.threads;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble Kalman filtering laboratory"};
  app.require_subcommand(1);

  CommonFlags converge_flags, accuracy_flags, wellposed_flags;
  auto* converge = app.add_subcommand(
      "converge", "discrete-to-continuous coupling error vs step size");
  add_common(converge, converge_flags, true);
  auto* accuracy = app.add_subcommand(
      "accuracy", "filter error against the reference trajectory");
  add_common(accuracy, accuracy_flags, true);
  auto* wellposed = app.add_subcommand(
      "wellposed", "covariance-trace stopping probabilities");
  add_common(wellposed, wellposed_flags, true);
  app.add_subcommand("selftest", "fixed-seed invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (converge->parsed()) {
      return enkbf::cmd_converge(load_config(converge_flags), std::cout);
    }
    if (accuracy->parsed()) {
      return enkbf::cmd_accuracy(load_config(accuracy_flags), std::cout);
    }
    if (wellposed->parsed()) {
      return enkbf::cmd_wellposed(load_config(wellposed_flags), std::cout);
    }
    return enkbf::cmd_selftest(std::cout);
  } catch (const enkbf::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
