#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "hgfc/experiment.hpp"
#include "hgfc/model.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir = "out";
  double delta = -1.0;
  double epsilon = -1.0;
  std::int64_t seed = -1;
  std::string algorithm;
  std::string benchmark;
  int trials = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "experiment config JSON");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--delta", flags.delta, "slot width override");
  cmd->add_option("--epsilon", flags.epsilon, "speed-augmentation parameter override");
  cmd->add_option("--seed", flags.seed, "RNG seed override");
  cmd->add_option("--algorithm", flags.algorithm, "hdf | alg2 | alg3 | hrdf");
  cmd->add_option("--benchmark", flags.benchmark, "oracle | lp | brute");
  cmd->add_option("--trials", flags.trials, "number of trials override");
}

hgfc::ExperimentConfig make_config(const CommonFlags& flags) {
  hgfc::ExperimentConfig config;
  if (!flags.config_path.empty()) config = hgfc::ExperimentConfig::load(flags.config_path);
  if (flags.delta > 0) config.delta = flags.delta;
  if (flags.epsilon >= 0) config.epsilon = flags.epsilon;
  if (flags.seed >= 0) config.seed = std::uint64_t(flags.seed);
  if (!flags.algorithm.empty()) config.algorithm = flags.algorithm;
  if (!flags.benchmark.empty()) config.benchmark = flags.benchmark;
  if (flags.trials > 0) config.trials = flags.trials;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online job scheduling with general cost functions: generators, "
               "online runs, and duality verification"};
  app.require_subcommand(1);

  CommonFlags gen_flags, run_flags, verify_flags, sweep_flags;
  CLI::App* gen = app.add_subcommand("gen", "generate instance files from a config");
  add_common(gen, gen_flags);
  CLI::App* run = app.add_subcommand("run", "run the configured algorithm and verifier");
  add_common(run, run_flags);
  CLI::App* verify = app.add_subcommand("verify", "re-derive the checks of an existing bundle");
  add_common(verify, verify_flags);
  CLI::App* sweep = app.add_subcommand("sweep", "multi-trial run (alias of run with trials > 1)");
  add_common(sweep, sweep_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      hgfc::ExperimentConfig config = make_config(gen_flags);
      fs::create_directories(fs::path(gen_flags.out_dir) / "instances");
      for (int t = 0; t < config.trials; ++t) {
        char name[32];
        std::snprintf(name, sizeof(name), "trial_%04d.json", t);
        hgfc::gen_instance(config, t).save(
            (fs::path(gen_flags.out_dir) / "instances" / name).string());
      }
      std::printf("wrote %d instance file(s) under %s/instances\n", config.trials,
                  gen_flags.out_dir.c_str());
      return 0;
    }
    if (run->parsed() || sweep->parsed()) {
      const CommonFlags& flags = run->parsed() ? run_flags : sweep_flags;
      hgfc::ExperimentConfig config = make_config(flags);
      hgfc::ExperimentResult result = hgfc::run_experiment(config, flags.out_dir);
      for (const auto& t : result.trials)
        for (const auto& f : t.failures)
          std::fprintf(stderr, "trial %d: %s\n", t.trial, f.c_str());
      std::printf("%d/%d trial(s) passed; bundle under %s\n",
                  int(result.trials.size()) - result.failures, int(result.trials.size()),
                  flags.out_dir.c_str());
      return result.failures == 0 ? 0 : 1;
    }
    if (verify->parsed()) {
      int mismatches = hgfc::verify_bundle(verify_flags.out_dir);
      std::printf("verify: %d mismatch(es)\n", mismatches);
      return mismatches == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
