// ggs: command-line front end for attacks, ablations, sweeps and probes.

#include <CLI11.hpp>

#include <iostream>

#include "ggs/experiment.hpp"
#include "ggs/verify.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Gradient-guided sampling transfer attacks on toy models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ggs::kVersion));

  ggs::RunOptions options;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  app.add_option("--out", out_dir, "Output root directory (default: $GGS_OUT_DIR, then ./runs)");
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  auto* jobs_opt = app.add_option("--jobs", jobs, "Worker threads (0 = min(examples, cores))");
  app.add_flag("--quiet", options.quiet, "Suppress progress output");

  auto* run = app.add_subcommand("run", "Execute an experiment config");
  std::string config_path;
  run->add_option("config", config_path, "Path to a YAML run config")->required();
  run->fallthrough();

  auto* defaults = app.add_subcommand("defaults", "Print the default attack config");
  defaults->fallthrough();

  auto* verify = app.add_subcommand("verify", "Run the invariant battery");
  std::string fault;
  verify->add_option("--inject-fault", fault, "Test hook: sign-zero makes sign(0) return 1")
      ->check(CLI::IsMember({"sign-zero"}));
  verify->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (!out_dir.empty()) options.out_root = out_dir;
  if (seed_opt->count() > 0) options.seed = seed;
  if (jobs_opt->count() > 0) options.jobs = jobs;

  if (defaults->parsed()) {
    std::cout << ggs::cmd_defaults();
    return 0;
  }

  if (verify->parsed()) {
    if (fault == "sign-zero") ggs::testing_hooks::sign_of_zero = 1;
    const std::size_t threads = options.jobs.value_or(0) == 0 ? ggs::default_jobs() : *options.jobs;
    const ggs::VerifyReport report = ggs::run_verify(threads);
    ggs::print_verify(std::cout, report);
    return report.all_passed() ? 0 : 1;
  }

  const ggs::RunOutcome outcome = ggs::cmd_run(config_path, options);
  if (outcome.exit_code != 0) {
    std::cerr << "error: " << outcome.error << "\n";
    if (!outcome.run_dir.empty()) std::cerr << "partial outputs in " << outcome.run_dir.string() << "\n";
  } else {
    std::cout << outcome.run_dir.string() << "\n";
  }
  return outcome.exit_code;
}
