// harnack_lab: run Harnack scenarios, refinement studies, list bundled configs.
//
// Exit codes: 0 every verdict holds, 1 configuration or numerical error,
// 2 a monitored bound (or a refinement order) failed.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hlab/errors.hpp"
#include "hlab/registry.hpp"
#include "hlab/runner.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<double> tolerance;
  std::optional<std::size_t> max_steps;
  bool quiet = false;
  int levels = 3;
};

hlab::RunOptions options_from(const Flags& f) {
  hlab::RunOptions o;
  if (!f.out.empty()) o.out_dir = f.out;
  o.tolerance = f.tolerance;
  o.max_steps = f.max_steps;
  o.quiet = f.quiet;
  return o;
}

int do_run(const Flags& f) {
  const auto start = std::chrono::steady_clock::now();
  const hlab::ScenarioConfig config = hlab::load_scenario(f.config);
  const hlab::RunOptions opts = options_from(f);
  const hlab::RunReport report = hlab::run_scenario(config, opts);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!f.quiet) {
    std::cout << hlab::summary_text(report);
    std::cout << "wrote " << (opts.out_dir ? *opts.out_dir : hlab::default_output_dir(config)).string()
              << " in " << secs << " s\n";
  }
  return hlab::exit_code(report);
}

int do_study(const Flags& f) {
  const hlab::ScenarioConfig config = hlab::load_scenario(f.config);
  const hlab::RunOptions opts = options_from(f);
  const hlab::StudyReport report = hlab::convergence_study(config, f.levels, opts);
  const auto dir = opts.out_dir ? *opts.out_dir : hlab::default_output_dir(config) / "study";
  hlab::write_study(report, dir);
  if (!f.quiet) std::cout << hlab::summary_text(report);
  return hlab::exit_code(report);
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("config", f.config, "scenario file or bundled scenario name")->required();
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--tolerance", f.tolerance, "absolute part of the bound tolerance");
  cmd->add_option("--max-steps", f.max_steps, "refuse runs needing more time steps");
  cmd->add_flag("--quiet", f.quiet, "no summary on stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harnack inequality lab for Ricci-type flows"};
  app.require_subcommand(1);
  Flags flags;

  auto* run = app.add_subcommand("run", "run a scenario and write its report");
  add_common(run, flags);
  auto* study = app.add_subcommand("study", "refinement study over N, 2N, 4N, ...");
  add_common(study, flags);
  study->add_option("--levels", flags.levels, "number of resolutions (>= 3)")->default_val(3);
  auto* list = app.add_subcommand("list", "list bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (list->parsed()) {
      std::cout << hlab::list_scenarios();
      return 0;
    }
    if (run->parsed()) return do_run(flags);
    if (study->parsed()) return do_study(flags);
  } catch (const hlab::Error& e) {
    std::cerr << "harnack_lab: " << hlab::to_string(e.kind()) << " error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "harnack_lab: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
