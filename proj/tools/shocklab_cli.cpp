#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "shocklab/experiment.hpp"

using namespace shocklab;

int main(int argc, char** argv) {
  CLI::App app{"Planar viscous shock stability experiments"};
  app.require_subcommand(1);

  std::string config, out_root = default_output_root().string(), run_dir, report_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_min;
  int threads = 0;
  bool allow_inadmissible = false, inject_broken = false, empty_corpus = false;

  auto* run = app.add_subcommand("run", "Simulate one configuration and check the stability estimates");
  run->add_option("config,--config", config, "INI experiment file")->required();
  run->add_option("--out", out_root, "Output root; the run goes to <out>/<name> (default $SHOCKLAB_OUT or runs)");
  run->add_option("--seed", seed, "Override the initial-data seed");
  run->add_option("--threads", threads, "OpenMP threads (0 keeps the default)");
  run->add_option("--tmin", t_min, "Start of the decay-fit window");
  run->add_flag("--allow-inadmissible", allow_inadmissible, "Run even when a hypothesis gate fails");

  auto* lemmas = app.add_subcommand("verify-lemmas", "Run the inequality verification corpus");
  lemmas->add_option("--out", out_root, "Output root for lemma_report.json");
  lemmas->add_option("--report", report_path, "Explicit report path");
  lemmas->add_option("--seed", seed, "Seed of the random trigonometric fixtures");
  lemmas->add_flag("--inject-broken", inject_broken, "Halve one right-hand side (negative control)");
  lemmas->add_flag("--empty-corpus", empty_corpus, "Run with no fixtures (must fail)");

  auto* report = app.add_subcommand("report", "Rebuild summary and plot data of a finished run");
  report->add_option("run_dir,--run-dir", run_dir, "Run directory")->required();
  report->add_option("--tmin", t_min, "Refit the decay over t >= tmin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  if (*run) {
    RunOptions o;
    o.out_root = out_root;
    o.seed = seed;
    o.threads = threads;
    o.allow_inadmissible = allow_inadmissible;
    o.t_min = t_min;
    return cmd_run(config, o, std::cout, std::cerr);
  }
  if (*lemmas) {
    LemmaSuiteOptions o;
    if (seed) o.seed = *seed;
    o.inject_broken = inject_broken;
    o.empty_corpus = empty_corpus;
    const std::filesystem::path path =
        report_path.empty() ? std::filesystem::path(out_root) / "lemma_report.json" : std::filesystem::path(report_path);
    return cmd_verify_lemmas(path, o, std::cout, std::cerr);
  }
  return cmd_report(run_dir, t_min, std::cout, std::cerr);
}
