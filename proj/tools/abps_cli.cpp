// SPDX-License-Identifier: Apache-2.0
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "abps/csv.hpp"
#include "abps/harness.hpp"
#include "abps/metrics.hpp"

namespace {

struct RunArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
};

void add_run_options(CLI::App& sub, RunArgs& args) {
  sub.add_option("--config", args.config_path, "experiment config file")->required();
  sub.add_option("--out", args.out_dir, "output directory")->required();
  sub.add_option("--seed", args.seed, "override run_seed");
  sub.add_option("--mode", args.mode, "abps | abps-pbt | independent-baseline");
}

int do_run(const RunArgs& args, std::optional<abps::config::Mode> forced_mode) {
  auto cfg = abps::config::load_experiment(args.config_path);
  if (args.seed) cfg.run.run_seed = *args.seed;
  if (args.mode) cfg.mode = abps::config::mode_from_name(*args.mode);
  if (forced_mode) cfg.mode = *forced_mode;
  abps::harness::run_experiment(cfg, args.out_dir);
  return 0;
}

int do_metrics(const std::string& eval_path, const std::string& out_path) {
  const auto rows = abps::csv::eval_from_csv(abps::csv::read_file(eval_path));
  const auto computed = abps::metrics::compute_metrics(rows);
  abps::csv::write_file_atomic(out_path, abps::csv::metrics_to_csv(computed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive behavior policy sharing trainer"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "train with the configured mode");
  add_run_options(*run, run_args);

  RunArgs base_args;
  auto* baseline = app.add_subcommand("baseline", "train each agent independently");
  add_run_options(*baseline, base_args);

  std::string eval_path, metrics_out;
  auto* metrics = app.add_subcommand("metrics", "recompute pool metrics from an eval.csv");
  metrics->add_option("--eval", eval_path, "eval.csv produced by a run")->required();
  metrics->add_option("--out", metrics_out, "metrics.csv destination")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(run_args, std::nullopt);
    if (baseline->parsed()) {
      return do_run(base_args, abps::config::Mode::kIndependentBaseline);
    }
    return do_metrics(eval_path, metrics_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
