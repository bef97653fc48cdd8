// SPDX-License-Identifier: Apache-2.0
#include "abps/harness.hpp"

#include <cstdlib>
#include <iostream>
#include <string_view>

#include "abps/csv.hpp"
#include "abps/error.hpp"
#include "abps/metrics.hpp"

namespace abps::harness {

training::TrainingLog execute(const config::ExperimentConfig& cfg) {
  require(!cfg.prior.has_value(), "execute: config must be resolved first");
  switch (cfg.mode) {
    case config::Mode::kAbps: return training::run_abps(cfg.run);
    case config::Mode::kAbpsPbt: return training::run_abps_pbt(cfg.run);
    case config::Mode::kIndependentBaseline:
      return training::run_independent_baseline(cfg.run);
  }
  fail("execute: bad mode");
}

training::TrainingLog run_experiment(const config::ExperimentConfig& cfg,
                                     const std::filesystem::path& out_dir) {
  const auto resolved = config::resolve(cfg);
  if (verbose()) {
    std::cerr << "abps: mode=" << config::mode_name(resolved.mode)
              << " k=" << resolved.run.pool.size()
              << " total_env_steps=" << resolved.run.abps.total_env_steps << "\n";
  }
  const auto log = execute(resolved);
  std::filesystem::create_directories(out_dir);
  csv::write_log(log, out_dir);
  csv::write_file_atomic(out_dir / "metrics.csv",
                         csv::metrics_to_csv(metrics::compute_metrics(log.eval_rows)));
  csv::write_file_atomic(out_dir / "resolved.toml", config::to_toml(resolved));
  if (verbose()) {
    std::cerr << "abps: wrote " << (out_dir / "eval.csv").string() << " ("
              << log.eval_rows.size() << " rows), training steps " << log.env_step_counter
              << ", evaluation steps " << log.eval_env_steps << "\n";
  }
  return log;
}

bool verbose() {
  const char* v = std::getenv("ABPS_LOG");
  if (v == nullptr) return false;
  const std::string_view s(v);
  return !s.empty() && s != "0" && s != "off" && s != "quiet";
}

}  // namespace abps::harness
