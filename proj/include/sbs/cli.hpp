#pragma once

#include "sbs/config.hpp"
#include "sbs/simlab.hpp"

#include <string>

namespace sbs::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInfeasible = 2;

/// Fits the configured panel with the two-step procedure and writes the
/// coefficient, residual-model, and ACF/PACF artifacts into cfg.out_dir.
int run_fit(const RunConfig& cfg, bool write_plots = false);

/// Runs a named experiment and writes results.csv and summary.csv.
int run_simulate(const std::string& experiment, const Overrides& overrides,
                 const std::string& out_dir);

/// Runs the runtime-scaling benchmark and writes timing.csv.
int run_bench(const Overrides& overrides, const std::string& out_dir);

}  // namespace sbs::cli
