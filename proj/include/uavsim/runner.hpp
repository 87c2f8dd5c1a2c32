/**
 * @file runner.hpp
 * @brief Monte-Carlo loop over drops with deterministic parallel merge.
 */
#pragma once

#include <functional>
#include <string>

#include "uavsim/config.hpp"
#include "uavsim/metrics.hpp"

namespace uavsim {

/// Called after each drop is merged, with (merged drops, total drops).
using ProgressFn = std::function<void(int, int)>;

/// Runs cfg.drops drops on cfg.threads workers. Partial reports are merged
/// strictly in drop order, so the result does not depend on thread count.
MetricsReport run_scenario(const ScenarioConfig& cfg, const ProgressFn& progress = {});

/// run_scenario followed by write_outputs with the config echo.
MetricsReport run_to_directory(const ScenarioConfig& cfg, const std::string& out_dir,
                               const ProgressFn& progress = {});

}  // namespace uavsim
