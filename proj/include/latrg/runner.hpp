#pragma once

#include "latrg/config.hpp"
#include "latrg/report.hpp"

namespace latrg {

// Executes the configured tasks in order (or concurrently when asked; the
// report assembly order is fixed either way).
Report run_experiment(const ExperimentConfig& cfg, bool parallel_tasks = false);

}  // namespace latrg
