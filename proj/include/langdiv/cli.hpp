#pragma once

// Subcommands behind the `langdiv` executable. Each returns a process exit
// status: 0 on success, 1 on a runtime or I/O failure, 2 on invalid input.

#include "langdiv/config.hpp"

#include <filesystem>
#include <iosfwd>

namespace langdiv {

/// `realizations` seeded runs of the configured (strategy, N, r) cell.
/// Writes realizations.jsonl, trajectories.csv and run_summary.csv (plus
/// cache_<k>.csv per realization when write_cache is set).
int cmd_run(const RunConfig& config, std::ostream& log);

/// Full grid sweep. Writes sweep.csv and realizations.jsonl.
int cmd_sweep(const RunConfig& config, std::ostream& log);

/// Community detection on a stored cache. Writes optimum.json.
int cmd_cluster(const std::filesystem::path& cache_file, const RunConfig& config, std::ostream& log);

/// Power-law fit of mean K* against r for every (model, N) group of a sweep
/// table (BASE rows are skipped). Writes fit.csv.
int cmd_fit(const std::filesystem::path& summary_file, const RunConfig& config, std::ostream& log);

/// Parses argv and dispatches to a subcommand.
int run_cli(int argc, char** argv);

} // namespace langdiv
