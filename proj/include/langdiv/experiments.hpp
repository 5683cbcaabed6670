#pragma once

// Seeded realizations and sweeps averaged over them. The log-log fit relates
// community count to relative imitation-set size.

#include "langdiv/clustering.hpp"
#include "langdiv/evolution.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace langdiv {

struct RealizationResult {
    ModelParams params;
    std::size_t index = 0; ///< realization number within its sweep cell
    std::vector<double> w_trajectory; ///< W(P) for generations 0..G
    double final_w = 0.0;
    std::size_t k_star = 1;
    double w_star = 0.0;
    std::optional<double> i_star;
    std::optional<ComprehensionCache> final_cache; ///< kept only on request
};

/// Simulates params.generations steps and clusters the final generation.
RealizationResult run_realization(const ModelParams& params, const OptimumOptions& clustering = {},
                                  bool keep_final_cache = false);

/// Seed of one realization in a sweep. Keyed by the cell's content (model,
/// N and the bit pattern of r) rather than grid positions, so a cell
/// reproduces in isolation regardless of grid order. BASE cells use r = 0.
std::uint64_t realization_seed(std::uint64_t base_seed, Strategy model, std::size_t n, double r,
                               std::size_t realization);

struct SweepSpec {
    ModelParams base;                 ///< m, s, q, generations, flags; n/strategy/r/seed overwritten per cell
    std::vector<Strategy> models{Strategy::model_a};
    std::vector<std::size_t> n_values{100};
    std::vector<double> r_grid{0.01, 0.02, 0.03, 0.05, 0.07, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.7};
    std::size_t realizations = 100;
    std::uint64_t base_seed = 1;
    OptimumOptions clustering;
    std::size_t workers = 1; ///< 0 = one per hardware thread
    bool keep_final_caches = false;
};

struct SweepRow {
    Strategy model = Strategy::base;
    std::size_t n = 0;
    double r = 0.0;
    std::size_t big_r = 0; ///< R; 0 for BASE
    std::size_t realizations = 0;
    double mean_w = 0.0;
    double se_w = 0.0;
    double mean_w_star = 0.0;
    double se_w_star = 0.0;
    std::optional<double> mean_i_star; ///< over realizations with K* >= 2
    std::optional<double> se_i_star;
    std::size_t i_star_count = 0;
    double mean_k_star = 0.0;
    double se_k_star = 0.0;
};

struct SweepSummary {
    std::vector<SweepRow> rows; ///< sorted by (model, N, r)
};

struct SweepOutcome {
    SweepSummary summary;
    std::vector<RealizationResult> realizations; ///< sorted by (model, N, r, index)
};

/// Aggregates one cell. Throws std::invalid_argument for an empty list.
SweepRow summarize_cell(std::span<const RealizationResult> cell);

SweepOutcome run_sweep(const SweepSpec& spec);

struct PowerLawFit {
    double gamma = 0.0;
    double intercept = 0.0; ///< log K* at log r = 0
    double r_cutoff = 0.0;
    double r_squared = 0.0;
    std::size_t n_points = 0;
};

/// Least squares of log K* against log r over points with r > r_cutoff and
/// K* >= 1; gamma is minus the slope. Throws std::invalid_argument with
/// fewer than two usable points or when all usable r coincide.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points, double r_cutoff = 0.03);

/// First g such that max - min of trajectory[g, g + window) <= tol.
std::optional<std::size_t> steady_state_generation(std::span<const double> trajectory, std::size_t window,
                                                   double tol);

} // namespace langdiv
