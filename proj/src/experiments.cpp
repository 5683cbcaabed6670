#include "langdiv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace langdiv {

RealizationResult run_realization(const ModelParams& params, const OptimumOptions& clustering,
                                  bool keep_final_cache)
{
    params.validate();
    RealizationResult result;
    result.params = params;
    result.w_trajectory.reserve(params.generations + 1);

    Population population = init_population(params);
    result.w_trajectory.push_back(overall_comprehension(population.cache));
    for (std::size_t g = 0; g < params.generations; ++g) {
        population = step_generation(population, params);
        result.w_trajectory.push_back(overall_comprehension(population.cache));
    }
    result.final_w = result.w_trajectory.back();

    const auto optimum = find_optimum(population.cache, clustering,
                                      derive_seed({params.seed, static_cast<std::uint64_t>(StreamTag::clustering)}));
    result.k_star = optimum.k_star;
    result.w_star = optimum.w_star;
    result.i_star = optimum.i_star;
    if (keep_final_cache) {
        result.final_cache = std::move(population.cache);
    }
    return result;
}

std::uint64_t realization_seed(std::uint64_t base_seed, Strategy model, std::size_t n, double r,
                               std::size_t realization)
{
    if (model == Strategy::base) {
        r = 0.0;
    }
    return derive_seed({base_seed, static_cast<std::uint64_t>(StreamTag::realization),
                        static_cast<std::uint64_t>(model), n, std::bit_cast<std::uint64_t>(r), realization});
}

namespace {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> values)
{
    MeanSe out;
    if (values.empty()) {
        return out;
    }
    double total = 0.0;
    for (double v : values) {
        total += v;
    }
    const auto count = static_cast<double>(values.size());
    out.mean = total / count;
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) {
            sq += (v - out.mean) * (v - out.mean);
        }
        out.se = std::sqrt(sq / (count - 1.0)) / std::sqrt(count);
    }
    return out;
}

auto cell_key(Strategy model, std::size_t n, double r)
{
    return std::make_tuple(static_cast<int>(model), n, r);
}

} // namespace

SweepRow summarize_cell(std::span<const RealizationResult> cell)
{
    if (cell.empty()) {
        throw std::invalid_argument("summarize_cell: no realizations");
    }
    const ModelParams& first = cell.front().params;
    SweepRow row;
    row.model = first.strategy;
    row.n = first.n;
    row.r = first.strategy == Strategy::base ? 0.0 : first.r_rel;
    row.big_r = first.strategy == Strategy::base ? 0 : first.imitation_size();
    row.realizations = cell.size();

    std::vector<double> w, w_star, k_star, i_star;
    for (const auto& rr : cell) {
        w.push_back(rr.final_w);
        w_star.push_back(rr.w_star);
        k_star.push_back(static_cast<double>(rr.k_star));
        if (rr.k_star >= 2 && rr.i_star) {
            i_star.push_back(*rr.i_star);
        }
    }
    const auto ws = mean_and_se(w);
    const auto wss = mean_and_se(w_star);
    const auto ks = mean_and_se(k_star);
    row.mean_w = ws.mean;
    row.se_w = ws.se;
    row.mean_w_star = wss.mean;
    row.se_w_star = wss.se;
    row.mean_k_star = ks.mean;
    row.se_k_star = ks.se;
    row.i_star_count = i_star.size();
    if (!i_star.empty()) {
        const auto is = mean_and_se(i_star);
        row.mean_i_star = is.mean;
        row.se_i_star = is.se;
    }
    return row;
}

SweepOutcome run_sweep(const SweepSpec& spec)
{
    if (spec.models.empty() || spec.n_values.empty() || spec.realizations == 0) {
        throw std::invalid_argument("run_sweep: models, N values and realization count must be nonempty");
    }

    struct Cell {
        Strategy model;
        std::size_t n;
        double r;
    };
    std::vector<Cell> cells;
    for (Strategy model : spec.models) {
        for (std::size_t n : spec.n_values) {
            if (model == Strategy::base) {
                cells.push_back({model, n, 0.0});
                continue;
            }
            if (spec.r_grid.empty()) {
                throw std::invalid_argument("run_sweep: imitation-set models need a nonempty r grid");
            }
            for (double r : spec.r_grid) {
                cells.push_back({model, n, r});
            }
        }
    }
    std::sort(cells.begin(), cells.end(),
              [](const Cell& a, const Cell& b) { return cell_key(a.model, a.n, a.r) < cell_key(b.model, b.n, b.r); });
    cells.erase(std::unique(cells.begin(), cells.end(),
                            [](const Cell& a, const Cell& b) {
                                return cell_key(a.model, a.n, a.r) == cell_key(b.model, b.n, b.r);
                            }),
                cells.end());

    std::vector<ModelParams> jobs;
    jobs.reserve(cells.size() * spec.realizations);
    for (const Cell& cell : cells) {
        for (std::size_t idx = 0; idx < spec.realizations; ++idx) {
            ModelParams p = spec.base;
            p.strategy = cell.model;
            p.n = cell.n;
            p.r_rel = cell.r;
            p.seed = realization_seed(spec.base_seed, cell.model, cell.n, cell.r, idx);
            p.validate();
            jobs.push_back(p);
        }
    }

    std::vector<RealizationResult> results(jobs.size());
    std::size_t workers = spec.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : spec.workers;
    workers = std::min(workers, jobs.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (;;) {
            const std::size_t job = next.fetch_add(1);
            if (job >= jobs.size() || failed.load()) {
                return;
            }
            try {
                results[job] = run_realization(jobs[job], spec.clustering, spec.keep_final_caches);
                results[job].index = job % spec.realizations;
            } catch (...) {
                if (!failed.exchange(true)) {
                    failure = std::current_exception();
                }
                return;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    SweepOutcome outcome;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const std::span<const RealizationResult> cell(results.data() + c * spec.realizations, spec.realizations);
        outcome.summary.rows.push_back(summarize_cell(cell));
    }
    outcome.realizations = std::move(results);
    return outcome;
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> points, double r_cutoff)
{
    std::vector<double> xs, ys;
    for (const auto& [r, k] : points) {
        if (r > r_cutoff && k >= 1.0 && std::isfinite(r) && std::isfinite(k)) {
            xs.push_back(std::log(r));
            ys.push_back(std::log(k));
        }
    }
    if (xs.size() < 2) {
        throw std::invalid_argument("fit_power_law: need at least two points with r above the cutoff");
    }
    const auto count = static_cast<double>(xs.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= count;
    mean_y /= count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mean_x) * (xs[i] - mean_x);
        sxy += (xs[i] - mean_x) * (ys[i] - mean_y);
        syy += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("fit_power_law: all usable points share the same r");
    }
    const double slope = sxy / sxx;
    PowerLawFit fit;
    fit.gamma = slope == 0.0 ? 0.0 : -slope;
    fit.intercept = mean_y - slope * mean_x;
    fit.r_cutoff = r_cutoff;
    fit.n_points = xs.size();
    // a constant series is fitted exactly by the flat line
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

std::optional<std::size_t> steady_state_generation(std::span<const double> trajectory, std::size_t window,
                                                   double tol)
{
    if (window < 2) {
        throw std::invalid_argument("steady_state_generation: window must be at least 2");
    }
    if (trajectory.size() < window) {
        return std::nullopt;
    }
    for (std::size_t g = 0; g + window <= trajectory.size(); ++g) {
        const auto [lo, hi] = std::minmax_element(trajectory.begin() + static_cast<std::ptrdiff_t>(g),
                                                  trajectory.begin() + static_cast<std::ptrdiff_t>(g + window));
        if (*hi - *lo <= tol) {
            return g;
        }
    }
    return std::nullopt;
}

} // namespace langdiv
