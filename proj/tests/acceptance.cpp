// Acceptance checks, one PASS/FAIL line each. Pass criterion numbers as
// arguments to run a subset; with none, all run. Exit status is 0 iff every
// selected check passes.

#include "langdiv/cli.hpp"
#include "langdiv/clustering.hpp"
#include "langdiv/evolution.hpp"
#include "langdiv/experiments.hpp"
#include "langdiv/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace langdiv;
namespace fs = std::filesystem;

namespace {

constexpr double baseline_m8 = 0.125;
constexpr double uniform_tol = 1e-12;
constexpr double uniform_max_seconds = 1.0;
constexpr std::uint64_t base_seed = 1;

constexpr double gamma_a_target = 0.69;
constexpr double gamma_b_target = 0.63;
constexpr double gamma_tol = 0.15;
constexpr double fit_cutoff = 0.03;

constexpr std::size_t oracle_cases = 100;
constexpr std::size_t oracle_restarts = 20;
constexpr double oracle_ratio = 0.98;
constexpr std::size_t oracle_required = 95;

constexpr double roulette_tol = 0.01;
constexpr double learning_tol = 0.02;

struct Verdict {
    bool pass;
    std::string detail;
};

ModelParams reference_params(std::size_t generations)
{
    ModelParams p;
    p.n = 100;
    p.m = 8;
    p.s = 15;
    p.q = 4;
    p.generations = generations;
    return p;
}

SweepSpec reference_sweep(std::vector<Strategy> models, std::vector<double> r_grid, std::size_t generations,
                      std::size_t realizations)
{
    SweepSpec spec;
    spec.base = reference_params(generations);
    spec.models = std::move(models);
    spec.n_values = {100};
    spec.r_grid = std::move(r_grid);
    spec.realizations = realizations;
    spec.base_seed = base_seed;
    spec.workers = 0;
    return spec;
}

const SweepRow& row_for(const SweepSummary& summary, Strategy model, double r)
{
    for (const auto& row : summary.rows) {
        if (row.model == model && row.r == r) {
            return row;
        }
    }
    throw std::logic_error("missing sweep cell");
}

std::string fmt(double v)
{
    return format_real(v);
}

Verdict uniform_baseline()
{
    const auto start = std::chrono::steady_clock::now();
    std::vector<Agent> agents;
    for (std::size_t i = 0; i < 20; ++i) {
        agents.emplace_back(i, i, AssociationMatrix(8, 15, std::vector<double>(8 * 15, 1.0)));
    }
    const double w = overall_comprehension(build_cache(agents));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool ok = std::abs(w - baseline_m8) <= uniform_tol && seconds < uniform_max_seconds;
    char buf[128];
    std::snprintf(buf, sizeof buf, "W(P)=%.17g, |W-1/M|=%.3g, %.3fs", w, std::abs(w - baseline_m8), seconds);
    return {ok, buf};
}

/// Shared by the small-r and subcommunity checks.
const SweepOutcome& small_r_runs()
{
    static const SweepOutcome outcome =
        run_sweep(reference_sweep({Strategy::model_a, Strategy::model_b}, {0.02, 0.1}, 200, 10));
    return outcome;
}

Verdict sub_baseline()
{
    const auto& s = small_r_runs().summary;
    const double a = row_for(s, Strategy::model_a, 0.02).mean_w;
    const double b = row_for(s, Strategy::model_b, 0.02).mean_w;
    return {a < baseline_m8 && b < baseline_m8, "r=0.02 mean W(P): A=" + fmt(a) + " B=" + fmt(b) + " (< 0.125)"};
}

Verdict subcommunity_quality()
{
    const auto& s = small_r_runs().summary;
    bool ok = true;
    std::string detail = "r=0.1";
    for (auto [model, name] : {std::pair{Strategy::model_a, "A"}, std::pair{Strategy::model_b, "B"}}) {
        const auto& row = row_for(s, model, 0.1);
        const bool defined = row.mean_i_star.has_value();
        ok = ok && row.mean_w_star > baseline_m8 && defined && *row.mean_i_star < baseline_m8;
        detail += std::string(" ") + name + ": W*=" + fmt(row.mean_w_star) +
                  " I*=" + (defined ? fmt(*row.mean_i_star) : std::string("undefined")) + " over " +
                  std::to_string(row.i_star_count) + " runs";
    }
    return {ok, detail + " (W* > 0.125, I* < 0.125)"};
}

Verdict one_language()
{
    const auto outcome = run_sweep(reference_sweep({Strategy::model_a}, {0.7}, 300, 10));
    std::size_t single = 0;
    std::map<std::size_t, std::size_t> histogram;
    for (const auto& rr : outcome.realizations) {
        single += rr.k_star == 1 ? 1 : 0;
        ++histogram[rr.k_star];
    }
    std::string detail = "A r=0.7: K*=1 in " + std::to_string(single) + "/10 (K* counts";
    for (const auto& [k, count] : histogram) {
        detail += " " + std::to_string(k) + ":" + std::to_string(count);
    }
    return {2 * single > outcome.realizations.size(), detail + ")"};
}

Verdict power_law()
{
    const std::vector<double> grid{0.04, 0.05, 0.07, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5};
    const auto outcome = run_sweep(reference_sweep({Strategy::model_a, Strategy::model_b}, grid, 300, 20));
    auto fit_for = [&](Strategy model) {
        std::vector<std::pair<double, double>> points;
        for (const auto& row : outcome.summary.rows) {
            if (row.model == model) {
                points.emplace_back(row.r, row.mean_k_star);
            }
        }
        return fit_power_law(points, fit_cutoff);
    };
    const auto a = fit_for(Strategy::model_a);
    const auto b = fit_for(Strategy::model_b);
    const bool ok = std::abs(a.gamma - gamma_a_target) <= gamma_tol && std::abs(b.gamma - gamma_b_target) <= gamma_tol;
    return {ok, "gamma_A=" + fmt(a.gamma) + " (0.69 +- 0.15, r2 " + fmt(a.r_squared) + ") gamma_B=" + fmt(b.gamma) +
                    " (0.63 +- 0.15, r2 " + fmt(b.r_squared) + ")"};
}

Verdict clustering_oracle()
{
    Rng gen(derive_seed({base_seed, 6}));
    std::size_t close = 0;
    double worst = 1.0;
    for (std::size_t c = 0; c < oracle_cases; ++c) {
        const std::size_t n = 4 + gen.below(6); // 4..9
        std::vector<double> f(n * n, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                f[i * n + j] = f[j * n + i] = gen.unit();
            }
        }
        const auto cache = ComprehensionCache::from_mutual(n, std::move(f));
        const std::size_t k = 2 + c % 2;
        double best = 0.0;
        for (std::size_t r = 0; r < oracle_restarts; ++r) {
            Rng rng(derive_seed({base_seed, static_cast<std::uint64_t>(StreamTag::clustering), c, r}));
            best = std::max(best, kmeans_language(cache, k, rng).w_avg);
        }
        const double exact = brute_force_best(cache, k).w_avg;
        const double ratio = exact > 0.0 ? best / exact : 1.0;
        worst = std::min(worst, ratio);
        close += ratio >= oracle_ratio ? 1 : 0;
    }
    return {close >= oracle_required, std::to_string(close) + "/100 caches within 2% of the exhaustive optimum (need " +
                                          std::to_string(oracle_required) + "), worst ratio " + fmt(worst)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism()
{
    const fs::path root = fs::temp_directory_path() / ("langdiv_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    RunConfig config;
    config.params.generations = 30;
    config.params.seed = 99;
    config.models = {Strategy::base, Strategy::model_a, Strategy::model_b, Strategy::model_c};
    config.n_values = {20, 30};
    config.r_grid = {0.1, 0.3};
    config.realizations = 3;

    std::vector<std::string> tables, records;
    std::ostringstream log;
    int status = 0;
    for (std::size_t workers : {1u, 1u, 4u}) {
        config.workers = workers;
        config.out_dir = (root / ("w" + std::to_string(tables.size()))).string();
        status |= cmd_sweep(config, log);
        tables.push_back(slurp(fs::path(config.out_dir) / "sweep.csv"));
        records.push_back(slurp(fs::path(config.out_dir) / "realizations.jsonl"));
    }
    fs::remove_all(root);
    const bool same = status == 0 && !tables[0].empty() && tables[0] == tables[1] && tables[0] == tables[2] &&
                      records[0] == records[1] && records[0] == records[2];
    return {same, "sweep.csv and realizations.jsonl identical across 2 runs with 1 worker and 1 run with 4 (" +
                      std::to_string(tables[0].size() + records[0].size()) + " bytes)"};
}

Verdict selection_statistics()
{
    const std::vector<double> weights{1.0, 2.0, 3.0};
    const RouletteWheel wheel(weights);
    Rng rng(derive_seed({base_seed, 8}));
    std::vector<std::size_t> counts(3);
    for (int i = 0; i < 1000000; ++i) {
        ++counts[wheel.pick(rng)];
    }
    double roulette_err = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        roulette_err = std::max(roulette_err, std::abs(static_cast<double>(counts[k]) / 1e6 - weights[k] / 6.0));
    }

    AssociationMatrix row(1, 15);
    row.increment(0, 0);
    row.increment(0, 1);
    const Agent teacher(0, 0, row);
    std::vector<double> freq(15);
    constexpr std::size_t q = 4;
    for (int i = 0; i < 10000; ++i) {
        const auto child = learn_from_teacher(teacher, q, rng);
        for (std::size_t x = 0; x < 15; ++x) {
            freq[x] += child.at(0, x) / (q * 1e4);
        }
    }
    double learning_err = 0.0;
    for (std::size_t x = 0; x < 15; ++x) {
        learning_err = std::max(learning_err, std::abs(freq[x] - (x < 2 ? 0.5 : 0.0)));
    }
    return {roulette_err <= roulette_tol && learning_err <= learning_tol,
            "roulette max error " + fmt(roulette_err) + " (<= 0.01), learning max error " + fmt(learning_err) +
                " (<= 0.02)"};
}

} // namespace

int main(int argc, char** argv)
{
    const std::map<int, std::pair<const char*, std::function<Verdict()>>> checks{
        {1, {"uniform-language baseline", uniform_baseline}},
        {2, {"sub-baseline comprehension at small r", sub_baseline}},
        {3, {"subcommunity quality", subcommunity_quality}},
        {4, {"one language at large r", one_language}},
        {5, {"power-law exponent", power_law}},
        {6, {"clustering oracle equivalence", clustering_oracle}},
        {7, {"determinism", determinism}},
        {8, {"selection statistics", selection_statistics}},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int id = std::atoi(argv[i]);
        if (!checks.count(id)) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
            return 2;
        }
        selected.insert(id);
    }
    if (selected.empty()) {
        for (const auto& [id, check] : checks) {
            selected.insert(id);
        }
    }

    bool all = true;
    for (int id : selected) {
        const auto& [name, run] = checks.at(id);
        const auto start = std::chrono::steady_clock::now();
        const Verdict v = run();
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d (%s): %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(),
                    seconds);
        std::fflush(stdout);
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
