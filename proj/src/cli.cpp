#include "langdiv/cli.hpp"

#include "langdiv/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace langdiv {

namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_usage = 2;

SweepSpec spec_from(const RunConfig& config)
{
    SweepSpec spec;
    spec.base = config.params;
    spec.models = config.models;
    spec.n_values = config.n_values;
    spec.r_grid = config.r_grid;
    spec.realizations = config.realizations;
    spec.base_seed = config.params.seed;
    spec.clustering = config.clustering;
    spec.workers = config.workers;
    return spec;
}

/// Renders into memory first so that a failed run leaves no partial file.
template <typename Writer>
void write_file(const fs::path& path, Writer&& writer)
{
    std::ostringstream buffer;
    writer(buffer);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << buffer.str();
    if (!out.flush()) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void prepare_out_dir(const RunConfig& config)
{
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + config.out_dir + ": " + ec.message());
    }
}

template <typename Command>
int guarded(std::ostream& log, Command&& command)
{
    try {
        return command();
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const FormatError& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_failure;
    }
}

} // namespace

int cmd_run(const RunConfig& config, std::ostream& log)
{
    return guarded(log, [&] {
        config.validate();
        SweepSpec spec = spec_from(config);
        spec.models = {config.params.strategy};
        spec.n_values = {config.params.n};
        spec.r_grid = {config.params.r_rel};
        spec.keep_final_caches = config.write_cache;
        const auto outcome = run_sweep(spec);

        prepare_out_dir(config);
        const fs::path dir(config.out_dir);
        if (config.write_jsonl) {
            write_file(dir / "realizations.jsonl",
                       [&](std::ostream& out) { write_realizations_jsonl(out, outcome.realizations); });
        }
        if (config.write_csv) {
            write_file(dir / "run_summary.csv", [&](std::ostream& out) { write_sweep_csv(out, outcome.summary); });
            write_file(dir / "trajectories.csv", [&](std::ostream& out) {
                out << "realization,generation,w\n";
                for (const auto& rr : outcome.realizations) {
                    for (std::size_t g = 0; g < rr.w_trajectory.size(); ++g) {
                        out << rr.index << ',' << g << ',' << format_real(rr.w_trajectory[g]) << '\n';
                    }
                }
            });
        }
        if (config.write_cache) {
            for (const auto& rr : outcome.realizations) {
                write_file(dir / ("cache_" + std::to_string(rr.index) + ".csv"),
                           [&](std::ostream& out) { write_cache(out, *rr.final_cache); });
            }
        }

        for (const auto& rr : outcome.realizations) {
            const auto steady = steady_state_generation(rr.w_trajectory, config.steady_window, config.steady_tol);
            log << "realization " << rr.index << ": W(P)=" << format_real(rr.final_w) << " K*=" << rr.k_star
                << " W*=" << format_real(rr.w_star) << " I*=" << format_real(rr.i_star.value_or(std::nan("")))
                << " steady@" << (steady ? std::to_string(*steady) : std::string("none")) << '\n';
        }
        return exit_ok;
    });
}

int cmd_sweep(const RunConfig& config, std::ostream& log)
{
    return guarded(log, [&] {
        config.validate();
        const auto outcome = run_sweep(spec_from(config));
        prepare_out_dir(config);
        const fs::path dir(config.out_dir);
        if (config.write_csv) {
            write_file(dir / "sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, outcome.summary); });
        }
        if (config.write_jsonl) {
            write_file(dir / "realizations.jsonl",
                       [&](std::ostream& out) { write_realizations_jsonl(out, outcome.realizations); });
        }
        log << "sweep: " << outcome.summary.rows.size() << " cells, " << outcome.realizations.size()
            << " realizations\n";
        return exit_ok;
    });
}

int cmd_cluster(const fs::path& cache_file, const RunConfig& config, std::ostream& log)
{
    return guarded(log, [&] {
        config.validate();
        std::istringstream in(read_file(cache_file));
        const auto cache = read_cache(in);
        const auto optimum = find_optimum(cache, config.clustering,
                                          derive_seed({config.params.seed, static_cast<std::uint64_t>(StreamTag::clustering)}));
        prepare_out_dir(config);
        write_file(fs::path(config.out_dir) / "optimum.json",
                   [&](std::ostream& out) { out << optimum_to_json(optimum).dump(2) << '\n'; });
        log << "K*=" << optimum.k_star << " W*=" << format_real(optimum.w_star)
            << " I*=" << format_real(optimum.i_star.value_or(std::nan(""))) << '\n';
        return exit_ok;
    });
}

int cmd_fit(const fs::path& summary_file, const RunConfig& config, std::ostream& log)
{
    return guarded(log, [&] {
        config.validate();
        std::istringstream in(read_file(summary_file));
        const auto summary = read_sweep_csv(in);

        std::map<std::pair<int, std::size_t>, std::vector<std::pair<double, double>>> groups;
        for (const auto& row : summary.rows) {
            if (row.model != Strategy::base) {
                groups[{static_cast<int>(row.model), row.n}].emplace_back(row.r, row.mean_k_star);
            }
        }
        std::vector<FitRow> fits;
        for (const auto& [key, points] : groups) {
            const auto model = static_cast<Strategy>(key.first);
            try {
                fits.push_back({model, key.second, fit_power_law(points, config.r_cutoff)});
            } catch (const std::invalid_argument& e) {
                log << "skipping " << strategy_name(model) << " N=" << key.second << ": " << e.what() << '\n';
            }
        }
        if (fits.empty()) {
            throw std::invalid_argument("no (model, N) group has enough points above r_cutoff to fit");
        }
        prepare_out_dir(config);
        write_file(fs::path(config.out_dir) / "fit.csv", [&](std::ostream& out) { write_fit_csv(out, fits); });
        for (const auto& f : fits) {
            log << strategy_name(f.model) << " N=" << f.n << " gamma=" << format_real(f.fit.gamma)
                << " r2=" << format_real(f.fit.r_squared) << " points=" << f.fit.n_points << '\n';
        }
        return exit_ok;
    });
}

int run_cli(int argc, char** argv)
{
    CLI::App app{"Generational language-evolution simulator and community analysis"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");

    struct Common {
        std::string config_path;
        std::optional<std::uint64_t> seed;
        std::optional<std::string> out_dir;
        std::optional<std::size_t> realizations;
        std::optional<std::size_t> generations;
        std::optional<std::size_t> workers;
        std::vector<std::string> sets;
    } common;

    auto add_common = [&common](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "Configuration file (key = value)")->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Base RNG seed");
        sub->add_option("--out-dir", common.out_dir, "Output directory");
        sub->add_option("--realizations", common.realizations, "Realizations per cell");
        sub->add_option("--generations", common.generations, "Generations per realization");
        sub->add_option("--workers", common.workers, "Worker threads (0 = all cores)");
        sub->add_option("--set", common.sets, "Override a config key (key=value); repeatable");
    };

    auto* run = app.add_subcommand("run", "Simulate realizations of one (strategy, N, r) cell");
    add_common(run);
    auto* sweep = app.add_subcommand("sweep", "Sweep models x N x r and average over realizations");
    add_common(sweep);
    auto* cluster = app.add_subcommand(
        "cluster", "Find language communities in a stored cache (--seed selects the clustering stream, as in run)");
    add_common(cluster);
    std::string cache_path;
    cluster->add_option("cache", cache_path, "Cache file (N=<n> header, N rows of F values)")
        ->required()
        ->check(CLI::ExistingFile);
    auto* fit = app.add_subcommand("fit", "Fit K* ~ r^-gamma to a sweep table");
    add_common(fit);
    std::string summary_path;
    fit->add_option("summary", summary_path, "sweep.csv produced by the sweep command")
        ->required()
        ->check(CLI::ExistingFile);
    std::optional<double> r_cutoff;
    fit->add_option("--r-cutoff", r_cutoff, "Only fit points with r above this value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    RunConfig config;
    try {
        if (!common.config_path.empty()) {
            config = parse_config(read_file(common.config_path));
        }
        for (const auto& assignment : common.sets) {
            const auto [key, value] = split_assignment(assignment);
            apply_setting(config, key, value);
        }
        if (common.seed) {
            config.params.seed = *common.seed;
        }
        if (common.out_dir) {
            config.out_dir = *common.out_dir;
        }
        if (common.realizations) {
            config.realizations = *common.realizations;
        }
        if (common.generations) {
            config.params.generations = *common.generations;
        }
        if (common.workers) {
            config.workers = *common.workers;
        }
        if (r_cutoff) {
            config.r_cutoff = *r_cutoff;
        }
        config.validate();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
    if (config.isa) {
        force_isa(*config.isa);
    }

    if (run->parsed()) {
        return cmd_run(config, std::cerr);
    }
    if (sweep->parsed()) {
        return cmd_sweep(config, std::cerr);
    }
    if (cluster->parsed()) {
        return cmd_cluster(cache_path, config, std::cerr);
    }
    return cmd_fit(summary_path, config, std::cerr);
}

} // namespace langdiv
