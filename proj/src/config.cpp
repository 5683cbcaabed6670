#include "langdiv/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace langdiv {

ConfigError::ConfigError(std::string key, const std::string& reason)
    : std::runtime_error(key.empty() ? reason : "key '" + key + "': " + reason), key_(std::move(key)), reason_(reason)
{
}

namespace {

std::string_view trim(std::string_view text)
{
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view text, std::string_view key)
{
    text = trim(text);
    if (!text.empty() && text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') {
            throw ConfigError(std::string(key), "unterminated string");
        }
        return text.substr(1, text.size() - 2);
    }
    return text;
}

std::vector<std::string_view> split_list(std::string_view text)
{
    std::vector<std::string_view> items;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string_view::npos ? text.size() : comma;
        const auto item = trim(text.substr(start, end - start));
        if (!item.empty()) {
            items.push_back(item);
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return items;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view key)
{
    text = trim(text);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError(std::string(key), "expected a nonnegative integer, got '" + std::string(text) + "'");
    }
    return value;
}

double parse_real(std::string_view text, std::string_view key)
{
    text = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
    }
    return value;
}

bool parse_bool(std::string_view text, std::string_view key)
{
    text = trim(text);
    if (text == "true") {
        return true;
    }
    if (text == "false") {
        return false;
    }
    throw ConfigError(std::string(key), "expected true or false, got '" + std::string(text) + "'");
}

Strategy parse_model(std::string_view text, std::string_view key)
{
    if (auto s = parse_strategy(trim(text))) {
        return *s;
    }
    throw ConfigError(std::string(key), "unknown model '" + std::string(text) + "'");
}

using Setter = std::function<void(RunConfig&, std::string_view, std::string_view)>;

const std::map<std::string_view, Setter>& setters()
{
    static const std::map<std::string_view, Setter> table = {
        {"n", [](RunConfig& c, auto k, auto v) { c.params.n = parse_unsigned(v, k); }},
        {"m", [](RunConfig& c, auto k, auto v) { c.params.m = parse_unsigned(v, k); }},
        {"s", [](RunConfig& c, auto k, auto v) { c.params.s = parse_unsigned(v, k); }},
        {"q", [](RunConfig& c, auto k, auto v) { c.params.q = parse_unsigned(v, k); }},
        {"strategy", [](RunConfig& c, auto k, auto v) { c.params.strategy = parse_model(v, k); }},
        {"r", [](RunConfig& c, auto k, auto v) { c.params.r_rel = parse_real(v, k); }},
        {"generations", [](RunConfig& c, auto k, auto v) { c.params.generations = parse_unsigned(v, k); }},
        {"include_parent", [](RunConfig& c, auto k, auto v) { c.params.include_parent = parse_bool(v, k); }},
        {"fitness_includes_self",
         [](RunConfig& c, auto k, auto v) { c.params.fitness_includes_self = parse_bool(v, k); }},
        {"seed", [](RunConfig& c, auto k, auto v) { c.params.seed = parse_unsigned(v, k); }},
        {"models",
         [](RunConfig& c, auto k, auto v) {
             c.models.clear();
             for (auto item : split_list(v)) {
                 c.models.push_back(parse_model(item, k));
             }
         }},
        {"n_values",
         [](RunConfig& c, auto k, auto v) {
             c.n_values.clear();
             for (auto item : split_list(v)) {
                 c.n_values.push_back(parse_unsigned(item, k));
             }
         }},
        {"r_grid",
         [](RunConfig& c, auto k, auto v) {
             c.r_grid.clear();
             for (auto item : split_list(v)) {
                 c.r_grid.push_back(parse_real(item, k));
             }
         }},
        {"realizations", [](RunConfig& c, auto k, auto v) { c.realizations = parse_unsigned(v, k); }},
        {"workers", [](RunConfig& c, auto k, auto v) { c.workers = parse_unsigned(v, k); }},
        {"k_min", [](RunConfig& c, auto k, auto v) { c.clustering.k_min = parse_unsigned(v, k); }},
        {"k_max", [](RunConfig& c, auto k, auto v) { c.clustering.k_max = parse_unsigned(v, k); }},
        {"restarts", [](RunConfig& c, auto k, auto v) { c.clustering.restarts = parse_unsigned(v, k); }},
        {"max_passes", [](RunConfig& c, auto k, auto v) { c.clustering.kmeans.max_passes = parse_unsigned(v, k); }},
        {"self_in_assignment",
         [](RunConfig& c, auto k, auto v) { c.clustering.kmeans.self_in_assignment = parse_bool(v, k); }},
        {"kmeans_ties",
         [](RunConfig& c, auto k, auto v) {
             if (v == "lowest_index") {
                 c.clustering.kmeans.ties = KMeansOptions::TieRule::lowest_index;
             } else if (v == "stay") {
                 c.clustering.kmeans.ties = KMeansOptions::TieRule::stay;
             } else {
                 throw ConfigError(std::string(k), "expected lowest_index or stay");
             }
         }},
        {"refine_within",
         [](RunConfig& c, auto k, auto v) { c.clustering.kmeans.refine_within = parse_bool(v, k); }},
        {"r_cutoff", [](RunConfig& c, auto k, auto v) { c.r_cutoff = parse_real(v, k); }},
        {"steady_window", [](RunConfig& c, auto k, auto v) { c.steady_window = parse_unsigned(v, k); }},
        {"steady_tol", [](RunConfig& c, auto k, auto v) { c.steady_tol = parse_real(v, k); }},
        {"out_dir", [](RunConfig& c, auto, auto v) { c.out_dir = std::string(v); }},
        {"formats",
         [](RunConfig& c, auto k, auto v) {
             c.write_csv = false;
             c.write_jsonl = false;
             for (auto item : split_list(v)) {
                 if (item == "csv") {
                     c.write_csv = true;
                 } else if (item == "jsonl") {
                     c.write_jsonl = true;
                 } else {
                     throw ConfigError(std::string(k), "unknown output format '" + std::string(item) + "'");
                 }
             }
         }},
        {"write_cache", [](RunConfig& c, auto k, auto v) { c.write_cache = parse_bool(v, k); }},
        {"simd",
         [](RunConfig& c, auto k, auto v) {
             if (v == "auto") {
                 c.isa.reset();
             } else if (auto isa = parse_isa(v)) {
                 c.isa = *isa;
             } else {
                 throw ConfigError(std::string(k), "expected auto, scalar, avx2 or neon");
             }
         }},
    };
    return table;
}

} // namespace

const std::vector<std::string_view>& config_keys()
{
    static const std::vector<std::string_view> keys = [] {
        std::vector<std::string_view> out;
        for (const auto& [key, setter] : setters()) {
            out.push_back(key);
        }
        return out;
    }();
    return keys;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value)
{
    const auto& table = setters();
    const auto it = table.find(trim(key));
    if (it == table.end()) {
        throw ConfigError(std::string(trim(key)), "unknown key");
    }
    it->second(config, it->first, unquote(value, it->first));
}

void RunConfig::validate() const
{
    auto check = [](bool ok, const char* key, const char* reason) {
        if (!ok) {
            throw ConfigError(key, reason);
        }
    };
    check(params.n >= 1, "n", "population size must be at least 1");
    check(params.m >= 1, "m", "meaning count must be at least 1");
    check(params.s >= 1, "s", "signal count must be at least 1");
    check(params.q >= 1, "q", "sampling size must be at least 1");
    check(params.r_rel > 0.0 && params.r_rel <= 1.0, "r", "must lie in (0, 1]");
    check(params.include_parent || params.imitation_size() <= params.n - 1, "r",
          "without the parent the imitation set holds at most N - 1 agents");
    check(!models.empty(), "models", "must list at least one model");
    check(!n_values.empty(), "n_values", "must list at least one population size");
    for (std::size_t n : n_values) {
        check(n >= 1, "n_values", "population sizes must be at least 1");
    }
    for (double r : r_grid) {
        check(r > 0.0 && r <= 1.0, "r_grid", "every r must lie in (0, 1]");
    }
    const bool needs_grid = std::any_of(models.begin(), models.end(), [](Strategy s) { return s != Strategy::base; });
    check(!needs_grid || !r_grid.empty(), "r_grid", "imitation-set models need at least one r");
    check(realizations >= 1, "realizations", "must be at least 1");
    check(clustering.k_min >= 1, "k_min", "must be at least 1");
    check(clustering.k_max >= clustering.k_min, "k_max", "must be at least k_min");
    check(clustering.restarts >= 1, "restarts", "must be at least 1");
    check(clustering.kmeans.max_passes >= 1, "max_passes", "must be at least 1");
    check(steady_window >= 2, "steady_window", "must be at least 2");
    check(steady_tol >= 0.0, "steady_tol", "must be nonnegative");
    check(!out_dir.empty(), "out_dir", "must not be empty");
    check(write_csv || write_jsonl, "formats", "must select at least one of csv, jsonl");
    if (isa) {
        check(isa_available(*isa), "simd", "requested instruction set is not available on this machine");
    }
}

RunConfig parse_config(std::string_view text, RunConfig defaults)
{
    RunConfig config = std::move(defaults);
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto newline = text.find('\n', start);
        const auto end = newline == std::string_view::npos ? text.size() : newline;
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;

        // strip a comment outside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') {
                quoted = !quoted;
            } else if (line[i] == '#' && !quoted) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (!line.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
            }
            const auto key = trim(line.substr(0, eq));
            if (key.empty()) {
                throw ConfigError("", "line " + std::to_string(line_no) + ": missing key");
            }
            if (!seen.insert(std::string(key)).second) {
                throw ConfigError(std::string(key), "line " + std::to_string(line_no) + ": duplicate key");
            }
            try {
                apply_setting(config, key, line.substr(eq + 1));
            } catch (const ConfigError& e) {
                throw ConfigError(e.key(), "line " + std::to_string(line_no) + ": " + e.reason());
            }
        }
        if (newline == std::string_view::npos) {
            break;
        }
    }
    config.validate();
    return config;
}

std::pair<std::string, std::string> split_assignment(std::string_view text)
{
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("", "expected key=value, got '" + std::string(text) + "'");
    }
    return {std::string(trim(text.substr(0, eq))), std::string(trim(text.substr(eq + 1)))};
}

} // namespace langdiv
