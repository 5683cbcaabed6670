#pragma once

// Run configuration: a flat "key = value" document with '#' comments.
// Values are numbers, booleans (true/false), or strings (optionally
// double-quoted); list-valued keys take comma-separated items.

#include "langdiv/experiments.hpp"
#include "langdiv/kernels.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace langdiv {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& reason);

    const std::string& key() const noexcept { return key_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string key_;
    std::string reason_;
};

struct RunConfig {
    ModelParams params;

    std::vector<Strategy> models{Strategy::base, Strategy::model_a, Strategy::model_b, Strategy::model_c};
    std::vector<std::size_t> n_values{50, 100, 150, 200};
    std::vector<double> r_grid{0.01, 0.02, 0.03, 0.05, 0.07, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.7};
    std::size_t realizations = 100;
    std::size_t workers = 1;

    OptimumOptions clustering;
    double r_cutoff = 0.03;

    std::size_t steady_window = 50;
    double steady_tol = 0.02;

    std::string out_dir = "out";
    bool write_csv = true;
    bool write_jsonl = true;
    bool write_cache = false;
    std::optional<Isa> isa; ///< unset: pick from CPU

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;
};

/// Every key accepted by parse_config and apply_setting.
const std::vector<std::string_view>& config_keys();

/// Sets one key from its textual value. Throws ConfigError on an unknown key
/// or a malformed value.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Parses a document on top of `defaults`; the result is validated. Errors
/// carry the line number and key.
RunConfig parse_config(std::string_view text, RunConfig defaults = {});

/// Splits "key=value" as used by --set.
std::pair<std::string, std::string> split_assignment(std::string_view text);

} // namespace langdiv
