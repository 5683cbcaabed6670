#include "langdiv/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace langdiv {

namespace {

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view strip_cr(std::string_view line)
{
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

double field_real(std::string_view text, std::size_t line_no)
{
    if (text == "nan") {
        return std::nan("");
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw FormatError("line " + std::to_string(line_no) + ": malformed number '" + std::string(text) + "'");
    }
    return value;
}

std::size_t field_count(std::string_view text, std::size_t line_no)
{
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw FormatError("line " + std::to_string(line_no) + ": malformed integer '" + std::string(text) + "'");
    }
    return value;
}

std::optional<double> optional_real(double v)
{
    return std::isnan(v) ? std::nullopt : std::optional<double>(v);
}

std::string shortest(double value)
{
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

Strategy strategy_field(std::string_view text, std::size_t line_no)
{
    if (auto s = parse_strategy(text)) {
        return *s;
    }
    throw FormatError("line " + std::to_string(line_no) + ": unknown model '" + std::string(text) + "'");
}

} // namespace

std::string format_real(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buffer[128];
    if (value == 0.0) {
        std::snprintf(buffer, sizeof(buffer), "%.5f", 0.0);
        return buffer;
    }
    auto exponent = static_cast<int>(std::floor(std::log10(std::abs(value))));
    for (int attempt = 0; attempt < 2; ++attempt) {
        const int decimals = std::max(0, 5 - exponent);
        std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
        // rounding may carry into a new leading digit (9.999996 -> 10.00000)
        const double printed = std::abs(std::strtod(buffer, nullptr));
        if (printed < std::pow(10.0, exponent + 1) || decimals == 0) {
            break;
        }
        ++exponent;
    }
    return buffer;
}

void write_sweep_csv(std::ostream& out, const SweepSummary& summary)
{
    out << sweep_header << '\n';
    for (const auto& row : summary.rows) {
        out << strategy_name(row.model) << ',' << row.n << ',' << format_real(row.r) << ',' << row.big_r << ','
            << row.realizations << ',' << format_real(row.mean_w) << ',' << format_real(row.se_w) << ','
            << format_real(row.mean_w_star) << ',' << format_real(row.se_w_star) << ','
            << format_real(row.mean_i_star.value_or(std::nan(""))) << ','
            << format_real(row.se_i_star.value_or(std::nan(""))) << ',' << row.i_star_count << ','
            << format_real(row.mean_k_star) << ',' << format_real(row.se_k_star) << '\n';
    }
}

SweepSummary read_sweep_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != sweep_header) {
        throw FormatError("line 1: expected sweep header '" + std::string(sweep_header) + "'");
    }
    SweepSummary summary;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = strip_cr(line);
        if (text.empty()) {
            continue;
        }
        const auto f = split_fields(text);
        if (f.size() != 14) {
            throw FormatError("line " + std::to_string(line_no) + ": expected 14 fields, got " +
                              std::to_string(f.size()));
        }
        SweepRow row;
        row.model = strategy_field(f[0], line_no);
        row.n = field_count(f[1], line_no);
        row.r = field_real(f[2], line_no);
        row.big_r = field_count(f[3], line_no);
        row.realizations = field_count(f[4], line_no);
        row.mean_w = field_real(f[5], line_no);
        row.se_w = field_real(f[6], line_no);
        row.mean_w_star = field_real(f[7], line_no);
        row.se_w_star = field_real(f[8], line_no);
        row.mean_i_star = optional_real(field_real(f[9], line_no));
        row.se_i_star = optional_real(field_real(f[10], line_no));
        row.i_star_count = field_count(f[11], line_no);
        row.mean_k_star = field_real(f[12], line_no);
        row.se_k_star = field_real(f[13], line_no);
        summary.rows.push_back(row);
    }
    return summary;
}

nlohmann::json realization_to_json(const RealizationResult& result)
{
    const auto& p = result.params;
    nlohmann::json record = nlohmann::json::object();
    record["model"] = strategy_name(p.strategy);
    record["N"] = p.n;
    record["M"] = p.m;
    record["S"] = p.s;
    record["Q"] = p.q;
    record["r"] = p.strategy == Strategy::base ? 0.0 : p.r_rel;
    record["R"] = p.strategy == Strategy::base ? 0 : p.imitation_size();
    record["generations"] = p.generations;
    record["include_parent"] = p.include_parent;
    record["fitness_includes_self"] = p.fitness_includes_self;
    record["seed"] = p.seed;
    record["realization"] = result.index;
    record["final_w"] = result.final_w;
    record["k_star"] = result.k_star;
    record["w_star"] = result.w_star;
    record["i_star"] = result.i_star ? nlohmann::json(*result.i_star) : nlohmann::json(nullptr);
    record["w_trajectory"] = result.w_trajectory;
    return record;
}

RealizationResult realization_from_json(const nlohmann::json& record)
{
    try {
        RealizationResult result;
        auto& p = result.params;
        const auto model = parse_strategy(record.at("model").get<std::string>());
        if (!model) {
            throw FormatError("unknown model in realization record");
        }
        p.strategy = *model;
        p.n = record.at("N").get<std::size_t>();
        p.m = record.at("M").get<std::size_t>();
        p.s = record.at("S").get<std::size_t>();
        p.q = record.at("Q").get<std::size_t>();
        p.r_rel = record.at("r").get<double>();
        p.generations = record.at("generations").get<std::size_t>();
        p.include_parent = record.at("include_parent").get<bool>();
        p.fitness_includes_self = record.at("fitness_includes_self").get<bool>();
        p.seed = record.at("seed").get<std::uint64_t>();
        result.index = record.at("realization").get<std::size_t>();
        result.final_w = record.at("final_w").get<double>();
        result.k_star = record.at("k_star").get<std::size_t>();
        result.w_star = record.at("w_star").get<double>();
        if (!record.at("i_star").is_null()) {
            result.i_star = record.at("i_star").get<double>();
        }
        result.w_trajectory = record.at("w_trajectory").get<std::vector<double>>();
        return result;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed realization record: ") + e.what());
    }
}

void write_realizations_jsonl(std::ostream& out, std::span<const RealizationResult> results)
{
    for (const auto& r : results) {
        out << realization_to_json(r).dump() << '\n';
    }
}

void write_cache(std::ostream& out, const ComprehensionCache& cache)
{
    const std::size_t n = cache.size();
    out << "N=" << n << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j > 0) {
                out << ',';
            }
            out << shortest(cache.mutual(i, j));
        }
        out << '\n';
    }
}

ComprehensionCache read_cache(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("cache file is empty");
    }
    const auto header = strip_cr(line);
    if (header.substr(0, 2) != "N=") {
        throw FormatError("line 1: expected 'N=<n>' header");
    }
    const std::size_t n = field_count(header.substr(2), 1);
    if (n == 0) {
        throw FormatError("line 1: N must be positive");
    }
    std::vector<double> values;
    values.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) {
            throw FormatError("cache file ends after " + std::to_string(i) + " of " + std::to_string(n) + " rows");
        }
        const auto fields = split_fields(strip_cr(line));
        if (fields.size() != n) {
            throw FormatError("line " + std::to_string(i + 2) + ": expected " + std::to_string(n) + " values");
        }
        for (auto f : fields) {
            values.push_back(field_real(f, i + 2));
        }
    }
    while (std::getline(in, line)) {
        if (!strip_cr(line).empty()) {
            throw FormatError("cache file has trailing rows beyond N");
        }
    }
    try {
        return ComprehensionCache::from_mutual(n, std::move(values));
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("invalid cache: ") + e.what());
    }
}

nlohmann::json optimum_to_json(const OptimumResult& result)
{
    nlohmann::json record = nlohmann::json::object();
    record["k_star"] = result.k_star;
    record["w_star"] = result.w_star;
    record["i_star"] = result.i_star ? nlohmann::json(*result.i_star) : nlohmann::json(nullptr);
    const auto canonical = result.partition.canonical();
    record["partition"] = canonical.clusters();
    nlohmann::json scan = nlohmann::json::array();
    for (const auto& [k, w] : result.scan) {
        scan.push_back({{"K", k}, {"w", w}});
    }
    record["scan"] = scan;
    return record;
}

void write_fit_csv(std::ostream& out, std::span<const FitRow> rows)
{
    out << fit_header << '\n';
    for (const auto& row : rows) {
        out << strategy_name(row.model) << ',' << row.n << ',' << format_real(row.fit.gamma) << ','
            << format_real(row.fit.intercept) << ',' << format_real(row.fit.r_cutoff) << ','
            << format_real(row.fit.r_squared) << ',' << row.fit.n_points << '\n';
    }
}

} // namespace langdiv
