#pragma once

// Result serialization. Sweep tables are CSV with a fixed header and reals
// at 6 significant digits in fixed notation; realization records are JSON
// lines; comprehension caches are an "N=<n>" line followed by N rows of
// comma-separated values.

#include "langdiv/clustering.hpp"
#include "langdiv/experiments.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace langdiv {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view sweep_header =
    "model,N,r,R,realizations,mean_w,se_w,mean_w_star,se_w_star,mean_i_star,se_i_star,i_star_count,mean_k_star,"
    "se_k_star";

inline constexpr std::string_view fit_header = "model,N,gamma,intercept,r_cutoff,r_squared,n_points";

/// Fixed notation with 6 significant digits ("0.125000", "0.0100000",
/// "3.45000"); "nan" for undefined values.
std::string format_real(double value);

void write_sweep_csv(std::ostream& out, const SweepSummary& summary);
SweepSummary read_sweep_csv(std::istream& in);

nlohmann::json realization_to_json(const RealizationResult& result);
RealizationResult realization_from_json(const nlohmann::json& record);
void write_realizations_jsonl(std::ostream& out, std::span<const RealizationResult> results);

/// Shortest round-trip representation per value.
void write_cache(std::ostream& out, const ComprehensionCache& cache);
ComprehensionCache read_cache(std::istream& in);

nlohmann::json optimum_to_json(const OptimumResult& result);

struct FitRow {
    Strategy model = Strategy::model_a;
    std::size_t n = 0;
    PowerLawFit fit;
};

void write_fit_csv(std::ostream& out, std::span<const FitRow> rows);

} // namespace langdiv
