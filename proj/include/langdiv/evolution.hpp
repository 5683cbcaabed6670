#pragma once

// Generational engine: every parent has exactly one child, and the child
// samples her language from a single teacher of the parent generation.

#include "langdiv/language.hpp"
#include "langdiv/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace langdiv {

enum class Strategy {
    base,    ///< teacher drawn from the whole population by fitness
    model_a, ///< imitation set: language-wise closest to the parent
    model_b, ///< imitation set: ring-lattice neighbours of the parent
    model_c, ///< imitation set: uniform random sample
};

std::string_view strategy_name(Strategy strategy) noexcept;

/// Accepts "BASE", "MODEL_A".."MODEL_C" and the short forms "A".."C"
/// (case-insensitive).
std::optional<Strategy> parse_strategy(std::string_view text) noexcept;

struct ModelParams {
    std::size_t n = 100;
    std::size_t m = 8;
    std::size_t s = 15;
    std::size_t q = 4;
    Strategy strategy = Strategy::base;
    double r_rel = 0.1;
    std::size_t generations = 500;
    bool include_parent = true;
    bool fitness_includes_self = true;
    std::uint64_t seed = 1;

    /// R = max(1, round(r * N)).
    std::size_t imitation_size() const noexcept;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct Population {
    std::size_t generation = 0;
    std::vector<Agent> agents;
    ComprehensionCache cache;

    std::size_t size() const noexcept { return agents.size(); }
};

/// Cumulative-weight table for repeated fitness-proportional draws. When
/// every weight is zero the draw is uniform.
class RouletteWheel {
public:
    explicit RouletteWheel(std::span<const double> weights);

    std::size_t pick(Rng& rng) const noexcept;
    std::size_t size() const noexcept { return cumulative_.size(); }

private:
    std::vector<double> cumulative_;
};

/// Fills every meaning row with Q uniform signal draws; generation 0.
Population init_population(const ModelParams& params);

/// f(i) = sum_j F(i,j), with j = i counted iff include_self.
double fitness(std::size_t agent, const ComprehensionCache& cache, bool include_self);

/// Draws an index with probability f(i) / sum_j f(j).
std::size_t select_base_teacher(const ComprehensionCache& cache, bool include_self, Rng& rng);

/// Exactly R distinct candidate teachers around `parent`.
std::vector<std::size_t> build_imitation_set(std::size_t parent, const Population& population,
                                             const ModelParams& params, Rng& rng);

/// Draws a member with probability proportional to F(parent, member).
std::size_t select_teacher(std::size_t parent, std::span<const std::size_t> imitation_set,
                           const ComprehensionCache& cache, Rng& rng);

/// Q i.i.d. draws from each of the teacher's encoding rows.
AssociationMatrix learn_from_teacher(const Agent& teacher, std::size_t q, Rng& rng);

/// Replaces the population with N children. Child i's draws come from the
/// substream (seed, generation + 1, i), so the result does not depend on
/// evaluation order.
Population step_generation(const Population& population, const ModelParams& params);

/// Ring-lattice distance between sites a and b on a cycle of n sites.
std::size_t ring_distance(std::size_t a, std::size_t b, std::size_t n) noexcept;

} // namespace langdiv
