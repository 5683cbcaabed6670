#include "langdiv/evolution.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace langdiv {

std::string_view strategy_name(Strategy strategy) noexcept
{
    switch (strategy) {
    case Strategy::base:
        return "BASE";
    case Strategy::model_a:
        return "MODEL_A";
    case Strategy::model_b:
        return "MODEL_B";
    case Strategy::model_c:
        return "MODEL_C";
    }
    return "UNKNOWN";
}

std::optional<Strategy> parse_strategy(std::string_view text) noexcept
{
    std::string upper;
    for (char c : text) {
        upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    if (upper == "BASE") {
        return Strategy::base;
    }
    if (upper == "MODEL_A" || upper == "A") {
        return Strategy::model_a;
    }
    if (upper == "MODEL_B" || upper == "B") {
        return Strategy::model_b;
    }
    if (upper == "MODEL_C" || upper == "C") {
        return Strategy::model_c;
    }
    return std::nullopt;
}

std::size_t ModelParams::imitation_size() const noexcept
{
    const auto rounded = std::llround(r_rel * static_cast<double>(n));
    return static_cast<std::size_t>(std::max<long long>(1, rounded));
}

void ModelParams::validate() const
{
    auto fail = [](const std::string& key, const std::string& reason) {
        throw std::invalid_argument(key + ": " + reason);
    };
    if (n < 1) {
        fail("n", "population size must be at least 1");
    }
    if (m < 1) {
        fail("m", "meaning count must be at least 1");
    }
    if (s < 1) {
        fail("s", "signal count must be at least 1");
    }
    if (q < 1) {
        fail("q", "sampling size must be at least 1");
    }
    if (strategy != Strategy::base) {
        if (!(r_rel > 0.0 && r_rel <= 1.0)) {
            fail("r", "relative imitation-set size must lie in (0, 1]");
        }
        const std::size_t r = imitation_size();
        if (r > n) {
            fail("r", "imitation set larger than the population");
        }
        if (!include_parent && r > n - 1) {
            fail("r", "imitation set without the parent can hold at most N - 1 agents");
        }
    }
}

RouletteWheel::RouletteWheel(std::span<const double> weights)
{
    if (weights.empty()) {
        throw std::invalid_argument("roulette wheel needs at least one weight");
    }
    cumulative_.reserve(weights.size());
    double running = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("roulette weights must be finite and nonnegative");
        }
        running += w;
        cumulative_.push_back(running);
    }
}

std::size_t RouletteWheel::pick(Rng& rng) const noexcept
{
    const double total = cumulative_.back();
    if (!(total > 0.0)) {
        return static_cast<std::size_t>(rng.below(cumulative_.size()));
    }
    const double target = rng.unit() * total;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) {
        // target rounded up to the total; take the last positive-weight slot
        it = std::lower_bound(cumulative_.begin(), cumulative_.end(), total);
    }
    return static_cast<std::size_t>(it - cumulative_.begin());
}

namespace {

Agent uniform_learner(std::size_t id, const ModelParams& params, Rng& rng)
{
    AssociationMatrix assoc(params.m, params.s);
    for (std::size_t mu = 0; mu < params.m; ++mu) {
        for (std::size_t k = 0; k < params.q; ++k) {
            assoc.increment(mu, static_cast<std::size_t>(rng.below(params.s)));
        }
    }
    return Agent(id, id, std::move(assoc));
}

std::size_t draw_from_row(std::span<const double> row, Rng& rng) noexcept
{
    const double target = rng.unit();
    double running = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t x = 0; x < row.size(); ++x) {
        if (row[x] > 0.0) {
            running += row[x];
            last_positive = x;
            if (target < running) {
                return x;
            }
        }
    }
    return last_positive;
}

} // namespace

Population init_population(const ModelParams& params)
{
    params.validate();
    std::vector<Agent> agents;
    agents.reserve(params.n);
    for (std::size_t i = 0; i < params.n; ++i) {
        Rng rng(derive_seed({params.seed, static_cast<std::uint64_t>(StreamTag::init), i}));
        agents.push_back(uniform_learner(i, params, rng));
    }
    auto cache = build_cache(agents);
    return Population{0, std::move(agents), std::move(cache)};
}

double fitness(std::size_t agent, const ComprehensionCache& cache, bool include_self)
{
    if (agent >= cache.size()) {
        throw std::invalid_argument("fitness: agent index out of range");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < cache.size(); ++j) {
        if (j != agent || include_self) {
            total += cache.mutual(agent, j);
        }
    }
    return total;
}

namespace {

std::vector<double> fitness_vector(const ComprehensionCache& cache, bool include_self)
{
    std::vector<double> values(cache.size());
    for (std::size_t i = 0; i < cache.size(); ++i) {
        values[i] = fitness(i, cache, include_self);
    }
    return values;
}

} // namespace

std::size_t select_base_teacher(const ComprehensionCache& cache, bool include_self, Rng& rng)
{
    const auto weights = fitness_vector(cache, include_self);
    return RouletteWheel(weights).pick(rng);
}

std::size_t ring_distance(std::size_t a, std::size_t b, std::size_t n) noexcept
{
    const std::size_t d = a > b ? a - b : b - a;
    return std::min(d, n - d);
}

std::vector<std::size_t> build_imitation_set(std::size_t parent, const Population& population,
                                             const ModelParams& params, Rng& rng)
{
    const std::size_t n = population.size();
    if (params.strategy == Strategy::base) {
        throw std::invalid_argument("build_imitation_set: BASE has no imitation set");
    }
    if (parent >= n) {
        throw std::invalid_argument("build_imitation_set: parent index out of range");
    }
    const std::size_t r = params.imitation_size();
    if (r > n || (!params.include_parent && r > n - 1)) {
        throw std::invalid_argument("build_imitation_set: imitation set larger than the candidate pool");
    }

    std::vector<std::size_t> chosen;
    chosen.reserve(r);
    if (params.include_parent) {
        chosen.push_back(parent);
    }
    const std::size_t wanted = r - chosen.size();
    if (wanted == 0) {
        return chosen;
    }

    std::vector<std::size_t> others;
    others.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        if (j != parent) {
            others.push_back(j);
        }
    }

    if (params.strategy == Strategy::model_c) {
        // partial Fisher-Yates
        for (std::size_t k = 0; k < wanted; ++k) {
            const auto pick = k + static_cast<std::size_t>(rng.below(others.size() - k));
            std::swap(others[k], others[pick]);
            chosen.push_back(others[k]);
        }
        return chosen;
    }

    struct Ranked {
        double score; // lower is closer
        std::uint64_t tie;
        std::size_t index;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(others.size());
    const std::size_t parent_site = population.agents[parent].position();
    for (std::size_t j : others) {
        double score = 0.0;
        if (params.strategy == Strategy::model_a) {
            score = -population.cache.mutual(parent, j);
        } else {
            score = static_cast<double>(ring_distance(parent_site, population.agents[j].position(), n));
        }
        ranked.push_back({score, rng.next(), j});
    }
    auto closer = [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) {
            return a.score < b.score;
        }
        if (a.tie != b.tie) {
            return a.tie < b.tie;
        }
        return a.index < b.index;
    };
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(wanted), ranked.end(), closer);
    for (std::size_t k = 0; k < wanted; ++k) {
        chosen.push_back(ranked[k].index);
    }
    return chosen;
}

std::size_t select_teacher(std::size_t parent, std::span<const std::size_t> imitation_set,
                           const ComprehensionCache& cache, Rng& rng)
{
    if (imitation_set.empty()) {
        throw std::invalid_argument("select_teacher: empty imitation set");
    }
    std::vector<double> weights;
    weights.reserve(imitation_set.size());
    for (std::size_t member : imitation_set) {
        weights.push_back(cache.mutual(parent, member));
    }
    return imitation_set[RouletteWheel(weights).pick(rng)];
}

AssociationMatrix learn_from_teacher(const Agent& teacher, std::size_t q, Rng& rng)
{
    const auto& enc = teacher.encoding();
    AssociationMatrix child(enc.meanings(), enc.signals());
    for (std::size_t mu = 0; mu < enc.meanings(); ++mu) {
        const auto row = enc.row(mu);
        for (std::size_t k = 0; k < q; ++k) {
            child.increment(mu, draw_from_row(row, rng));
        }
    }
    return child;
}

Population step_generation(const Population& population, const ModelParams& params)
{
    const std::size_t n = population.size();
    const std::size_t next_generation = population.generation + 1;

    std::optional<RouletteWheel> wheel;
    if (params.strategy == Strategy::base) {
        wheel.emplace(fitness_vector(population.cache, params.fitness_includes_self));
    }

    std::vector<Agent> children;
    children.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(derive_seed({params.seed, static_cast<std::uint64_t>(StreamTag::generation), next_generation, i}));
        std::size_t teacher = 0;
        if (wheel) {
            teacher = wheel->pick(rng);
        } else {
            const auto imitation_set = build_imitation_set(i, population, params, rng);
            teacher = select_teacher(i, imitation_set, population.cache, rng);
        }
        const Agent& parent = population.agents[i];
        children.emplace_back(i, parent.position(), learn_from_teacher(population.agents[teacher], params.q, rng));
    }
    auto cache = build_cache(children);
    return Population{next_generation, std::move(children), std::move(cache)};
}

} // namespace langdiv
