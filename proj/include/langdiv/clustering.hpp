#pragma once

// Language-community detection by k-means over mutual comprehension, scanned
// over K to pick the community count. An exhaustive search serves as the
// test oracle on small inputs.

#include "langdiv/language.hpp"
#include "langdiv/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace langdiv {

/// K disjoint nonempty clusters covering agents 0..N-1.
class Partition {
public:
    /// Throws std::invalid_argument unless `clusters` is a valid partition of
    /// 0..n-1 with no empty cluster.
    Partition(std::size_t n, std::vector<std::vector<std::size_t>> clusters);

    /// From per-agent cluster labels in [0, k).
    static Partition from_labels(std::span<const std::size_t> labels, std::size_t k);

    std::size_t k() const noexcept { return clusters_.size(); }
    std::size_t agent_count() const noexcept { return n_; }
    const std::vector<std::vector<std::size_t>>& clusters() const noexcept { return clusters_; }
    std::span<const std::size_t> cluster(std::size_t index) const noexcept { return clusters_[index]; }

    /// Each cluster sorted; clusters ordered by smallest member.
    Partition canonical() const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::size_t n_;
    std::vector<std::vector<std::size_t>> clusters_;
};

struct ClusteringResult {
    Partition partition;
    double w_avg = 0.0;
    std::optional<double> i_avg; ///< undefined for K = 1
    std::size_t passes = 0;
    bool converged = false;
};

struct KMeansOptions {
    std::size_t max_passes = 100;
    /// Count the agent itself when averaging its affinity to its own
    /// cluster. Off by default: the self term lets singletons self-trap.
    bool self_in_assignment = false;
    /// How an agent picks among clusters with equal mean affinity.
    /// lowest_index is plain argmax and pulls identical agents together;
    /// stay keeps the agent put whenever its cluster is among the best.
    enum class TieRule { lowest_index, stay };
    TieRule ties = TieRule::lowest_index;
    /// After the assignment passes converge, move single agents while a move
    /// raises avg_within itself.
    bool refine_within = false;
};

struct OptimumResult {
    std::size_t k_star = 1;
    double w_star = 0.0;
    std::optional<double> i_star;
    Partition partition;
    std::vector<std::pair<std::size_t, double>> scan; ///< (K, best W(P_K))
};

/// (1/K) sum of W(C) over clusters; singletons contribute 0.
double avg_within(const Partition& partition, const ComprehensionCache& cache);

/// Mean F(i,j) over i in a, j in b; throws if the clusters overlap or one
/// is empty.
double inter_community(std::span<const std::size_t> a, std::span<const std::size_t> b,
                       const ComprehensionCache& cache);

/// Mean inter-community comprehension over unordered cluster pairs; throws
/// for K < 2.
double avg_inter(const Partition& partition, const ComprehensionCache& cache);

/// One k-means run from a random initial assignment with every cluster
/// nonempty. Throws std::invalid_argument unless 1 <= k <= N.
ClusteringResult kmeans_language(const ComprehensionCache& cache, std::size_t k, Rng& rng,
                                 const KMeansOptions& options = {});

struct OptimumOptions {
    std::size_t k_min = 1;
    std::size_t k_max = 10;
    std::size_t restarts = 10;
    KMeansOptions kmeans;
};

/// Best-of-restarts k-means for every K in [k_min, k_max], clamped to N
/// from above. Restart r for count K draws from the substream
/// (seed, K, r). Ties between K go to the smaller K.
OptimumResult find_optimum(const ComprehensionCache& cache, const OptimumOptions& options, std::uint64_t seed);

/// Largest N accepted by brute_force_best.
inline constexpr std::size_t brute_force_limit = 12;

/// Exhaustive maximization of avg_within over partitions into exactly k
/// nonempty blocks.
ClusteringResult brute_force_best(const ComprehensionCache& cache, std::size_t k);

} // namespace langdiv
