#include "langdiv/clustering.hpp"

#include "langdiv/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace langdiv {

Partition::Partition(std::size_t n, std::vector<std::vector<std::size_t>> clusters)
    : n_(n), clusters_(std::move(clusters))
{
    if (clusters_.empty() || clusters_.size() > n_) {
        throw std::invalid_argument("partition must have between 1 and N clusters");
    }
    std::vector<bool> seen(n_, false);
    std::size_t covered = 0;
    for (const auto& cluster : clusters_) {
        if (cluster.empty()) {
            throw std::invalid_argument("partition has an empty cluster");
        }
        for (std::size_t idx : cluster) {
            if (idx >= n_) {
                throw std::invalid_argument("partition member index out of range");
            }
            if (seen[idx]) {
                throw std::invalid_argument("partition clusters overlap");
            }
            seen[idx] = true;
            ++covered;
        }
    }
    if (covered != n_) {
        throw std::invalid_argument("partition does not cover every agent");
    }
}

Partition Partition::from_labels(std::span<const std::size_t> labels, std::size_t k)
{
    std::vector<std::vector<std::size_t>> clusters(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= k) {
            throw std::invalid_argument("cluster label out of range");
        }
        clusters[labels[i]].push_back(i);
    }
    return Partition(labels.size(), std::move(clusters));
}

Partition Partition::canonical() const
{
    auto clusters = clusters_;
    for (auto& c : clusters) {
        std::sort(c.begin(), c.end());
    }
    std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return Partition(n_, std::move(clusters));
}

double avg_within(const Partition& partition, const ComprehensionCache& cache)
{
    double total = 0.0;
    for (const auto& cluster : partition.clusters()) {
        total += within_community_comprehension(cluster, cache);
    }
    return total / static_cast<double>(partition.k());
}

double inter_community(std::span<const std::size_t> a, std::span<const std::size_t> b,
                       const ComprehensionCache& cache)
{
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("inter-community comprehension of an empty cluster");
    }
    for (std::size_t i : a) {
        if (std::find(b.begin(), b.end(), i) != b.end()) {
            throw std::invalid_argument("inter-community comprehension of overlapping clusters");
        }
    }
    double total = 0.0;
    for (std::size_t i : a) {
        for (std::size_t j : b) {
            total += cache.mutual(i, j);
        }
    }
    return total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double avg_inter(const Partition& partition, const ComprehensionCache& cache)
{
    const std::size_t k = partition.k();
    if (k < 2) {
        throw std::invalid_argument("average inter-community comprehension needs at least two clusters");
    }
    double total = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            total += inter_community(partition.cluster(a), partition.cluster(b), cache);
        }
    }
    return total / (static_cast<double>(k) * static_cast<double>(k - 1) / 2.0);
}

namespace {

constexpr double tie_tolerance = 1e-12;

ClusteringResult finish(Partition partition, const ComprehensionCache& cache, std::size_t passes, bool converged)
{
    ClusteringResult result{std::move(partition), 0.0, std::nullopt, passes, converged};
    result.w_avg = avg_within(result.partition, cache);
    if (result.partition.k() >= 2) {
        result.i_avg = avg_inter(result.partition, cache);
    }
    return result;
}

} // namespace

ClusteringResult kmeans_language(const ComprehensionCache& cache, std::size_t k, Rng& rng,
                                 const KMeansOptions& options)
{
    const std::size_t n = cache.size();
    if (k < 1 || k > n) {
        throw std::invalid_argument("kmeans_language: cluster count must lie in [1, N]");
    }
    if (options.max_passes < 1) {
        throw std::invalid_argument("kmeans_language: max_passes must be at least 1");
    }

    // Random start: a random permutation seeds one agent per cluster, the
    // rest are labelled uniformly.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> labels(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        labels[order[pos]] = pos < k ? pos : static_cast<std::size_t>(rng.below(k));
    }

    // affinity[c * n + i] = sum of F(i, j) over current members j of c
    std::vector<double> affinity(k * n, 0.0);
    std::vector<std::size_t> sizes(k, 0);
    auto cluster_affinity = [&](std::size_t c) { return std::span<double>(affinity).subspan(c * n, n); };
    for (std::size_t j = 0; j < n; ++j) {
        kernels::add_to(cluster_affinity(labels[j]), cache.mutual_row(j));
        ++sizes[labels[j]];
    }

    std::vector<double> scores(k);
    std::size_t passes = 0;
    bool converged = false;
    while (passes < options.max_passes) {
        ++passes;
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle(order.begin(), order.end(), rng);
        std::size_t moves = 0;
        for (std::size_t i : order) {
            const std::size_t current = labels[i];
            if (sizes[current] == 1) {
                continue; // leaving would empty the cluster
            }
            for (std::size_t c = 0; c < k; ++c) {
                if (c != current) {
                    scores[c] = affinity[c * n + i] / static_cast<double>(sizes[c]);
                } else if (options.self_in_assignment) {
                    scores[c] = affinity[c * n + i] / static_cast<double>(sizes[c]);
                } else {
                    scores[c] = (affinity[c * n + i] - cache.mutual(i, i)) / static_cast<double>(sizes[c] - 1);
                }
            }
            const double top = *std::max_element(scores.begin(), scores.end());
            // scores within the rounding drift of the incrementally kept
            // affinities count as tied
            std::size_t best = current;
            if (options.ties == KMeansOptions::TieRule::lowest_index) {
                best = static_cast<std::size_t>(
                    std::find_if(scores.begin(), scores.end(), [&](double v) { return v >= top - tie_tolerance; }) -
                    scores.begin());
            } else if (scores[current] < top - tie_tolerance) {
                best = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
            }
            if (best != current) {
                kernels::subtract_from(cluster_affinity(current), cache.mutual_row(i));
                kernels::add_to(cluster_affinity(best), cache.mutual_row(i));
                --sizes[current];
                ++sizes[best];
                labels[i] = best;
                ++moves;
            }
        }
        if (moves == 0) {
            converged = true;
            break;
        }
    }

    if (options.refine_within && k >= 2) {
        // pair_sum[c] = sum of F over unordered member pairs of c
        std::vector<double> pair_sum(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            pair_sum[labels[i]] += 0.5 * (affinity[labels[i] * n + i] - cache.mutual(i, i));
        }
        auto block_w = [](double sum, std::size_t size) {
            return size < 2 ? 0.0 : sum / (static_cast<double>(size) * static_cast<double>(size - 1) / 2.0);
        };
        for (std::size_t sweep = 0; sweep < options.max_passes; ++sweep) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            shuffle(order.begin(), order.end(), rng);
            std::size_t moves = 0;
            for (std::size_t i : order) {
                const std::size_t from = labels[i];
                if (sizes[from] == 1) {
                    continue;
                }
                const double out_sum = pair_sum[from] - (affinity[from * n + i] - cache.mutual(i, i));
                const double from_gain = block_w(out_sum, sizes[from] - 1) - block_w(pair_sum[from], sizes[from]);
                double best_gain = tie_tolerance;
                std::size_t best = from;
                for (std::size_t c = 0; c < k; ++c) {
                    if (c == from) {
                        continue;
                    }
                    const double gain = from_gain + block_w(pair_sum[c] + affinity[c * n + i], sizes[c] + 1) -
                                        block_w(pair_sum[c], sizes[c]);
                    if (gain > best_gain) {
                        best_gain = gain;
                        best = c;
                    }
                }
                if (best != from) {
                    pair_sum[from] = out_sum;
                    pair_sum[best] += affinity[best * n + i];
                    kernels::subtract_from(cluster_affinity(from), cache.mutual_row(i));
                    kernels::add_to(cluster_affinity(best), cache.mutual_row(i));
                    --sizes[from];
                    ++sizes[best];
                    labels[i] = best;
                    ++moves;
                }
            }
            if (moves == 0) {
                break;
            }
        }
    }
    return finish(Partition::from_labels(labels, k), cache, passes, converged);
}

OptimumResult find_optimum(const ComprehensionCache& cache, const OptimumOptions& options, std::uint64_t seed)
{
    const std::size_t n = cache.size();
    if (options.k_min < 1 || options.k_min > options.k_max || options.k_min > n) {
        throw std::invalid_argument("find_optimum: need 1 <= k_min <= k_max and k_min <= N");
    }
    if (options.restarts < 1) {
        throw std::invalid_argument("find_optimum: restarts must be at least 1");
    }
    const std::size_t k_max = std::min(options.k_max, n);

    std::optional<ClusteringResult> overall;
    std::vector<std::pair<std::size_t, double>> scan;
    for (std::size_t k = options.k_min; k <= k_max; ++k) {
        std::optional<ClusteringResult> best;
        for (std::size_t restart = 0; restart < options.restarts; ++restart) {
            Rng rng(derive_seed({seed, static_cast<std::uint64_t>(StreamTag::clustering), k, restart}));
            auto candidate = kmeans_language(cache, k, rng, options.kmeans);
            if (!best || candidate.w_avg > best->w_avg) {
                best = std::move(candidate);
            }
        }
        scan.emplace_back(k, best->w_avg);
        if (!overall || best->w_avg > overall->w_avg) {
            overall = std::move(best);
        }
    }
    const std::size_t k_star = overall->partition.k();
    return OptimumResult{k_star, overall->w_avg, overall->i_avg, std::move(overall->partition), std::move(scan)};
}

namespace {

struct BruteForceSearch {
    const ComprehensionCache& cache;
    std::size_t n;
    std::size_t k;
    std::vector<std::size_t> labels;
    std::vector<std::size_t> sizes;
    std::vector<double> pair_sums;
    std::vector<std::size_t> best_labels;
    double best_score = -1.0;

    void visit(std::size_t agent, std::size_t used)
    {
        if (agent == n) {
            double total = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                if (sizes[c] >= 2) {
                    const double pairs = static_cast<double>(sizes[c]) * static_cast<double>(sizes[c] - 1) / 2.0;
                    total += pair_sums[c] / pairs;
                }
            }
            const double score = total / static_cast<double>(k);
            if (score > best_score) {
                best_score = score;
                best_labels = labels;
            }
            return;
        }
        // every remaining agent may be needed to open the unused blocks
        const std::size_t remaining = n - agent;
        const std::size_t limit = std::min(used + 1, k);
        for (std::size_t c = 0; c < limit; ++c) {
            const std::size_t now_used = c == used ? used + 1 : used;
            if (k - now_used > remaining - 1) {
                continue;
            }
            double added = 0.0;
            for (std::size_t j = 0; j < agent; ++j) {
                if (labels[j] == c) {
                    added += cache.mutual(agent, j);
                }
            }
            labels[agent] = c;
            ++sizes[c];
            pair_sums[c] += added;
            visit(agent + 1, now_used);
            pair_sums[c] -= added;
            --sizes[c];
        }
    }
};

} // namespace

ClusteringResult brute_force_best(const ComprehensionCache& cache, std::size_t k)
{
    const std::size_t n = cache.size();
    if (n > brute_force_limit) {
        throw std::invalid_argument("brute_force_best: population too large for exhaustive enumeration");
    }
    if (k < 1 || k > n) {
        throw std::invalid_argument("brute_force_best: cluster count must lie in [1, N]");
    }
    BruteForceSearch search{cache, n, k, std::vector<std::size_t>(n, 0), std::vector<std::size_t>(k, 0),
                            std::vector<double>(k, 0.0), {}, -1.0};
    search.visit(0, 0);
    return finish(Partition::from_labels(search.best_labels, k), cache, 0, true);
}

} // namespace langdiv
