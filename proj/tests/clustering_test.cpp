#include "langdiv/clustering.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace langdiv;

namespace {

ComprehensionCache random_cache(std::size_t n, Rng& rng)
{
    std::vector<double> f(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            f[i * n + j] = f[j * n + i] = rng.unit();
        }
    }
    return ComprehensionCache::from_mutual(n, std::move(f));
}

/// Agents labelled by block; F = inside within a block, across otherwise.
ComprehensionCache block_cache(std::span<const std::size_t> block_of, double inside, double across)
{
    const std::size_t n = block_of.size();
    std::vector<double> f(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            f[i * n + j] = i == j ? 1.0 : (block_of[i] == block_of[j] ? inside : across);
        }
    }
    return ComprehensionCache::from_mutual(n, std::move(f));
}

ComprehensionCache constant_cache(std::size_t n, double c)
{
    return ComprehensionCache::from_mutual(n, std::vector<double>(n * n, c));
}

// Independent oracle: every labelling in k^N with all blocks used, scored
// from scratch.
double oracle_best(const ComprehensionCache& cache, std::size_t k)
{
    const std::size_t n = cache.size();
    std::vector<std::size_t> labels(n, 0);
    double best = -1.0;
    for (;;) {
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t l : labels) {
            ++sizes[l];
        }
        if (std::none_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s == 0; })) {
            double score = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                if (sizes[c] < 2) {
                    continue;
                }
                double sum = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = i + 1; j < n; ++j) {
                        if (labels[i] == c && labels[j] == c) {
                            sum += cache.mutual(i, j);
                        }
                    }
                }
                score += sum / (static_cast<double>(sizes[c]) * static_cast<double>(sizes[c] - 1) / 2.0);
            }
            best = std::max(best, score / static_cast<double>(k));
        }
        std::size_t pos = 0;
        while (pos < n && ++labels[pos] == k) {
            labels[pos++] = 0;
        }
        if (pos == n) {
            return best;
        }
    }
}

bool is_partition_of(const Partition& p, std::size_t n)
{
    std::vector<int> hits(n, 0);
    for (const auto& c : p.clusters()) {
        if (c.empty()) {
            return false;
        }
        for (std::size_t i : c) {
            ++hits[i];
        }
    }
    return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

} // namespace

TEST_CASE("partition validation")
{
    CHECK_NOTHROW(Partition(3, {{0, 2}, {1}}));
    CHECK_THROWS_AS(Partition(3, {{0, 2}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(Partition(3, {{0, 2}, {2, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(Partition(3, {{0, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(Partition(3, {{0, 3}, {1, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(Partition(2, {}), std::invalid_argument);

    const std::vector<std::size_t> labels{1, 0, 1, 2};
    const auto p = Partition::from_labels(labels, 3);
    CHECK(p.k() == 3);
    CHECK(p.canonical() == Partition(4, {{0, 2}, {1}, {3}}));
    CHECK_THROWS_AS(Partition::from_labels(labels, 2), std::invalid_argument);
}

TEST_CASE("avg_within")
{
    Rng rng(1);
    const auto cache = random_cache(6, rng);
    CHECK(avg_within(Partition(6, {{0, 1, 2, 3, 4, 5}}), cache) == overall_comprehension(cache));
    CHECK(avg_within(Partition(3, {{0}, {1}, {2}}), constant_cache(3, 0.5)) == 0.0);

    std::vector<double> f(16, 0.0);
    for (std::size_t i = 0; i < 4; ++i) {
        f[i * 4 + i] = 1.0;
    }
    f[0 * 4 + 1] = f[1 * 4 + 0] = 0.8;
    f[2 * 4 + 3] = f[3 * 4 + 2] = 0.4;
    CHECK(avg_within(Partition(4, {{0, 1}, {2, 3}}), ComprehensionCache::from_mutual(4, f)) ==
          doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("inter_community and avg_inter")
{
    const auto same = constant_cache(5, 1.0);
    const std::vector<std::size_t> a{0, 1};
    const std::vector<std::size_t> b{2, 3, 4};
    CHECK(inter_community(a, b, same) == 1.0);

    Rng rng(4);
    const auto random = random_cache(5, rng);
    CHECK(inter_community(a, b, random) == doctest::Approx(inter_community(b, a, random)).epsilon(1e-15));

    const std::vector<std::size_t> blocks{0, 0, 1, 1, 1};
    CHECK(inter_community(a, b, block_cache(blocks, 0.9, 0.1)) == doctest::Approx(0.1).epsilon(1e-15));

    const std::vector<std::size_t> overlap{1, 2};
    CHECK_THROWS_AS(inter_community(a, overlap, same), std::invalid_argument);
    CHECK_THROWS_AS(inter_community(a, std::vector<std::size_t>{}, same), std::invalid_argument);

    const Partition two(5, {{0, 1}, {2, 3, 4}});
    CHECK(avg_inter(two, random) == inter_community(a, b, random));
    CHECK(avg_inter(two, constant_cache(5, 0.3)) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK_THROWS_AS(avg_inter(Partition(5, {{0, 1, 2, 3, 4}}), random), std::invalid_argument);

    // singleton clusters with pairwise F of 0.1, 0.2 and 0.3
    const auto three = ComprehensionCache::from_mutual(3, {1.0, 0.1, 0.2, 0.1, 1.0, 0.3, 0.2, 0.3, 1.0});
    CHECK(avg_inter(Partition(3, {{0}, {1}, {2}}), three) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("kmeans_language")
{
    SUBCASE("separated blocks are recovered")
    {
        const std::vector<std::size_t> blocks{0, 1, 0, 1, 1, 0, 0, 1};
        const auto cache = block_cache(blocks, 0.9, 0.1);
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            Rng rng(seed);
            const auto res = kmeans_language(cache, 2, rng);
            CHECK(res.converged);
            CHECK(res.partition.canonical() == Partition(8, {{0, 2, 5, 6}, {1, 3, 4, 7}}));
            CHECK(res.w_avg == doctest::Approx(0.9).epsilon(1e-12));
            REQUIRE(res.i_avg.has_value());
            CHECK(*res.i_avg < res.w_avg);
        }
    }
    SUBCASE("k = 1 is the whole population")
    {
        Rng gen(8);
        const auto cache = random_cache(9, gen);
        Rng rng(2);
        const auto res = kmeans_language(cache, 1, rng);
        CHECK(res.partition.k() == 1);
        CHECK(std::abs(res.w_avg - overall_comprehension(cache)) <= 1e-12);
        CHECK(res.converged);
        CHECK(res.passes == 1);
        CHECK_FALSE(res.i_avg.has_value());
    }
    SUBCASE("identical agents gather instead of splitting freely")
    {
        // eight identical agents plus two outsiders
        std::vector<std::size_t> blocks(10, 0);
        blocks[8] = 1;
        blocks[9] = 2;
        std::vector<double> f(100);
        for (std::size_t i = 0; i < 10; ++i) {
            for (std::size_t j = 0; j < 10; ++j) {
                f[i * 10 + j] = i == j ? 1.0 : (blocks[i] == 0 && blocks[j] == 0 ? 1.0 : 0.1);
            }
        }
        const auto cache = ComprehensionCache::from_mutual(10, f);
        const auto opt = find_optimum(cache, {}, 5);
        CHECK(opt.k_star == 1);
    }
    SUBCASE("outputs are valid partitions with metrics in range")
    {
        Rng gen(13);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 2 + gen.below(20);
            const auto cache = random_cache(n, gen);
            const std::size_t k = 1 + gen.below(n);
            for (bool self : {false, true}) {
                KMeansOptions opts;
                opts.self_in_assignment = self;
                Rng rng(trial);
                const auto res = kmeans_language(cache, k, rng, opts);
                CHECK(res.partition.k() == k);
                CHECK(is_partition_of(res.partition, n));
                CHECK(res.w_avg >= 0.0);
                CHECK(res.w_avg <= 1.0);
                CHECK(res.i_avg.has_value() == (k >= 2));
                if (res.i_avg) {
                    CHECK(*res.i_avg >= 0.0);
                    CHECK(*res.i_avg <= 1.0);
                }
                CHECK(res.passes <= opts.max_passes);
            }
        }
    }
    SUBCASE("converged runs are fixed points of the assignment rule")
    {
        Rng gen(21);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t n = 3 + gen.below(15);
            const auto cache = random_cache(n, gen);
            const std::size_t k = 2 + gen.below(std::min<std::size_t>(n - 1, 4));
            Rng rng(trial);
            const auto res = kmeans_language(cache, k, rng);
            REQUIRE(res.converged);
            const auto& clusters = res.partition.clusters();
            for (std::size_t c = 0; c < clusters.size(); ++c) {
                if (clusters[c].size() < 2) {
                    continue; // vetoed
                }
                for (std::size_t i : clusters[c]) {
                    const auto mean_to = [&](std::size_t d) {
                        double sum = 0.0;
                        for (std::size_t j : clusters[d]) {
                            sum += j == i ? 0.0 : cache.mutual(i, j);
                        }
                        return sum / static_cast<double>(clusters[d].size() - (d == c ? 1 : 0));
                    };
                    const double own = mean_to(c);
                    for (std::size_t d = 0; d < clusters.size(); ++d) {
                        if (d == c) {
                            continue;
                        }
                        // an equal score elsewhere only moves i towards a lower index
                        CHECK((own > mean_to(d) - 1e-12 && (own >= mean_to(d) + 1e-12 || c < d)));
                    }
                }
            }
        }
    }
    SUBCASE("restarts stay below the exhaustive optimum")
    {
        Rng gen(21);
        const auto cache = random_cache(8, gen);
        const double exact = oracle_best(cache, 2);
        double best = 0.0;
        for (std::uint64_t r = 0; r < 20; ++r) {
            Rng rng(derive_seed({77, r}));
            best = std::max(best, kmeans_language(cache, 2, rng).w_avg);
        }
        CHECK(best <= exact + 1e-12);
    }
    SUBCASE("refinement with the self term reaches the exhaustive optimum on small caches")
    {
        KMeansOptions opts;
        opts.self_in_assignment = true;
        opts.refine_within = true;
        Rng gen(21);
        int close = 0;
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 4 + gen.below(5);
            const auto cache = random_cache(n, gen);
            double best = 0.0;
            for (std::uint64_t r = 0; r < 20; ++r) {
                Rng rng(derive_seed({static_cast<std::uint64_t>(trial), r}));
                best = std::max(best, kmeans_language(cache, 2, rng, opts).w_avg);
            }
            const double exact = oracle_best(cache, 2);
            CHECK(best <= exact + 1e-12);
            close += best >= 0.98 * exact ? 1 : 0;
        }
        CHECK(close >= 27);
    }
    Rng rng(1);
    const auto cache = constant_cache(3, 0.5);
    CHECK_THROWS_AS(kmeans_language(cache, 0, rng), std::invalid_argument);
    CHECK_THROWS_AS(kmeans_language(cache, 4, rng), std::invalid_argument);
}

TEST_CASE("find_optimum")
{
    SUBCASE("planted three groups")
    {
        const std::vector<std::size_t> blocks{0, 0, 0, 0, 1, 1, 1, 2, 2, 2, 2, 2};
        const auto opt = find_optimum(block_cache(blocks, 0.9, 0.1), {}, 3);
        CHECK(opt.k_star == 3);
        CHECK(opt.w_star == doctest::Approx(0.9).epsilon(1e-12));
        REQUIRE(opt.i_star.has_value());
        CHECK(*opt.i_star == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(opt.partition.canonical() == Partition(12, {{0, 1, 2, 3}, {4, 5, 6}, {7, 8, 9, 10, 11}}));
    }
    SUBCASE("constant cache prefers one community")
    {
        const auto opt = find_optimum(constant_cache(7, 0.4), {}, 3);
        CHECK(opt.k_star == 1);
        CHECK(opt.w_star == doctest::Approx(0.4).epsilon(1e-12));
        CHECK_FALSE(opt.i_star.has_value());
    }
    SUBCASE("scan is clamped to N and w_star is its maximum")
    {
        Rng gen(6);
        const auto cache = random_cache(6, gen);
        const auto opt = find_optimum(cache, {}, 1);
        REQUIRE(opt.scan.size() == 6);
        double top = 0.0;
        for (std::size_t i = 0; i < opt.scan.size(); ++i) {
            CHECK(opt.scan[i].first == i + 1);
            top = std::max(top, opt.scan[i].second);
        }
        CHECK(opt.w_star == top);
        CHECK(opt.k_star >= 1);
        CHECK(opt.k_star <= 6);
        CHECK(opt.w_star >= overall_comprehension(cache));
    }
    SUBCASE("scan is bounded by exhaustive search for N = 9, K = 1..4")
    {
        Rng gen(99);
        for (int trial = 0; trial < 5; ++trial) {
            const auto cache = random_cache(9, gen);
            OptimumOptions opts;
            opts.k_max = 4;
            opts.restarts = 20;
            const auto opt = find_optimum(cache, opts, static_cast<std::uint64_t>(trial));
            for (const auto& [k, w] : opt.scan) {
                const double exact = oracle_best(cache, k);
                CHECK(w <= exact + 1e-12);
                if (k == 1) {
                    CHECK(std::abs(w - exact) <= 1e-12);
                }
            }
        }
    }
    SUBCASE("more restarts never lower the scan")
    {
        Rng gen(3);
        const auto cache = random_cache(11, gen);
        std::vector<double> previous;
        for (std::size_t restarts = 1; restarts <= 8; ++restarts) {
            OptimumOptions opts;
            opts.restarts = restarts;
            const auto opt = find_optimum(cache, opts, 17);
            for (std::size_t i = 0; i < previous.size(); ++i) {
                CHECK(opt.scan[i].second >= previous[i]);
            }
            previous.clear();
            for (const auto& entry : opt.scan) {
                previous.push_back(entry.second);
            }
        }
    }
    OptimumOptions bad;
    bad.k_min = 3;
    bad.k_max = 2;
    CHECK_THROWS_AS(find_optimum(constant_cache(4, 0.5), bad, 1), std::invalid_argument);
    bad = OptimumOptions{};
    bad.restarts = 0;
    CHECK_THROWS_AS(find_optimum(constant_cache(4, 0.5), bad, 1), std::invalid_argument);
}

TEST_CASE("brute_force_best")
{
    SUBCASE("N = 2, k = 2")
    {
        const auto res = brute_force_best(constant_cache(2, 0.5), 2);
        CHECK(res.partition.canonical() == Partition(2, {{0}, {1}}));
        CHECK(res.w_avg == 0.0);
    }
    SUBCASE("N = 3, k = 2 picks the strongest pair")
    {
        // candidates: {0,1}|{2} = 0.45, {0,2}|{1} = 0.10, {1,2}|{0} = 0.25
        const auto cache = ComprehensionCache::from_mutual(3, {1.0, 0.9, 0.2, 0.9, 1.0, 0.5, 0.2, 0.5, 1.0});
        const auto res = brute_force_best(cache, 2);
        CHECK(res.partition.canonical() == Partition(3, {{0, 1}, {2}}));
        CHECK(res.w_avg == doctest::Approx(0.45).epsilon(1e-15));
    }
    SUBCASE("planted blocks")
    {
        const std::vector<std::size_t> blocks{2, 0, 1, 0, 2, 1, 1, 0};
        const auto res = brute_force_best(block_cache(blocks, 0.8, 0.2), 3);
        CHECK(res.partition.canonical() == Partition(8, {{0, 4}, {1, 3, 7}, {2, 5, 6}}));
    }
    SUBCASE("agrees with the labelling oracle")
    {
        Rng gen(5);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 2 + gen.below(7);
            const auto cache = random_cache(n, gen);
            for (std::size_t k = 1; k <= std::min<std::size_t>(n, 4); ++k) {
                CHECK(std::abs(brute_force_best(cache, k).w_avg - oracle_best(cache, k)) <= 1e-12);
            }
        }
    }
    CHECK_THROWS_AS(brute_force_best(constant_cache(13, 0.5), 2), std::invalid_argument);
    CHECK_THROWS_AS(brute_force_best(constant_cache(3, 0.5), 4), std::invalid_argument);
}
