#include "langdiv/language.hpp"

#include "langdiv/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace langdiv {

namespace {

void require(bool condition, const char* message)
{
    if (!condition) {
        throw std::invalid_argument(message);
    }
}

} // namespace

AssociationMatrix::AssociationMatrix(std::size_t meanings, std::size_t signals)
    : meanings_(meanings), signals_(signals), values_(meanings * signals, 0.0)
{
    require(meanings > 0 && signals > 0, "association matrix needs at least one meaning and one signal");
}

AssociationMatrix::AssociationMatrix(std::size_t meanings, std::size_t signals, std::vector<double> values)
    : meanings_(meanings), signals_(signals), values_(std::move(values))
{
    require(meanings > 0 && signals > 0, "association matrix needs at least one meaning and one signal");
    require(values_.size() == meanings * signals, "association matrix value count does not match M x S");
    for (double v : values_) {
        require(std::isfinite(v) && v >= 0.0, "association counts must be finite and nonnegative");
    }
}

double AssociationMatrix::row_sum(std::size_t meaning) const noexcept
{
    return kernels::sum(std::span<const double>(values_).subspan(meaning * signals_, signals_));
}

double AssociationMatrix::column_sum(std::size_t signal) const noexcept
{
    double total = 0.0;
    for (std::size_t mu = 0; mu < meanings_; ++mu) {
        total += at(mu, signal);
    }
    return total;
}

EncodingMatrix::EncodingMatrix(std::size_t meanings, std::size_t signals, std::vector<double> values)
    : meanings_(meanings), signals_(signals), values_(std::move(values))
{
    require(values_.size() == meanings * signals, "encoding matrix value count does not match M x S");
}

DecodingMatrix::DecodingMatrix(std::size_t meanings, std::size_t signals, std::vector<double> meaning_major)
    : meanings_(meanings), signals_(signals), values_(std::move(meaning_major))
{
    require(values_.size() == meanings * signals, "decoding matrix value count does not match M x S");
}

std::vector<double> DecodingMatrix::signal_row(std::size_t signal) const
{
    std::vector<double> row(meanings_);
    for (std::size_t mu = 0; mu < meanings_; ++mu) {
        row[mu] = at(signal, mu);
    }
    return row;
}

EncodingMatrix derive_encoding(const AssociationMatrix& assoc)
{
    const std::size_t m = assoc.meanings();
    const std::size_t s = assoc.signals();
    std::vector<double> values(assoc.values().begin(), assoc.values().end());
    for (std::size_t mu = 0; mu < m; ++mu) {
        const double total = assoc.row_sum(mu);
        if (!(total > 0.0)) {
            throw std::invalid_argument("cannot derive encoding: meaning row " + std::to_string(mu) +
                                        " has zero total count");
        }
        for (std::size_t x = 0; x < s; ++x) {
            values[mu * s + x] /= total;
        }
    }
    return EncodingMatrix(m, s, std::move(values));
}

DecodingMatrix derive_decoding(const AssociationMatrix& assoc)
{
    const std::size_t m = assoc.meanings();
    const std::size_t s = assoc.signals();
    std::vector<double> values(m * s, 0.0);
    for (std::size_t x = 0; x < s; ++x) {
        const double total = assoc.column_sum(x);
        if (total > 0.0) {
            for (std::size_t mu = 0; mu < m; ++mu) {
                values[mu * s + x] = assoc.at(mu, x) / total;
            }
        }
    }
    return DecodingMatrix(m, s, std::move(values));
}

double comprehension(const EncodingMatrix& sender, const DecodingMatrix& receiver)
{
    if (sender.meanings() != receiver.meanings() || sender.signals() != receiver.signals()) {
        throw std::invalid_argument("comprehension: sender and receiver dimensions differ");
    }
    // sum over mu, x of e(mu, x) * d(x, mu); both are stored [mu * S + x].
    return kernels::dot(sender.values(), receiver.meaning_major()) / static_cast<double>(sender.meanings());
}

Agent::Agent(std::size_t id, std::size_t position, AssociationMatrix assoc)
    : id_(id),
      position_(position),
      assoc_(std::move(assoc)),
      enc_(derive_encoding(assoc_)),
      dec_(derive_decoding(assoc_))
{
}

double mutual_comprehension(const Agent& i, const Agent& j)
{
    return (comprehension(i.encoding(), j.decoding()) + comprehension(j.encoding(), i.decoding())) / 2.0;
}

ComprehensionCache ComprehensionCache::from_mutual(std::size_t n, std::vector<double> mutual)
{
    require(n > 0, "comprehension cache must have at least one agent");
    require(mutual.size() == n * n, "comprehension cache must be N x N");
    constexpr double slack = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = mutual[i * n + j];
            require(std::isfinite(v) && v >= -slack && v <= 1.0 + slack,
                    "mutual comprehension values must lie in [0, 1]");
            require(std::abs(v - mutual[j * n + i]) <= slack, "mutual comprehension matrix must be symmetric");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (mutual[i * n + j] + mutual[j * n + i]) / 2.0;
            mutual[i * n + j] = v;
            mutual[j * n + i] = v;
        }
    }
    ComprehensionCache cache;
    cache.n_ = n;
    cache.mutual_ = std::move(mutual);
    return cache;
}

ComprehensionCache ComprehensionCache::from_directed(std::size_t n, std::vector<double> directed)
{
    require(n > 0, "comprehension cache must have at least one agent");
    require(directed.size() == n * n, "comprehension cache must be N x N");
    ComprehensionCache cache;
    cache.n_ = n;
    cache.mutual_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        cache.mutual_[i * n + i] = directed[i * n + i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (directed[i * n + j] + directed[j * n + i]) / 2.0;
            cache.mutual_[i * n + j] = v;
            cache.mutual_[j * n + i] = v;
        }
    }
    cache.directed_ = std::move(directed);
    return cache;
}

ComprehensionCache build_cache(std::span<const Agent> agents)
{
    require(!agents.empty(), "build_cache: empty population");
    const std::size_t n = agents.size();
    const std::size_t m = agents.front().meanings();
    const std::size_t s = agents.front().signals();
    for (const Agent& a : agents) {
        require(a.meanings() == m && a.signals() == s, "build_cache: agents have mixed dimensions");
    }

    std::vector<double> directed(n * n);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < n; ++i) {
        const auto enc = agents[i].encoding().values();
        for (std::size_t j = 0; j < n; ++j) {
            directed[i * n + j] = kernels::dot(enc, agents[j].decoding().meaning_major()) * inv_m;
        }
    }
    return ComprehensionCache::from_directed(n, std::move(directed));
}

double within_community_comprehension(std::span<const std::size_t> members, const ComprehensionCache& cache)
{
    require(!members.empty(), "within-community comprehension of an empty community");
    for (std::size_t idx : members) {
        require(idx < cache.size(), "community member index out of range");
    }
    if (members.size() == 1) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t a = 0; a < members.size(); ++a) {
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            total += cache.mutual(members[a], members[b]);
        }
    }
    const double pairs = static_cast<double>(members.size()) * static_cast<double>(members.size() - 1) / 2.0;
    return total / pairs;
}

double overall_comprehension(const ComprehensionCache& cache)
{
    const std::size_t n = cache.size();
    if (n < 2) {
        return 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            total += cache.mutual(i, j);
        }
    }
    return total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

double random_baseline(std::size_t meanings)
{
    require(meanings >= 1, "random baseline needs at least one meaning");
    return 1.0 / static_cast<double>(meanings);
}

} // namespace langdiv
