#pragma once

// Proto-language representation. An agent's association counts fix its
// encoding and decoding probabilities; comprehension is measured between
// agents and over groups of agents.

#include <cstddef>
#include <span>
#include <vector>

namespace langdiv {

/// M x S nonnegative usage counts: how often signal x was used for meaning mu.
class AssociationMatrix {
public:
    AssociationMatrix(std::size_t meanings, std::size_t signals);

    /// Row-major M x S values. Throws std::invalid_argument on a size
    /// mismatch or a negative entry.
    AssociationMatrix(std::size_t meanings, std::size_t signals, std::vector<double> values);

    std::size_t meanings() const noexcept { return meanings_; }
    std::size_t signals() const noexcept { return signals_; }

    double at(std::size_t meaning, std::size_t signal) const noexcept
    {
        return values_[meaning * signals_ + signal];
    }

    void increment(std::size_t meaning, std::size_t signal, double count = 1.0) noexcept
    {
        values_[meaning * signals_ + signal] += count;
    }

    double row_sum(std::size_t meaning) const noexcept;
    double column_sum(std::size_t signal) const noexcept;

    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const AssociationMatrix&, const AssociationMatrix&) = default;

private:
    std::size_t meanings_;
    std::size_t signals_;
    std::vector<double> values_;
};

/// M x S; row mu is the distribution of signals emitted for meaning mu.
class EncodingMatrix {
public:
    EncodingMatrix(std::size_t meanings, std::size_t signals, std::vector<double> values);

    std::size_t meanings() const noexcept { return meanings_; }
    std::size_t signals() const noexcept { return signals_; }

    double at(std::size_t meaning, std::size_t signal) const noexcept
    {
        return values_[meaning * signals_ + signal];
    }

    std::span<const double> row(std::size_t meaning) const noexcept
    {
        return std::span<const double>(values_).subspan(meaning * signals_, signals_);
    }

    /// Row-major M x S storage.
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const EncodingMatrix&, const EncodingMatrix&) = default;

private:
    std::size_t meanings_;
    std::size_t signals_;
    std::vector<double> values_;
};

/// Logically S x M; row x is the distribution over meanings understood from
/// signal x (all zero if the signal is never used). Stored meaning-major so
/// that comprehension reduces to one contiguous dot product with the
/// sender's encoding.
class DecodingMatrix {
public:
    /// `meaning_major` holds d(x, mu) at [mu * S + x].
    DecodingMatrix(std::size_t meanings, std::size_t signals, std::vector<double> meaning_major);

    std::size_t meanings() const noexcept { return meanings_; }
    std::size_t signals() const noexcept { return signals_; }

    double at(std::size_t signal, std::size_t meaning) const noexcept
    {
        return values_[meaning * signals_ + signal];
    }

    /// Copy of logical row x (length M).
    std::vector<double> signal_row(std::size_t signal) const;

    std::span<const double> meaning_major() const noexcept { return values_; }

    friend bool operator==(const DecodingMatrix&, const DecodingMatrix&) = default;

private:
    std::size_t meanings_;
    std::size_t signals_;
    std::vector<double> values_;
};

/// Row-normalizes `assoc`. Throws std::invalid_argument if any meaning row
/// sums to zero.
EncodingMatrix derive_encoding(const AssociationMatrix& assoc);

/// Column-normalizes `assoc`; unused signals decode to an all-zero row.
DecodingMatrix derive_decoding(const AssociationMatrix& assoc);

/// Probability that a meaning sent by the owner of `sender` is recovered by
/// the owner of `receiver`, averaged over meanings.
double comprehension(const EncodingMatrix& sender, const DecodingMatrix& receiver);

/// An immutable language user. Encoding and decoding are derived once at
/// construction.
class Agent {
public:
    Agent(std::size_t id, std::size_t position, AssociationMatrix assoc);

    std::size_t id() const noexcept { return id_; }
    std::size_t position() const noexcept { return position_; }
    std::size_t meanings() const noexcept { return assoc_.meanings(); }
    std::size_t signals() const noexcept { return assoc_.signals(); }

    const AssociationMatrix& association() const noexcept { return assoc_; }
    const EncodingMatrix& encoding() const noexcept { return enc_; }
    const DecodingMatrix& decoding() const noexcept { return dec_; }

private:
    std::size_t id_;
    std::size_t position_;
    AssociationMatrix assoc_;
    EncodingMatrix enc_;
    DecodingMatrix dec_;
};

/// F(i,j) = (C(i->j) + C(j->i)) / 2
double mutual_comprehension(const Agent& i, const Agent& j);

/// Pairwise comprehension for one generation.
class ComprehensionCache {
public:
    /// Wraps a precomputed N x N mutual-comprehension matrix (row-major).
    /// Throws std::invalid_argument unless it is square, symmetric and
    /// within [0, 1].
    static ComprehensionCache from_mutual(std::size_t n, std::vector<double> mutual);

    /// Builds from an N x N directed matrix, c[i*N + j] = C(i->j).
    static ComprehensionCache from_directed(std::size_t n, std::vector<double> directed);

    std::size_t size() const noexcept { return n_; }

    double mutual(std::size_t i, std::size_t j) const noexcept { return mutual_[i * n_ + j]; }

    std::span<const double> mutual_row(std::size_t i) const noexcept
    {
        return std::span<const double>(mutual_).subspan(i * n_, n_);
    }

    std::span<const double> mutual_values() const noexcept { return mutual_; }

    bool has_directed() const noexcept { return !directed_.empty(); }

    /// C(i->j); only valid when has_directed().
    double directed(std::size_t i, std::size_t j) const noexcept { return directed_[i * n_ + j]; }

private:
    ComprehensionCache() = default;

    std::size_t n_ = 0;
    std::vector<double> mutual_;
    std::vector<double> directed_;
};

/// Computes every C(i->j) and F(i,j), diagonal included. Throws
/// std::invalid_argument for an empty list or mixed dimensions.
ComprehensionCache build_cache(std::span<const Agent> agents);

/// Mean F over unordered pairs of distinct members; 0 for a singleton.
/// Throws std::invalid_argument for an empty set or an out-of-range index.
double within_community_comprehension(std::span<const std::size_t> members,
                                      const ComprehensionCache& cache);

/// Within-community comprehension of the whole population, W(P).
double overall_comprehension(const ComprehensionCache& cache);

/// Comprehension of a population whose codes are fully uniform: 1/M.
double random_baseline(std::size_t meanings);

} // namespace langdiv
