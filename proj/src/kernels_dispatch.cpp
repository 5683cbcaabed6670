#include "langdiv/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>

namespace langdiv {

namespace {

struct KernelTable {
    Isa isa;
    double (*dot)(const double*, const double*, std::size_t) noexcept;
    void (*add_to)(double*, const double*, std::size_t) noexcept;
    void (*subtract_from)(double*, const double*, std::size_t) noexcept;
    double (*sum)(const double*, std::size_t) noexcept;
};

constexpr KernelTable scalar_table{Isa::scalar, kernels::scalar::dot, kernels::scalar::add_to,
                                   kernels::scalar::subtract_from, kernels::scalar::sum};

#if defined(LANGDIV_HAVE_AVX2_KERNELS)
constexpr KernelTable avx2_table{Isa::avx2, kernels::avx2::dot, kernels::avx2::add_to,
                                 kernels::avx2::subtract_from, kernels::avx2::sum};
#endif

#if defined(LANGDIV_HAVE_NEON_KERNELS)
constexpr KernelTable neon_table{Isa::neon, kernels::neon::dot, kernels::neon::add_to,
                                 kernels::neon::subtract_from, kernels::neon::sum};
#endif

const KernelTable* table_for(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return &scalar_table;
    case Isa::avx2:
#if defined(LANGDIV_HAVE_AVX2_KERNELS)
        return &avx2_table;
#else
        return nullptr;
#endif
    case Isa::neon:
#if defined(LANGDIV_HAVE_NEON_KERNELS)
        return &neon_table;
#else
        return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable* detect() noexcept
{
    if (const char* env = std::getenv("LANGDIV_ISA")) {
        if (auto requested = parse_isa(env); requested && isa_available(*requested)) {
            return table_for(*requested);
        }
    }
    if (isa_available(Isa::avx2)) {
        return table_for(Isa::avx2);
    }
    if (isa_available(Isa::neon)) {
        return table_for(Isa::neon);
    }
    return &scalar_table;
}

std::atomic<const KernelTable*>& active_table() noexcept
{
    static std::atomic<const KernelTable*> table{detect()};
    return table;
}

inline const KernelTable& table() noexcept
{
    return *active_table().load(std::memory_order_relaxed);
}

} // namespace

std::string_view isa_name(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return "scalar";
    case Isa::avx2:
        return "avx2";
    case Isa::neon:
        return "neon";
    }
    return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) noexcept
{
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
        if (name == isa_name(isa)) {
            return isa;
        }
    }
    return std::nullopt;
}

bool isa_available(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#if defined(LANGDIV_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Isa::neon:
#if defined(LANGDIV_HAVE_NEON_KERNELS)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Isa active_isa() noexcept
{
    return table().isa;
}

bool force_isa(Isa isa) noexcept
{
    if (!isa_available(isa)) {
        return false;
    }
    active_table().store(table_for(isa), std::memory_order_relaxed);
    return true;
}

namespace kernels {

double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    assert(a.size() == b.size());
    return table().dot(a.data(), b.data(), a.size());
}

void add_to(std::span<double> dst, std::span<const double> src) noexcept
{
    assert(dst.size() == src.size());
    table().add_to(dst.data(), src.data(), dst.size());
}

void subtract_from(std::span<double> dst, std::span<const double> src) noexcept
{
    assert(dst.size() == src.size());
    table().subtract_from(dst.data(), src.data(), dst.size());
}

double sum(std::span<const double> a) noexcept
{
    return table().sum(a.data(), a.size());
}

} // namespace kernels
} // namespace langdiv
