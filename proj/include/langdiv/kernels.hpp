#pragma once

// Data-parallel inner loops used by the simulator.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, a vectorized variant (AVX2+FMA on x86-64, NEON on AArch64).
// The variant is picked once at runtime from CPU capabilities; the
// LANGDIV_ISA environment variable ("scalar", "avx2", "neon") or force_isa()
// pins it. All variants are equivalence-tested against the scalar path.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace langdiv {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;
std::optional<Isa> parse_isa(std::string_view name) noexcept;

/// True when `isa` was compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

/// The ISA currently used by the dispatching entry points below.
Isa active_isa() noexcept;

/// Pins the dispatch to `isa`. Returns false (and changes nothing) when the
/// ISA is unavailable on this machine.
bool force_isa(Isa isa) noexcept;

namespace kernels {

/// Sum of a[i] * b[i]. Sizes must match.
double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// dst[i] += src[i]
void add_to(std::span<double> dst, std::span<const double> src) noexcept;

/// dst[i] -= src[i]
void subtract_from(std::span<double> dst, std::span<const double> src) noexcept;

/// Sum of all elements.
double sum(std::span<const double> a) noexcept;

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void add_to(double* dst, const double* src, std::size_t n) noexcept;
void subtract_from(double* dst, const double* src, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define LANGDIV_HAVE_AVX2_KERNELS 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void add_to(double* dst, const double* src, std::size_t n) noexcept;
void subtract_from(double* dst, const double* src, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
} // namespace avx2
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define LANGDIV_HAVE_NEON_KERNELS 1
namespace neon {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void add_to(double* dst, const double* src, std::size_t n) noexcept;
void subtract_from(double* dst, const double* src, std::size_t n) noexcept;
double sum(const double* a, std::size_t n) noexcept;
} // namespace neon
#endif

} // namespace kernels
} // namespace langdiv
