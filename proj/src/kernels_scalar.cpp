#include "langdiv/kernels.hpp"

namespace langdiv::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) noexcept
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

void add_to(double* dst, const double* src, std::size_t n) noexcept
{
    for (std::size_t i = 0; i < n; ++i) {
        dst[i] += src[i];
    }
}

void subtract_from(double* dst, const double* src, std::size_t n) noexcept
{
    for (std::size_t i = 0; i < n; ++i) {
        dst[i] -= src[i];
    }
}

double sum(const double* a, std::size_t n) noexcept
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i];
    }
    return acc;
}

} // namespace langdiv::kernels::scalar
