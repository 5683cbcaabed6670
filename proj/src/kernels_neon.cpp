#include "langdiv/kernels.hpp"

#if defined(LANGDIV_HAVE_NEON_KERNELS)

#include <arm_neon.h>

namespace langdiv::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) noexcept
{
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

void add_to(double* dst, const double* src, std::size_t n) noexcept
{
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(dst + i, vaddq_f64(vld1q_f64(dst + i), vld1q_f64(src + i)));
    }
    for (; i < n; ++i) {
        dst[i] += src[i];
    }
}

void subtract_from(double* dst, const double* src, std::size_t n) noexcept
{
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(dst + i, vsubq_f64(vld1q_f64(dst + i), vld1q_f64(src + i)));
    }
    for (; i < n; ++i) {
        dst[i] -= src[i];
    }
}

double sum(const double* a, std::size_t n) noexcept
{
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc = vaddq_f64(acc, vld1q_f64(a + i));
    }
    double total = vaddvq_f64(acc);
    for (; i < n; ++i) {
        total += a[i];
    }
    return total;
}

} // namespace langdiv::kernels::neon

#endif
