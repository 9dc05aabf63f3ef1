// NEON variant of the row kernel (aarch64 baseline). Two lanes run the same
// Horner recurrence as the scalar reference with separate mul/add, keeping
// results bit-identical to the scalar kernel.
#include <arm_neon.h>

#include "godron/kernels.hpp"

namespace godron::kernels {

namespace {

void rowEvalNeon(const double* coef, std::size_t n, const double* xs, double* out,
                 std::size_t count) {
    std::size_t k = 0;
    for (; k + 2 <= count; k += 2) {
        float64x2_t x = vld1q_f64(xs + k);
        float64x2_t r = vdupq_n_f64(0.0);
        for (std::size_t i = n; i-- > 0;) {
            r = vaddq_f64(vmulq_f64(r, x), vdupq_n_f64(coef[i]));
        }
        vst1q_f64(out + k, r);
    }
    for (; k < count; ++k) {
        const double x = xs[k];
        double r = 0.0;
        for (std::size_t i = n; i-- > 0;) r = r * x + coef[i];
        out[k] = r;
    }
}

}  // namespace

const Kernel& neonKernel() {
    static const Kernel k{"neon", rowEvalNeon};
    return k;
}

}  // namespace godron::kernels
