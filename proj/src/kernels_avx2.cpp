// AVX2 variant of the row kernel. Four lanes run the same Horner recurrence
// as the scalar reference, with plain vmulpd/vaddpd (no FMA), so results are
// bit-identical to the scalar kernel.
#include <immintrin.h>

#include "godron/kernels.hpp"

namespace godron::kernels {

namespace {

void rowEvalAvx2(const double* coef, std::size_t n, const double* xs, double* out,
                 std::size_t count) {
    std::size_t k = 0;
    for (; k + 4 <= count; k += 4) {
        __m256d x = _mm256_loadu_pd(xs + k);
        __m256d r = _mm256_setzero_pd();
        for (std::size_t i = n; i-- > 0;) {
            r = _mm256_add_pd(_mm256_mul_pd(r, x), _mm256_set1_pd(coef[i]));
        }
        _mm256_storeu_pd(out + k, r);
    }
    for (; k < count; ++k) {
        const double x = xs[k];
        double r = 0.0;
        for (std::size_t i = n; i-- > 0;) r = r * x + coef[i];
        out[k] = r;
    }
}

}  // namespace

const Kernel& avx2Kernel() {
    static const Kernel k{"avx2", rowEvalAvx2};
    return k;
}

}  // namespace godron::kernels
