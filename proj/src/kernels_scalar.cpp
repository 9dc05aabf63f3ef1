#include "godron/kernels.hpp"

namespace godron::kernels {

namespace {

void rowEvalScalar(const double* coef, std::size_t n, const double* xs, double* out,
                   std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
        const double x = xs[k];
        double r = 0.0;
        for (std::size_t i = n; i-- > 0;) r = r * x + coef[i];
        out[k] = r;
    }
}

}  // namespace

const Kernel& scalarKernel() {
    static const Kernel k{"scalar", rowEvalScalar};
    return k;
}

}  // namespace godron::kernels
