#include "godron/kernels.hpp"

namespace godron::kernels {

#if defined(GODRON_HAVE_AVX2_TU)
const Kernel& avx2Kernel();
#endif
#if defined(GODRON_HAVE_NEON_TU)
const Kernel& neonKernel();
#endif

const std::vector<Kernel>& allKernels() {
    static const std::vector<Kernel> ks = [] {
        std::vector<Kernel> v;
        v.push_back(scalarKernel());
#if defined(GODRON_HAVE_AVX2_TU)
        v.push_back(avx2Kernel());
#endif
#if defined(GODRON_HAVE_NEON_TU)
        v.push_back(neonKernel());
#endif
        return v;
    }();
    return ks;
}

const Kernel& activeKernel() {
    static const Kernel* active = [] {
#if defined(GODRON_HAVE_AVX2_TU) && defined(__GNUC__)
        if (__builtin_cpu_supports("avx2")) return &avx2Kernel();
#endif
#if defined(GODRON_HAVE_NEON_TU)
        return &neonKernel();
#endif
        return &scalarKernel();
    }();
    return *active;
}

const char* activeKernelName() { return activeKernel().name; }

void fillGrid(const Poly2& p, double x0, double x1, double y0, double y1,
              int resX, int resY, std::vector<double>& out) {
    out.resize(std::size_t(resX) * resY);
    const double dx = resX > 1 ? (x1 - x0) / (resX - 1) : 0.0;
    const double dy = resY > 1 ? (y1 - y0) / (resY - 1) : 0.0;
    std::vector<double> xs(resX);
    for (int i = 0; i < resX; ++i) xs[i] = x0 + i * dx;
    const Kernel& k = activeKernel();
    std::vector<double> rowCoef;
    for (int j = 0; j < resY; ++j) {
        p.reduceAtY(y0 + j * dy, rowCoef);
        k.rowEval(rowCoef.data(), rowCoef.size(), xs.data(), &out[std::size_t(j) * resX],
                  std::size_t(resX));
    }
}

}  // namespace godron::kernels
