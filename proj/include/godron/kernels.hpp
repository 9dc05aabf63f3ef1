#pragma once
#include <cstddef>
#include <string>
#include <vector>

#include "godron/poly.hpp"

namespace godron::kernels {

// Row kernel: evaluate the univariate polynomial with coefficients
// coef[0..n-1] (ascending powers) at x0 + k*dx, k = 0..count-1, by Horner.
// Every variant performs the identical mul/add sequence per point, so the
// scalar reference and the SIMD implementations agree bit for bit
// (the build disables FP contraction).
using RowEvalFn = void (*)(const double* coef, std::size_t n, const double* xs,
                           double* out, std::size_t count);

struct Kernel {
    const char* name;
    RowEvalFn rowEval;
};

// Scalar reference, always present.
const Kernel& scalarKernel();

// All compiled variants (scalar first), regardless of CPU support.
const std::vector<Kernel>& allKernels();

// Variant selected at runtime for this CPU.
const Kernel& activeKernel();
const char* activeKernelName();

// Fill a res_x x res_y grid (row-major, y outer) with p evaluated over the
// window using the active kernel. Grid point (i, j) sits at
// (x0 + i*dx, y0 + j*dy) with dx = (x1-x0)/(res_x-1), same for y.
void fillGrid(const Poly2& p, double x0, double x1, double y0, double y1,
              int resX, int resY, std::vector<double>& out);

}  // namespace godron::kernels
