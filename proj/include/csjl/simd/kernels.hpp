#pragma once
// Dense double-precision kernels used by the integrator, the moments and the
// projection code. Every kernel has a scalar reference implementation and, on
// x86-64, an AVX2+FMA variant. The variant is chosen once per process.

#include <cstddef>
#include <string_view>

namespace csjl::simd {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
    Isa isa;
    // sum a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum (a[i]-b[i])^2
    double (*sq_dist)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
    // out = base + h * k
    void (*axpby_to)(double* out, const double* base, double h, const double* k, std::size_t n);
    // acc_i += w*(vj - vi); acc_j -= w*(vj - vi)
    void (*pair_exchange)(double* acc_i, double* acc_j, double w, const double* vi, const double* vj,
                          std::size_t n);
    // out = base + h/6 * (k1 + 2 k2 + 2 k3 + k4)
    void (*rk4_combine)(double* out, const double* base, double h, const double* k1, const double* k2,
                        const double* k3, const double* k4, std::size_t n);
    // y[r] = sum_c m[r*cols + c] * x[c]
    void (*matvec)(double* y, const double* m, const double* x, std::size_t rows, std::size_t cols);
};

const KernelTable& scalar_kernels();

// Nullptr when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

// Kernel table in use. Defaults to the widest ISA the CPU supports; the
// environment variable CONSENSUS_JL_SIMD=scalar forces the reference path.
const KernelTable& active();

// Overrides the process-wide selection (tests, benchmarks).
void force(Isa isa);

std::string_view isa_name(Isa isa);

}  // namespace csjl::simd
