#include "csjl/simd/kernels.hpp"

namespace csjl::simd {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sq_dist(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpby_to(double* out, const double* base, double h, const double* k, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + h * k[i];
}

void pair_exchange(double* acc_i, double* acc_j, double w, const double* vi, const double* vj,
                   std::size_t n) {
    for (std::size_t c = 0; c < n; ++c) {
        const double f = w * (vj[c] - vi[c]);
        acc_i[c] += f;
        acc_j[c] -= f;
    }
}

void rk4_combine(double* out, const double* base, double h, const double* k1, const double* k2,
                 const double* k3, const double* k4, std::size_t n) {
    const double s = h / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = base[i] + s * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

void matvec(double* y, const double* m, const double* x, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(m + r * cols, x, cols);
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::kScalar, dot,         sq_dist, axpy, axpby_to,
                                   pair_exchange, rk4_combine, matvec};
    return table;
}

}  // namespace csjl::simd
