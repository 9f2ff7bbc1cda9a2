// Compiled with -mavx2 -mfma. Only reached after a runtime CPU check.
#include "csjl/simd/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace csjl::simd {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double sq_dist(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void axpy(double* y, double alpha, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void axpby_to(double* out, const double* base, double h, const double* k, std::size_t n) {
    const __m256d vh = _mm256_set1_pd(h);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i,
                         _mm256_fmadd_pd(vh, _mm256_loadu_pd(k + i), _mm256_loadu_pd(base + i)));
    }
    for (; i < n; ++i) out[i] = base[i] + h * k[i];
}

void pair_exchange(double* acc_i, double* acc_j, double w, const double* vi, const double* vj,
                   std::size_t n) {
    const __m256d vw = _mm256_set1_pd(w);
    std::size_t c = 0;
    for (; c + 4 <= n; c += 4) {
        const __m256d f =
            _mm256_mul_pd(vw, _mm256_sub_pd(_mm256_loadu_pd(vj + c), _mm256_loadu_pd(vi + c)));
        _mm256_storeu_pd(acc_i + c, _mm256_add_pd(_mm256_loadu_pd(acc_i + c), f));
        _mm256_storeu_pd(acc_j + c, _mm256_sub_pd(_mm256_loadu_pd(acc_j + c), f));
    }
    for (; c < n; ++c) {
        const double f = w * (vj[c] - vi[c]);
        acc_i[c] += f;
        acc_j[c] -= f;
    }
}

void rk4_combine(double* out, const double* base, double h, const double* k1, const double* k2,
                 const double* k3, const double* k4, std::size_t n) {
    const double s = h / 6.0;
    const __m256d vs = _mm256_set1_pd(s);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i));
        t = _mm256_fmadd_pd(two, t, _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_loadu_pd(k4 + i)));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vs, t, _mm256_loadu_pd(base + i)));
    }
    for (; i < n; ++i) out[i] = base[i] + s * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void matvec(double* y, const double* m, const double* x, std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(m + r * cols, x, cols);
}

}  // namespace

const KernelTable* avx2_kernels_impl() {
    static const KernelTable table{Isa::kAvx2,   dot,         sq_dist, axpy, axpby_to,
                                   pair_exchange, rk4_combine, matvec};
    return &table;
}

}  // namespace csjl::simd

#else

namespace csjl::simd {
const KernelTable* avx2_kernels_impl() { return nullptr; }
}  // namespace csjl::simd

#endif
