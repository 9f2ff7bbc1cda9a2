#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "csjl/simd/kernels.hpp"

using namespace csjl::simd;

namespace {

std::vector<double> noise(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

bool close(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

}  // namespace

TEST_CASE("scalar and AVX2 kernels agree on every length, including ragged tails") {
    const KernelTable* wide = avx2_kernels();
    if (wide == nullptr) {
        MESSAGE("AVX2/FMA unavailable; only the scalar table is exercised");
        return;
    }
    const KernelTable& ref = scalar_kernels();
    std::mt19937_64 rng(7);
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 100, 257}) {
        const auto a = noise(n, rng), b = noise(n, rng), c = noise(n, rng), d = noise(n, rng);
        CHECK(close(ref.dot(a.data(), b.data(), n), wide->dot(a.data(), b.data(), n)));
        CHECK(close(ref.sq_dist(a.data(), b.data(), n), wide->sq_dist(a.data(), b.data(), n)));

        auto y1 = c, y2 = c;
        ref.axpy(y1.data(), 0.37, a.data(), n);
        wide->axpy(y2.data(), 0.37, a.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]));

        std::vector<double> o1(n), o2(n);
        ref.axpby_to(o1.data(), a.data(), 0.01, b.data(), n);
        wide->axpby_to(o2.data(), a.data(), 0.01, b.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i]));

        auto ai1 = c, aj1 = d, ai2 = c, aj2 = d;
        ref.pair_exchange(ai1.data(), aj1.data(), 0.3, a.data(), b.data(), n);
        wide->pair_exchange(ai2.data(), aj2.data(), 0.3, a.data(), b.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(close(ai1[i], ai2[i]));
            CHECK(close(aj1[i], aj2[i]));
        }

        ref.rk4_combine(o1.data(), a.data(), 0.1, b.data(), c.data(), d.data(), a.data(), n);
        wide->rk4_combine(o2.data(), a.data(), 0.1, b.data(), c.data(), d.data(), a.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i]));
    }
}

TEST_CASE("matvec agrees between kernel tables") {
    const KernelTable* wide = avx2_kernels();
    if (wide == nullptr) return;
    std::mt19937_64 rng(11);
    for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{1, 1}, {3, 5}, {7, 100}, {25, 13}}) {
        const auto m = noise(rows * cols, rng);
        const auto x = noise(cols, rng);
        std::vector<double> y1(rows), y2(rows);
        scalar_kernels().matvec(y1.data(), m.data(), x.data(), rows, cols);
        wide->matvec(y2.data(), m.data(), x.data(), rows, cols);
        for (std::size_t r = 0; r < rows; ++r) CHECK(close(y1[r], y2[r]));
    }
}

TEST_CASE("pair exchange is antisymmetric") {
    const std::vector<double> vi{1, 2, 3, 4, 5}, vj{-1, 0, 1, 2, 3};
    for (const KernelTable* t : {&scalar_kernels(), avx2_kernels()}) {
        if (t == nullptr) continue;
        std::vector<double> ai(5, 0.0), aj(5, 0.0);
        t->pair_exchange(ai.data(), aj.data(), 0.5, vi.data(), vj.data(), 5);
        for (std::size_t c = 0; c < 5; ++c) {
            CHECK(ai[c] == -1.0);
            CHECK(ai[c] + aj[c] == 0.0);
        }
    }
}

TEST_CASE("dispatch can be forced to the reference table and back") {
    const Isa before = active().isa;
    force(Isa::kScalar);
    CHECK(active().isa == Isa::kScalar);
    CHECK(isa_name(Isa::kScalar) == "scalar");
    force(before);
    CHECK(active().isa == before);
}
