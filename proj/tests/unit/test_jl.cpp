#include <doctest.h>

#include <cmath>
#include <random>

#include "csjl/jl.hpp"
#include "helpers.hpp"

using namespace csjl;
using csjl::testing::params;

namespace {

std::vector<std::vector<double>> random_points(std::size_t count, std::size_t d, std::mt19937_64& rng,
                                               bool unit = false) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::vector<double>> pts(count, std::vector<double>(d));
    for (auto& p : pts) {
        double n2 = 0.0;
        for (double& x : p) x = g(rng), n2 += x * x;
        if (unit) for (double& x : p) x /= std::sqrt(n2);
    }
    return pts;
}

ProjectionMatrix scaled(const ProjectionMatrix& m, double f) {
    auto e = m.entries();
    for (double& x : e) x *= f;
    return ProjectionMatrix(m.rows(), m.cols(), e, ProjectionFamily::kCustom, 0);
}

}  // namespace

TEST_CASE("bernoulli entries are +-1/sqrt(k) and columns have unit norm") {
    for (std::size_t k : {1, 4, 25, 55}) {
        const auto m = generate(ProjectionFamily::kBernoulli, k, 100, 3);
        const double s = 1.0 / std::sqrt(static_cast<double>(k));
        for (double x : m.entries()) CHECK(std::abs(x) == s);
        for (std::size_t c = 0; c < m.cols(); ++c) {
            double n2 = 0.0;
            for (std::size_t r = 0; r < k; ++r) n2 += m(r, c) * m(r, c);
            CHECK(std::abs(std::sqrt(n2) - 1.0) <= 4e-16 * static_cast<double>(k));
        }
    }
}

TEST_CASE("bernoulli signs are balanced") {
    const auto m = generate(ProjectionFamily::kBernoulli, 100, 1000, 17);
    double pos = 0;
    for (double x : m.entries()) pos += x > 0;
    CHECK(std::abs(pos / 1e5 - 0.5) < 3.0 * 0.5 / std::sqrt(1e5));
}

TEST_CASE("scaled projection: orthogonal rows and operator norm sqrt(d/k)") {
    for (auto [k, d] : {std::pair<std::size_t, std::size_t>{5, 40}, {25, 100}, {1, 7}, {30, 30}}) {
        const auto m = generate(ProjectionFamily::kScaledProjection, k, d, 9);
        const double f = static_cast<double>(d) / static_cast<double>(k);
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t q = 0; q < k; ++q) {
                double ip = 0.0;
                for (std::size_t c = 0; c < d; ++c) ip += m(r, c) * m(q, c);
                CHECK(std::abs(ip - (r == q ? f : 0.0)) < 1e-10 * f);
            }
        }
        CHECK(std::abs(operator_norm(m) - std::sqrt(f)) < 1e-8);
    }
}

TEST_CASE("gaussian entries have mean 0 and variance 1/k") {
    const std::size_t k = 200, d = 1000;
    const auto m = generate(ProjectionFamily::kGaussian, k, d, 123);
    double sum = 0.0, sq = 0.0;
    for (double x : m.entries()) sum += x, sq += x * x;
    const double n = static_cast<double>(k * d);
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(k * d * k)));
    CHECK(std::abs(var * k - 1.0) < 0.05);
}

TEST_CASE("generation is deterministic and validates shapes") {
    for (auto f : {ProjectionFamily::kGaussian, ProjectionFamily::kBernoulli, ProjectionFamily::kScaledProjection}) {
        CHECK(generate(f, 10, 50, 77).entries() == generate(f, 10, 50, 77).entries());
        CHECK(generate(f, 10, 50, 77).entries() != generate(f, 10, 50, 78).entries());
        CHECK_THROWS_AS(generate(f, 51, 50, 1), std::invalid_argument);
        CHECK_THROWS_AS(generate(f, 0, 50, 1), std::invalid_argument);
    }
    CHECK(parse_family("scaled_projection") == ProjectionFamily::kScaledProjection);
    CHECK_THROWS(parse_family("hadamard"));
}

TEST_CASE("operator norm of simple matrices") {
    CHECK(operator_norm(ProjectionMatrix::identity(6)) == doctest::Approx(1.0));
    ProjectionMatrix m(2, 3, {3, 0, 0, 0, 0, -4}, ProjectionFamily::kCustom, 0);
    CHECK(operator_norm(m) == doctest::Approx(4.0).epsilon(1e-10));
    // Bernoulli norm never exceeds the crude sqrt(d) bound.
    const auto b = generate(ProjectionFamily::kBernoulli, 8, 64, 5);
    CHECK(operator_norm(b) <= std::sqrt(64.0) + 1e-12);
}

TEST_CASE("weak JL classification") {
    const auto id = ProjectionMatrix::identity(5);
    std::vector<std::vector<double>> pts{{0, 0, 0, 0, 0}, {1, 2, 3, 4, 5}, {-1e-3, 0, 0, 0, 1e-3}};
    const auto r = check_weak_jl(id, pts, 1e-6, 0.0);
    CHECK(r.strong_holds());
    CHECK(r.weak_holds());
    CHECK(r.max_expand == 0.0);

    const auto twice = scaled(id, 2.0);
    const auto r2 = check_weak_jl(twice, {{0.1, 0, 0, 0, 0}, {3, 0, 0, 0, 0}}, 0.5, 0.25);
    CHECK(r2.strong_violations == 2);
    CHECK(r2.delta_bucket == 1);  // |x| = 0.1, |Mx| = 0.2 <= delta
    CHECK(r2.weak_violations == 1);
    CHECK(r2.max_expand == doctest::Approx(1.0));
}

TEST_CASE("strong-clause verdicts are scale invariant") {
    std::mt19937_64 rng(31);
    const auto m = generate(ProjectionFamily::kBernoulli, 12, 60, 4);
    auto pts = random_points(50, 60, rng);
    const auto r1 = check_weak_jl(m, pts, 0.3, 0.0);
    for (auto& p : pts) for (double& x : p) x *= 37.5;
    const auto r2 = check_weak_jl(m, pts, 0.3, 0.0);
    CHECK(r1.strong_violations == r2.strong_violations);
    CHECK(r1.max_expand == doctest::Approx(r2.max_expand));
}

TEST_CASE("bernoulli JL success rate at the log scaling (reduced trial count)") {
    const double eps = 0.3;
    const std::size_t points = 200, d = 500;
    const auto k = static_cast<std::size_t>(std::ceil(8.0 / (eps * eps) * std::log(static_cast<double>(points))));
    std::mt19937_64 rng(99);
    int ok = 0;
    for (int t = 0; t < 20; ++t) {
        const auto pts = random_points(points, d, rng, true);
        ok += check_weak_jl(generate(ProjectionFamily::kBernoulli, std::min(k, d), d, 1000 + t), pts, eps, 0.0)
                  .strong_holds();
    }
    CHECK(ok >= 19);
}

TEST_CASE("curve sample count") {
    CHECK(curve_sample_count(1.0, 100, 0.1, 0.5) == 960);
    CHECK(curve_sample_count(0.0, 100, 0.1, 0.5) == 0);
    CHECK(curve_sample_count(3.0, 49, 0.2, 0.25) * 2 == curve_sample_count(3.0, 49, 0.1, 0.25));
    CHECK_THROWS(curve_sample_count(1.0, 10, 0.0, 0.5));
}

TEST_CASE("dimension estimate") {
    const auto p2 = params(2, 4, 0.7, 1.0, 1.0);
    const auto e2 = dimension_estimate(p2, 1.0, 0.5, 0.1, 1.0);
    CHECK(std::exp(e2.log_n2) == doctest::Approx(16.0));
    CHECK(std::exp(e2.log_n3) == doctest::Approx(4.0));
    CHECK(e2.branching_exponent == 2.0);
    // N1 = P (T + tau) C(N,2) 4 L_x (sqrt(d) + 2) / (delta eps) with L_x = sqrt(2 N V0).
    CHECK(std::exp(e2.log_n1) == doctest::Approx(4.0 * 2.0 * 1.0 * 4.0 * 2.0 * 4.0 / 0.05));

    auto p = params(9, 100, 0.6, 5.0, 0.01);
    const auto e = dimension_estimate(p, 115.17, 0.5, 0.1, 1031.8);
    CHECK(e.branching_exponent == 11518.0);
    CHECK(e.k0 > 100.0);
    CHECK(e.proportionality == 1.0);
    const auto half = dimension_estimate(p, 115.17, 0.25, 0.1, 1031.8);
    CHECK(half.k0 / e.k0 == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("exactness at zero") {
    std::mt19937_64 rng(6);
    const auto v = csjl::testing::random_vectors(6, 8, rng);
    CHECK(exactness_at_zero(ProjectionMatrix::identity(8), v) == doctest::Approx(0.0));
    CHECK(exactness_at_zero(scaled(ProjectionMatrix::identity(8), 2.0), v) == doctest::Approx(0.75));
    CHECK(exactness_at_zero(ProjectionMatrix::identity(3), AgentVectors(2, 3, {1, 1, 1, 1, 1, 1})) == 0.0);

    const auto m = generate(ProjectionFamily::kGaussian, 3, 8, 2);
    auto shifted = v;
    for (std::size_t i = 0; i < 6; ++i) for (std::size_t c = 0; c < 8; ++c) shifted(i, c) += 0.5 * c - 3.0;
    CHECK(exactness_at_zero(m, shifted) == doctest::Approx(exactness_at_zero(m, v)).epsilon(1e-10));
}

TEST_CASE("technical lemma: trivial and degenerate instances") {
    std::mt19937_64 rng(12);
    const auto a = csjl::testing::random_vectors(5, 4, rng);
    const auto id = ProjectionMatrix::identity(4);
    const auto v = technical_lemma_check(a, a, id, 1e-6);
    CHECK(v.status == LemmaStatus::kPass);
    CHECK(v.large_branch);

    AgentVectors small(4, 3, {0.1, 0.2, 0.0, -0.3, 0.1, 0.4, 0.5, 0.5, 0.0, 0.0, 0.0, 0.9});
    const auto zero = technical_lemma_check(small, AgentVectors(4, 3), ProjectionMatrix::identity(3), 1.0);
    CHECK(zero.status == LemmaStatus::kPass);
    CHECK_FALSE(zero.large_branch);

    // |M a_i - b_i| > Delta is a hypothesis failure, not a conclusion failure.
    const auto bad = technical_lemma_check(a, AgentVectors(5, 4), id, 1e-6);
    CHECK(bad.status == LemmaStatus::kHypothesisViolated);
}

TEST_CASE("technical lemma on rejection-sampled instances") {
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<std::size_t> un(2, 10), ud(2, 20);
    std::uniform_real_distribution<double> ulog(-3.0, 1.0), uu(0.0, 1.0);
    int accepted = 0, large = 0;
    for (int attempt = 0; attempt < 20000 && accepted < 200; ++attempt) {
        const std::size_t n = un(rng), d = ud(rng);
        const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(d, 10))(rng);
        const auto m = generate(ProjectionFamily::kScaledProjection, k, d, rng());
        const auto a = csjl::testing::random_vectors(n, d, rng, std::pow(10.0, ulog(rng)));
        const double delta = std::pow(10.0, ulog(rng));
        AgentVectors b = m.apply(a);
        std::normal_distribution<double> g(0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> e(k);
            double n2 = 0.0;
            for (double& x : e) x = g(rng), n2 += x * x;
            const double r = delta * uu(rng) / std::sqrt(n2);
            for (std::size_t c = 0; c < k; ++c) b(i, c) += r * e[c];
        }
        const auto verdict = technical_lemma_check(a, b, m, delta);
        if (verdict.status == LemmaStatus::kHypothesisViolated) continue;
        ++accepted;
        large += verdict.large_branch;
        CHECK_MESSAGE(verdict.status == LemmaStatus::kPass, verdict.detail);
    }
    CHECK(accepted == 200);
    CHECK(large > 0);
    CHECK(large < accepted);
}
