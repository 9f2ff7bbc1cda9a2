#include "csjl/jl.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "csjl/rng.hpp"
#include "csjl/simd/kernels.hpp"

namespace csjl {

std::string_view family_name(ProjectionFamily f) {
    switch (f) {
        case ProjectionFamily::kGaussian:
            return "gaussian";
        case ProjectionFamily::kBernoulli:
            return "bernoulli";
        case ProjectionFamily::kScaledProjection:
            return "scaled_projection";
        case ProjectionFamily::kIdentity:
            return "identity";
        case ProjectionFamily::kCustom:
            return "custom";
    }
    return "unknown";
}

ProjectionFamily parse_family(std::string_view name) {
    for (auto f : {ProjectionFamily::kGaussian, ProjectionFamily::kBernoulli, ProjectionFamily::kScaledProjection,
                   ProjectionFamily::kIdentity, ProjectionFamily::kCustom}) {
        if (family_name(f) == name) return f;
    }
    throw std::invalid_argument("unknown projection family '" + std::string(name) + "'");
}

ProjectionMatrix::ProjectionMatrix(std::size_t k, std::size_t d, std::vector<double> entries, ProjectionFamily family,
                                   std::uint64_t seed)
    : k_(k), d_(d), entries_(std::move(entries)), family_(family), seed_(seed) {
    if (k_ == 0 || d_ == 0) throw std::invalid_argument("ProjectionMatrix: empty shape");
    if (k_ > d_) throw std::invalid_argument("ProjectionMatrix: k must not exceed d");
    if (entries_.size() != k_ * d_) throw std::invalid_argument("ProjectionMatrix: entry count mismatch");
}

ProjectionMatrix ProjectionMatrix::identity(std::size_t d) {
    std::vector<double> e(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) e[i * d + i] = 1.0;
    return ProjectionMatrix(d, d, std::move(e), ProjectionFamily::kIdentity, 0);
}

void ProjectionMatrix::apply(std::span<const double> x, std::span<double> out) const {
    if (x.size() != d_ || out.size() != k_) throw std::invalid_argument("ProjectionMatrix::apply: dimension mismatch");
    simd::active().matvec(out.data(), entries_.data(), x.data(), k_, d_);
}

std::vector<double> ProjectionMatrix::apply(std::span<const double> x) const {
    std::vector<double> out(k_);
    apply(x, out);
    return out;
}

AgentVectors ProjectionMatrix::apply(const AgentVectors& vectors) const {
    AgentVectors out(vectors.agents(), k_);
    for (std::size_t i = 0; i < vectors.agents(); ++i) apply(vectors.row(i), out.row(i));
    return out;
}

ProjectionMatrix generate(ProjectionFamily family, std::size_t k, std::size_t d, std::uint64_t seed) {
    if (k == 0 || d == 0) throw std::invalid_argument("generate: k and d must be >= 1");
    if (k > d) throw std::invalid_argument("generate: k must not exceed d");
    Engine eng = make_engine(seed, Stream::kProjection);
    std::vector<double> e(k * d);
    switch (family) {
        case ProjectionFamily::kGaussian: {
            std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(k)));
            for (double& x : e) x = normal(eng);
            break;
        }
        case ProjectionFamily::kBernoulli: {
            const double s = 1.0 / std::sqrt(static_cast<double>(k));
            std::uint64_t bits = 0;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (i % 64 == 0) bits = eng();
                e[i] = (bits & 1U) != 0U ? s : -s;
                bits >>= 1U;
            }
            break;
        }
        case ProjectionFamily::kScaledProjection: {
            std::normal_distribution<double> normal(0.0, 1.0);
            Eigen::MatrixXd g(d, k);
            for (std::size_t c = 0; c < k; ++c) {
                for (std::size_t r = 0; r < d; ++r) g(r, c) = normal(eng);
            }
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
            const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
            const double s = std::sqrt(static_cast<double>(d) / static_cast<double>(k));
            for (std::size_t r = 0; r < k; ++r) {
                for (std::size_t c = 0; c < d; ++c) e[r * d + c] = s * q(c, r);
            }
            break;
        }
        case ProjectionFamily::kIdentity:
            if (k != d) throw std::invalid_argument("generate: identity requires k == d");
            return ProjectionMatrix::identity(d);
        case ProjectionFamily::kCustom:
            throw std::invalid_argument("generate: custom matrices are not generated");
    }
    return ProjectionMatrix(k, d, std::move(e), family, seed);
}

double operator_norm(const ProjectionMatrix& m, double rel_tol, int max_iter) {
    const std::size_t k = m.rows();
    const std::size_t d = m.cols();
    const auto& kern = simd::active();
    std::vector<double> x(d), y(k), z(d);
    // Deterministic, generic start vector.
    for (std::size_t i = 0; i < d; ++i) x[i] = 1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i));
    double norm = std::sqrt(kern.dot(x.data(), x.data(), d));
    for (double& c : x) c /= norm;
    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        kern.matvec(y.data(), m.entries().data(), x.data(), k, d);
        std::fill(z.begin(), z.end(), 0.0);
        for (std::size_t r = 0; r < k; ++r) kern.axpy(z.data(), y[r], m.entries().data() + r * d, d);
        const double next = kern.dot(x.data(), z.data(), d);  // Rayleigh quotient of M^T M
        norm = std::sqrt(kern.dot(z.data(), z.data(), d));
        if (norm == 0.0) return 0.0;
        for (std::size_t i = 0; i < d; ++i) x[i] = z[i] / norm;
        if (std::abs(next - lambda) <= rel_tol * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(lambda);
}

DistortionReport check_weak_jl(const ProjectionMatrix& m, const std::vector<std::vector<double>>& points, double eps,
                               double delta) {
    DistortionReport rep;
    const auto& kern = simd::active();
    std::vector<double> img(m.rows());
    for (const auto& x : points) {
        ++rep.points;
        m.apply(x, img);
        const double nx = std::sqrt(kern.dot(x.data(), x.data(), x.size()));
        const double nm = std::sqrt(kern.dot(img.data(), img.data(), img.size()));
        const bool quasi = (1.0 - eps) * nx <= nm && nm <= (1.0 + eps) * nx;
        if (nx > 0.0) {
            const double ratio = nm / nx;
            rep.max_expand = std::max(rep.max_expand, ratio - 1.0);
            if (nx > delta) rep.max_shrink = std::max(rep.max_shrink, 1.0 - ratio);
        }
        if (quasi) continue;
        ++rep.strong_violations;
        if (nx <= delta && nm <= delta) {
            ++rep.delta_bucket;
        } else {
            ++rep.weak_violations;
        }
    }
    return rep;
}

std::uint64_t curve_sample_count(double lipschitz, std::size_t d, double delta, double eps) {
    if (!(lipschitz >= 0.0) || !(delta > 0.0) || !(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("curve_sample_count: need L >= 0, delta > 0, eps in (0,1)");
    }
    const double n = 4.0 * lipschitz * (std::sqrt(static_cast<double>(d)) + 2.0) / (delta * eps);
    if (n >= 1.8e19) throw std::overflow_error("curve_sample_count: count exceeds 64 bits");
    return static_cast<std::uint64_t>(std::ceil(n));
}

namespace {

double log_add(double a, double b) {
    if (a == -INFINITY) return b;
    if (b == -INFINITY) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

DimensionEstimate dimension_estimate(const ModelParams& params, double horizon, double eps, double delta,
                                     double initial_velocity_spread) {
    params.validate();
    if (!(horizon > 0.0) || !(eps > 0.0) || !(delta > 0.0) || !(initial_velocity_spread >= 0.0)) {
        throw std::invalid_argument("dimension_estimate: arguments must be positive");
    }
    const double n = static_cast<double>(params.agents);
    const double tau = params.sampling_time;
    DimensionEstimate out;
    const double steps = std::floor(horizon / tau + 1e-9);
    out.branching_exponent = steps + 1.0;
    out.log_paths = out.branching_exponent * std::log(n);
    const double lip = std::sqrt(2.0 * n * initial_velocity_spread);
    const double pairs = n * (n - 1.0) / 2.0;
    const double per_path = (horizon + tau) * pairs * 4.0 * lip *
                            (std::sqrt(static_cast<double>(params.dim)) + 2.0) / (delta * eps);
    out.log_n1 = per_path > 0.0 ? out.log_paths + std::log(per_path) : -INFINITY;
    out.log_n2 = (steps + 3.0) * std::log(n);
    out.log_n3 = std::log(2.0 * n);
    out.log_total = log_add(log_add(out.log_n1, out.log_n2), out.log_n3);
    out.k0 = std::ceil(out.proportionality * out.log_total / (eps * eps));
    return out;
}

double exactness_at_zero(const ProjectionMatrix& m, const AgentVectors& v0) {
    if (v0.dim() != m.cols()) throw std::invalid_argument("exactness_at_zero: dimension mismatch");
    const auto& kern = simd::active();
    const auto dec = perp_decompose(v0);
    double num = 0.0;
    double den = 0.0;
    std::vector<double> img(m.rows());
    for (std::size_t i = 0; i < v0.agents(); ++i) {
        const auto p = dec.perp.row(i);
        num += kern.dot(p.data(), p.data(), p.size());
        m.apply(p, img);
        den += kern.dot(img.data(), img.data(), img.size());
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(1.0 - num / den);
}

LemmaVerdict technical_lemma_check(const AgentVectors& a, const AgentVectors& b, const ProjectionMatrix& m,
                                   double delta) {
    if (a.agents() != b.agents() || a.dim() != m.cols() || b.dim() != m.rows()) {
        throw std::invalid_argument("technical_lemma_check: shape mismatch");
    }
    if (!(delta > 0.0)) throw std::invalid_argument("technical_lemma_check: Delta must be > 0");
    const auto& kern = simd::active();
    const std::size_t n = a.agents();
    LemmaVerdict v;
    std::vector<double> ma(m.rows());
    std::vector<double> norm_a(n), norm_b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ai = a.row(i);
        const auto bi = b.row(i);
        m.apply(ai, ma);
        norm_a[i] = std::sqrt(kern.dot(ai.data(), ai.data(), ai.size()));
        norm_b[i] = std::sqrt(kern.dot(bi.data(), bi.data(), bi.size()));
        const double nma = std::sqrt(kern.dot(ma.data(), ma.data(), ma.size()));
        const bool quasi = 0.5 * norm_a[i] <= nma && nma <= 1.5 * norm_a[i];
        const bool small = norm_a[i] <= delta && nma <= delta;
        if (!quasi && !small) {
            v.status = LemmaStatus::kHypothesisViolated;
            v.detail = "weak JL (eps=1/2, delta=Delta) fails at a_" + std::to_string(i + 1);
            return v;
        }
        const double err = std::sqrt(kern.sq_dist(ma.data(), bi.data(), ma.size()));
        if (err > delta) {
            v.status = LemmaStatus::kHypothesisViolated;
            v.detail = "|M a_" + std::to_string(i + 1) + " - b_" + std::to_string(i + 1) + "| > Delta";
            return v;
        }
        v.mean_sq_a += norm_a[i] * norm_a[i];
        v.mean_sq_b += norm_b[i] * norm_b[i];
    }
    v.mean_sq_a /= static_cast<double>(n);
    v.mean_sq_b /= static_cast<double>(n);
    v.max_index = static_cast<std::size_t>(std::max_element(norm_b.begin(), norm_b.end()) - norm_b.begin());

    auto fail = [&](const std::string& what) {
        v.status = LemmaStatus::kConclusionViolated;
        v.detail = what;
    };
    const double root_a = std::sqrt(v.mean_sq_a);
    const double root_b = std::sqrt(v.mean_sq_b);
    if (root_b >= 2.0 * delta) {
        v.large_branch = true;
        const double ai = norm_a[v.max_index];
        if (ai < norm_b[v.max_index] / 4.0) {
            fail("|a_i| >= |b_i|/4");
        } else if (ai < kOrderingConstant * root_a) {
            fail("|a_i| >= c sqrt(A)");
        } else if (v.mean_sq_b > 16.0 * static_cast<double>(n) * v.mean_sq_a) {
            fail("B <= 16 N A");
        }
    }
    if (root_b <= 2.0 * delta && root_a > kSpreadConstant * delta) fail("sqrt(A) <= C Delta");
    return v;
}

}  // namespace csjl
