#include "csjl/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "csjl/quadrature.hpp"
#include "csjl/simd/kernels.hpp"

namespace csjl {

void ModelParams::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("ModelParams: " + what); };
    if (agents < 2) fail("agent count must be >= 2");
    if (dim < 1) fail("dimension must be >= 1");
    if (!(kernel_scale > 0.0)) fail("kernel scale K must be > 0");
    if (!(kernel_offset > 0.0)) fail("kernel offset sigma must be > 0");
    if (!(kernel_decay >= 0.0)) fail("kernel decay beta must be >= 0");
    if (!(budget > 0.0)) fail("control budget theta must be > 0");
    if (!(sampling_time > 0.0)) fail("sampling time tau must be > 0");
}

FlockState::FlockState(AgentVectors positions, AgentVectors velocities)
    : x(std::move(positions)), v(std::move(velocities)), vbar_drift(x.dim(), 0.0) {
    if (!x.same_shape(v)) throw std::invalid_argument("FlockState: x and v shapes differ");
}

double kernel_a(double r, const ModelParams& params) {
    if (!(r >= 0.0)) throw std::invalid_argument("kernel_a: distance must be >= 0");
    const double s2 = params.kernel_offset * params.kernel_offset;
    return params.kernel_scale * std::pow(s2 + r * r, -params.kernel_decay);
}

double lipschitz_constant(const ModelParams& params) {
    const double beta = params.kernel_decay;
    if (beta == 0.0) return 0.0;
    const double sigma = params.kernel_offset;
    const double r = sigma / std::sqrt(2.0 * beta + 1.0);
    return 2.0 * beta * params.kernel_scale * r * std::pow(sigma * sigma + r * r, -(beta + 1.0));
}

PerpDecomposition perp_decompose(const AgentVectors& vectors) {
    const std::size_t n = vectors.agents();
    const std::size_t dim = vectors.dim();
    if (n == 0) throw std::invalid_argument("perp_decompose: empty family");
    PerpDecomposition out{std::vector<double>(dim, 0.0), AgentVectors(n, dim)};
    const auto& k = simd::active();
    for (std::size_t i = 0; i < n; ++i) k.axpy(out.mean.data(), 1.0, vectors.row(i).data(), dim);
    const double inv = 1.0 / static_cast<double>(n);
    for (double& m : out.mean) m *= inv;
    for (std::size_t i = 0; i < n; ++i) {
        k.axpby_to(out.perp.row(i).data(), vectors.row(i).data(), -1.0, out.mean.data(), dim);
    }
    return out;
}

double disagreement(const AgentVectors& vectors) {
    const auto dec = perp_decompose(vectors);
    const auto& k = simd::active();
    double s = 0.0;
    for (std::size_t i = 0; i < vectors.agents(); ++i) {
        const auto p = dec.perp.row(i);
        s += k.dot(p.data(), p.data(), p.size());
    }
    return s / static_cast<double>(vectors.agents());
}

Moments moments(const FlockState& state) { return {disagreement(state.x), disagreement(state.v)}; }

GammaValue gamma_functional(double spread, const ModelParams& params) {
    if (!(spread >= 0.0)) throw std::invalid_argument("gamma_functional: X0 must be >= 0");
    const double beta = params.kernel_decay;
    if (beta <= 0.5) return GammaValue::infinite();

    const double K = params.kernel_scale;
    const double sigma = params.kernel_offset;
    const double scale = std::sqrt(2.0 * static_cast<double>(params.agents));
    // With s = sqrt(2N) r:  gamma = (1/sqrt(2N)) int_{s0}^inf a(s) ds.
    const double s0 = scale * std::sqrt(spread);
    const double split = std::max(s0, sigma);
    constexpr double kRelTol = 1e-11;

    double head = 0.0;
    if (s0 < split) {
        auto a = [&](double s) { return K * std::pow(sigma * sigma + s * s, -beta); };
        head = integrate_gk15(a, s0, split, kRelTol).value;
    }
    // Tail: s = split * w^{-q}, q = 1/(2 beta - 1), maps [split, inf) onto (0, 1]
    // and leaves K q split^{1-2beta} (1 + (sigma/split)^2 w^{2q})^{-beta}.
    const double q = 1.0 / (2.0 * beta - 1.0);
    const double ratio2 = (sigma / split) * (sigma / split);
    const double prefactor = K * q * std::pow(split, 1.0 - 2.0 * beta);
    auto tail_integrand = [&](double w) { return std::pow(1.0 + ratio2 * std::pow(w, 2.0 * q), -beta); };
    const double tail = prefactor * integrate_gk15(tail_integrand, 0.0, 1.0, kRelTol).value;
    return GammaValue::finite((head + tail) / scale);
}

double consensus_margin(const Moments& m, const ModelParams& params) {
    const GammaValue g = gamma_functional(m.spread, params);
    if (g.is_infinite()) return -std::numeric_limits<double>::infinity();
    return m.velocity - g.squared();
}

double consensus_margin(const FlockState& state, const ModelParams& params) {
    return consensus_margin(moments(state), params);
}

}  // namespace csjl
