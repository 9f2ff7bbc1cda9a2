#pragma once

#include <cmath>
#include <random>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>

#include "csjl/model.hpp"

namespace csjl::testing {

inline ModelParams params(std::size_t n, std::size_t d, double beta, double theta = 1.0, double tau = 0.01,
                          double k = 1.0, double sigma = 1.0) {
    ModelParams p;
    p.agents = n;
    p.dim = d;
    p.kernel_scale = k;
    p.kernel_offset = sigma;
    p.kernel_decay = beta;
    p.budget = theta;
    p.sampling_time = tau;
    return p;
}

inline AgentVectors random_vectors(std::size_t n, std::size_t d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    AgentVectors a(n, d);
    for (double& x : a.values()) x = g(rng);
    return a;
}

inline FlockState random_state(std::size_t n, std::size_t d, std::mt19937_64& rng, double xs = 1.0, double vs = 1.0) {
    return FlockState(random_vectors(n, d, rng, xs), random_vectors(n, d, rng, vs));
}

// Independent oracle: gamma = (K / sqrt(2N)) int_{s0}^inf (sigma^2 + s^2)^-beta ds, s0 = sqrt(2N X0), in
// hypergeometric form with Pfaff-transformed arguments in [0, 1/2].
inline double gamma_oracle(double x0, const ModelParams& p) {
    using boost::math::hypergeometric_pFq;
    const double b = p.kernel_decay;
    const double s2 = p.kernel_offset * p.kernel_offset;
    const double rt = std::sqrt(2.0 * static_cast<double>(p.agents));
    const double s0 = rt * std::sqrt(x0);
    double integral = 0.0;
    if (s0 * s0 <= s2) {
        const double total = std::pow(s2, 0.5 - b) * std::sqrt(M_PI) * std::tgamma(b - 0.5) / (2.0 * std::tgamma(b));
        const double head =
            s0 * std::pow(s2 + s0 * s0, -b) * hypergeometric_pFq({b, 1.0}, {1.5}, s0 * s0 / (s2 + s0 * s0));
        integral = total - head;
    } else {
        integral = s0 * std::pow(s2 + s0 * s0, -b) / (2.0 * b - 1.0) *
                   hypergeometric_pFq({b, 1.0}, {b + 0.5}, s2 / (s2 + s0 * s0));
    }
    return p.kernel_scale * integral / rt;
}

}  // namespace csjl::testing
