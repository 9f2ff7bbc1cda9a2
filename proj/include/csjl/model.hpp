#pragma once
// Cucker–Smale alignment model: parameters, state, interaction kernel,
// disagreement functionals and the consensus-region functional.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "csjl/agent_vectors.hpp"

namespace csjl {

struct ModelParams {
    std::size_t agents = 2;      // N
    std::size_t dim = 1;         // d, ambient dimension of the high system
    double kernel_scale = 1.0;   // K
    double kernel_offset = 1.0;  // sigma
    double kernel_decay = 0.0;   // beta
    double budget = 1.0;         // theta, per-instant l1(l2) bound on the control
    double sampling_time = 0.01; // tau

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Positions x and consensus parameters v of N agents in some dimension.
/// `vbar_drift` accumulates (1/N) * sum_i int u_i ds, so that the mean consensus
/// parameter can be reconstructed as vbar(0) + vbar_drift.
struct FlockState {
    FlockState() = default;
    FlockState(std::size_t agents, std::size_t dim) : x(agents, dim), v(agents, dim), vbar_drift(dim, 0.0) {}
    FlockState(AgentVectors positions, AgentVectors velocities);

    std::size_t agents() const { return x.agents(); }
    std::size_t dim() const { return x.dim(); }

    AgentVectors x;
    AgentVectors v;
    double t = 0.0;
    std::vector<double> vbar_drift;

    friend bool operator==(const FlockState&, const FlockState&) = default;
};

/// X = B(x, x) and V = B(v, v).
struct Moments {
    double spread = 0.0;    // X (or Y for a projected state)
    double velocity = 0.0;  // V (or W)
};

struct PerpDecomposition {
    std::vector<double> mean;
    AgentVectors perp;
};

/// gamma(X0) is either finite or +infinity (kernel_decay <= 1/2).
class GammaValue {
  public:
    static GammaValue finite(double v) { return GammaValue(v, false); }
    static GammaValue infinite() { return GammaValue(std::numeric_limits<double>::infinity(), true); }

    bool is_infinite() const { return infinite_; }
    /// +inf when infinite.
    double value() const { return value_; }
    double squared() const { return infinite_ ? value_ : value_ * value_; }

  private:
    GammaValue(double v, bool inf) : value_(v), infinite_(inf) {}
    double value_;
    bool infinite_;
};

/// a(r) = K / (sigma^2 + r^2)^beta.
double kernel_a(double r, const ModelParams& params);

/// max_r |a'(r)|; attained at r* = sigma / sqrt(2 beta + 1), zero for beta = 0.
double lipschitz_constant(const ModelParams& params);

PerpDecomposition perp_decompose(const AgentVectors& vectors);

/// Mean-square disagreement (1/N) sum_i |u_i - mean|^2 of one family of vectors.
double disagreement(const AgentVectors& vectors);

Moments moments(const FlockState& state);

/// gamma(X0) = int_{sqrt(X0)}^inf a(sqrt(2N) r) dr, to relative 1e-9.
GammaValue gamma_functional(double spread, const ModelParams& params);

/// V - gamma(X)^2; <= 0 inside the consensus region, -inf when gamma is infinite.
double consensus_margin(const FlockState& state, const ModelParams& params);
double consensus_margin(const Moments& m, const ModelParams& params);

}  // namespace csjl
