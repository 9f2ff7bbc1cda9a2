#pragma once
// Right-hand side of the (controlled) Cucker–Smale system, the classical RK4
// step and the sampled-control run loop.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csjl/control_vector.hpp"
#include "csjl/model.hpp"

namespace csjl {

struct Derivative {
    AgentVectors dx;
    AgentVectors dv;
};

/// Raised when a step produces a non-finite coordinate.
class NumericalBlowup : public std::runtime_error {
  public:
    NumericalBlowup(std::size_t step, double t)
        : std::runtime_error("non-finite state after step " + std::to_string(step) + " (t=" + std::to_string(t) + ")"),
          step_(step),
          t_(t) {}
    std::size_t step() const { return step_; }
    double time() const { return t_; }

  private:
    std::size_t step_;
    double t_;
};

/// dx_i = v_i, dv_i = (1/N) sum_j a(|x_i - x_j|)(v_j - v_i) + u_i.
Derivative rhs(const FlockState& state, const ControlVector& control, const ModelParams& params);

/// Reusable RK4 integrator; owns its stage buffers.
class Rk4Integrator {
  public:
    explicit Rk4Integrator(const ModelParams& params) : params_(params) {}

    /// One classical RK4 step of width h with the control frozen. Advances t by
    /// h and vbar_drift by h * mean(u). h = 0 leaves the state untouched.
    void step(FlockState& state, const ControlVector& control, double h);

    /// Velocity part of the right-hand side at `state`.
    void derivative(const FlockState& state, const ControlVector& control, AgentVectors& dv);

  private:
    void ensure(std::size_t agents, std::size_t dim);
    void eval(const AgentVectors& x, const AgentVectors& v, const ControlVector& u, AgentVectors& dv) const;

    ModelParams params_;
    AgentVectors x_stage_, v_stage_, k1v_, k2v_, k3v_, k4v_, k2x_, k3x_, k4x_;
    std::vector<double> weights_;
};

FlockState rk4_step(const FlockState& state, const ControlVector& control, double h, const ModelParams& params);

bool all_finite(const FlockState& state);

/// Context handed to a control policy at each sample time.
struct SampleContext {
    std::size_t step = 0;  // n, the sample index
    double t = 0.0;        // n * tau
    Moments moments;
};

/// Feedback law evaluated once per sampling interval.
class ControlPolicy {
  public:
    virtual ~ControlPolicy() = default;
    virtual ControlVector control(const FlockState& state, const SampleContext& ctx) = 0;
};

/// The identically-zero policy.
class NoControl final : public ControlPolicy {
  public:
    ControlVector control(const FlockState& state, const SampleContext&) override {
        return ControlVector::zero(state.agents(), state.dim());
    }
};

struct Sample {
    std::size_t step = 0;
    double t = 0.0;
    Moments moments;
    double gamma_sq = 0.0;  // +inf when gamma is infinite
    double margin = 0.0;
    std::optional<std::size_t> control_index;  // 0-based agent, sparse controls only
    bool active = false;                       // nonzero control applied on [t, t + tau)
    double control_cost = 0.0;                 // sum_i |u_i|
};

struct RunOptions {
    double horizon = 100.0;
    std::size_t substeps = 1;          // RK4 steps per sampling interval
    bool stop_at_switch_off = true;    // end the run at T0
    bool record_states = false;        // keep a snapshot per sample
};

struct Trajectory {
    ModelParams params;
    std::optional<std::uint64_t> seed;
    std::vector<Sample> samples;
    std::vector<FlockState> states;  // one per sample when requested
    FlockState final_state;
    std::optional<double> switch_off_time;  // T0
    std::optional<double> half_time;        // T0.5
    double max_control_cost = 0.0;
};

/// Moments, gamma^2 and margin of `state` at sample `step` (t = step * tau).
Sample observe(const FlockState& state, std::size_t step, const ModelParams& params);

/// Number of sampling intervals covering `horizon` (at least one).
std::size_t interval_count(double horizon, double tau);

/// Sampled solution: the control is evaluated at n*tau, frozen for the
/// interval and integrated with `substeps` RK4 steps of width tau/substeps.
/// Control is zero from the first sample inside the consensus region onwards.
Trajectory run_sampled(const FlockState& initial, ControlPolicy& policy, const ModelParams& params,
                       const RunOptions& options, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace csjl
