#include <algorithm>
#include <cmath>
#include <limits>

#include "csjl/dynamics.hpp"

namespace csjl {

std::size_t interval_count(double horizon, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("interval_count: tau must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("interval_count: horizon must be > 0");
    const double ratio = horizon / tau;
    const auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
    return std::max<std::size_t>(n, 1);
}

Sample observe(const FlockState& state, std::size_t step, const ModelParams& params) {
    Sample s;
    s.step = step;
    s.t = static_cast<double>(step) * params.sampling_time;
    s.moments = moments(state);
    const GammaValue g = gamma_functional(s.moments.spread, params);
    s.gamma_sq = g.squared();
    s.margin = g.is_infinite() ? -std::numeric_limits<double>::infinity() : s.moments.velocity - s.gamma_sq;
    return s;
}

Trajectory run_sampled(const FlockState& initial, ControlPolicy& policy, const ModelParams& params,
                       const RunOptions& options, std::optional<std::uint64_t> seed) {
    params.validate();
    if (options.substeps == 0) throw std::invalid_argument("run_sampled: substeps must be >= 1");
    const double tau = params.sampling_time;
    const std::size_t intervals = interval_count(options.horizon, tau);
    const double h = tau / static_cast<double>(options.substeps);

    Trajectory traj;
    traj.params = params;
    traj.seed = seed;
    FlockState state = initial;
    state.t = 0.0;
    if (state.vbar_drift.size() != state.dim()) state.vbar_drift.assign(state.dim(), 0.0);

    Rk4Integrator integrator(params);
    bool switched_off = false;
    double initial_margin = 0.0;
    for (std::size_t n = 0; n <= intervals; ++n) {
        state.t = static_cast<double>(n) * tau;
        Sample s = observe(state, n, params);
        if (n == 0) initial_margin = s.margin;

        if (!switched_off && s.margin <= 0.0) {
            switched_off = true;
            traj.switch_off_time = s.t;
        }
        if (!traj.half_time && (s.margin <= 0.5 * initial_margin || s.margin <= 0.0)) traj.half_time = s.t;

        const bool last = n == intervals || (switched_off && options.stop_at_switch_off);
        ControlVector u = ControlVector::zero(state.agents(), state.dim());
        if (!last && !switched_off) {
            u = policy.control(state, SampleContext{n, s.t, s.moments});
            s.control_index = u.active_index;
            s.control_cost = u.l1_norm();
            s.active = s.control_cost > 0.0;
            traj.max_control_cost = std::max(traj.max_control_cost, s.control_cost);
        }
        traj.samples.push_back(s);
        if (options.record_states) traj.states.push_back(state);
        if (last) break;

        for (std::size_t sub = 0; sub < options.substeps; ++sub) integrator.step(state, u, h);
        if (!all_finite(state)) throw NumericalBlowup(n, static_cast<double>(n + 1) * tau);
    }
    traj.final_state = std::move(state);
    return traj;
}

}  // namespace csjl
