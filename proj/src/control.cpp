#include "csjl/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "csjl/simd/kernels.hpp"

namespace csjl {

std::string_view strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::kNone:
            return "none";
        case StrategyKind::kSparse:
            return "SP";
        case StrategyKind::kUniform:
            return "U";
        case StrategyKind::kRandom:
            return "R";
        case StrategyKind::kProjected:
            return "DR";
    }
    return "?";
}

StrategyKind parse_strategy(std::string_view name) {
    for (auto k : {StrategyKind::kNone, StrategyKind::kSparse, StrategyKind::kUniform, StrategyKind::kRandom,
                   StrategyKind::kProjected}) {
        if (strategy_name(k) == name) return k;
    }
    throw std::invalid_argument("unknown strategy '" + std::string(name) + "' (expected none, SP, U, R or DR)");
}

std::string_view mode_name(ThresholdMode mode) {
    return mode == ThresholdMode::kTheoretical ? "theoretical" : "experimental";
}

ThresholdMode parse_mode(std::string_view name) {
    if (name == "theoretical") return ThresholdMode::kTheoretical;
    if (name == "experimental") return ThresholdMode::kExperimental;
    throw std::invalid_argument("unknown threshold mode '" + std::string(name) + "'");
}

namespace {

std::vector<double> mean_of(const AgentVectors& v) {
    std::vector<double> mean(v.dim(), 0.0);
    for (std::size_t i = 0; i < v.agents(); ++i) {
        const auto r = v.row(i);
        for (std::size_t c = 0; c < v.dim(); ++c) mean[c] += r[c];
    }
    const double inv = 1.0 / static_cast<double>(v.agents());
    for (double& m : mean) m *= inv;
    return mean;
}

// Writes -scale * p / |p| into row `index` of `out`, p = v_index - mean.
// Returns false (row left zero) when p vanishes.
bool push_towards_mean(const AgentVectors& v, const std::vector<double>& mean, std::size_t index, double scale,
                       AgentVectors& out) {
    const auto r = v.row(index);
    auto o = out.row(index);
    for (std::size_t c = 0; c < v.dim(); ++c) o[c] = r[c] - mean[c];
    const double norm = std::sqrt(simd::active().dot(o.data(), o.data(), o.size()));
    if (norm == 0.0) {
        std::fill(o.begin(), o.end(), 0.0);
        return false;
    }
    const double f = -scale / norm;
    for (double& c : o) c *= f;
    return true;
}

}  // namespace

IndexChoice select_max_perp_index(const AgentVectors& v) {
    if (v.agents() == 0) throw std::invalid_argument("select_max_perp_index: no agents");
    const auto mean = mean_of(v);
    const auto& k = simd::active();
    IndexChoice out;
    double best = -1.0;
    for (std::size_t i = 0; i < v.agents(); ++i) {
        const double n2 = k.sq_dist(v.row(i).data(), mean.data(), v.dim());
        if (n2 > best) {
            best = n2;
            out.index = i;
        }
    }
    out.zero_norm = best == 0.0;
    return out;
}

ControlVector sparse_control_at(const AgentVectors& v, std::size_t index, double theta) {
    if (index >= v.agents()) throw std::out_of_range("sparse_control_at: agent index out of range");
    ControlVector u(v.agents(), v.dim());
    if (push_towards_mean(v, mean_of(v), index, theta, u.entries)) {
        u.active_index = index;
        u.magnitude = theta;
    }
    return u;
}

ControlVector control_sp(const FlockState& state, const ModelParams& params) {
    const IndexChoice pick = select_max_perp_index(state.v);
    if (pick.zero_norm) return ControlVector::zero(state.agents(), state.dim());
    return sparse_control_at(state.v, pick.index, params.budget);
}

ControlVector control_uniform(const FlockState& state, const ModelParams& params) {
    ControlVector u(state.agents(), state.dim());
    const auto mean = mean_of(state.v);
    const double share = params.budget / static_cast<double>(state.agents());
    bool any = false;
    for (std::size_t i = 0; i < state.agents(); ++i) any = push_towards_mean(state.v, mean, i, share, u.entries) || any;
    if (any) u.magnitude = share;
    return u;
}

ControlVector control_random(const FlockState& state, const ModelParams& params, Engine& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, state.agents() - 1);
    return sparse_control_at(state.v, pick(rng), params.budget);
}

CoupledRun run_dr(const FlockState& initial_high, const ProjectionMatrix& m, const ModelParams& params,
                  ThresholdMode mode, double gamma_threshold, const RunOptions& options, std::uint64_t seed) {
    params.validate();
    if (initial_high.dim() != m.cols()) throw std::invalid_argument("run_dr: state dimension differs from M.cols()");
    if (options.substeps == 0) throw std::invalid_argument("run_dr: substeps must be >= 1");
    const double tau = params.sampling_time;
    const std::size_t intervals = interval_count(options.horizon, tau);
    const double h = tau / static_cast<double>(options.substeps);

    FlockState high = initial_high;
    high.t = 0.0;
    if (high.vbar_drift.size() != high.dim()) high.vbar_drift.assign(high.dim(), 0.0);
    FlockState low(m.apply(high.x), m.apply(high.v));

    CoupledRun run;
    run.seed = seed;
    run.high.params = params;
    run.high.seed = seed;
    run.low.params = params;
    run.low.params.dim = m.rows();
    run.low.seed = seed;

    Rk4Integrator step_high(params);
    Rk4Integrator step_low(run.low.params);
    Engine rng = make_engine(seed, Stream::kRandomControl);
    bool off = false;
    bool handed_over = false;
    double initial_margin = 0.0;

    for (std::size_t n = 0; n <= intervals; ++n) {
        high.t = static_cast<double>(n) * tau;
        low.t = high.t;
        Sample hs = observe(high, n, params);
        Sample ls = observe(low, n, params);
        if (n == 0) initial_margin = hs.margin;

        if (!off && hs.margin <= 0.0) {
            off = true;
            run.t0 = hs.t;
            run.high.switch_off_time = hs.t;
            if (!run.ts) run.ts = hs.t;
        }
        if (!run.t0_5 && (hs.margin <= 0.5 * initial_margin || hs.margin <= 0.0)) run.t0_5 = hs.t;
        if (!run.high.half_time && run.t0_5) run.high.half_time = run.t0_5;

        const double low_margin =
            mode == ThresholdMode::kTheoretical ? ls.moments.velocity - gamma_threshold : ls.margin;
        if (!off && !handed_over && low_margin <= 0.0) {
            handed_over = true;
            run.ts = hs.t;
            run.low.switch_off_time = hs.t;
        }

        const bool last = n == intervals || (off && options.stop_at_switch_off);
        ControlVector uh = ControlVector::zero(high.agents(), high.dim());
        ControlVector ul = ControlVector::zero(low.agents(), low.dim());
        if (!last && !off) {
            if (handed_over) {
                uh = control_random(high, params, rng);
            } else {
                const IndexChoice pick = select_max_perp_index(low.v);
                if (!pick.zero_norm) {
                    uh = sparse_control_at(high.v, pick.index, params.budget);
                    ul = sparse_control_at(low.v, pick.index, params.budget);
                }
            }
            hs.control_index = uh.active_index;
            hs.control_cost = uh.l1_norm();
            hs.active = hs.control_cost > 0.0;
            ls.control_index = ul.active_index;
            ls.control_cost = ul.l1_norm();
            ls.active = ls.control_cost > 0.0;
            run.high.max_control_cost = std::max(run.high.max_control_cost, hs.control_cost);
            run.low.max_control_cost = std::max(run.low.max_control_cost, ls.control_cost);
        }
        run.high.samples.push_back(hs);
        run.low.samples.push_back(ls);
        if (options.record_states) {
            run.high.states.push_back(high);
            run.low.states.push_back(low);
        }
        if (last) break;

        for (std::size_t sub = 0; sub < options.substeps; ++sub) {
            step_high.step(high, uh, h);
            step_low.step(low, ul, h);
        }
        if (!all_finite(high) || !all_finite(low)) throw NumericalBlowup(n, static_cast<double>(n + 1) * tau);
    }
    run.high.final_state = std::move(high);
    run.low.final_state = std::move(low);
    return run;
}

RunRecord run_strategy(const FlockState& initial, const Strategy& strategy, const ModelParams& params,
                       const RunOptions& options, std::uint64_t seed) {
    RunRecord rec;
    rec.kind = strategy.kind;
    rec.mode = strategy.mode;
    rec.seed = seed;
    switch (strategy.kind) {
        case StrategyKind::kProjected: {
            if (!strategy.projection) throw std::invalid_argument("run_strategy: DR needs a projection matrix");
            CoupledRun run = run_dr(initial, *strategy.projection, params, strategy.mode, strategy.gamma_threshold,
                                    options, seed);
            rec.t0 = run.t0;
            rec.t0_5 = run.t0_5;
            rec.ts = run.ts;
            rec.trajectory = std::move(run.high);
            rec.low = std::move(run.low);
            break;
        }
        case StrategyKind::kNone: {
            NoControl policy;
            rec.trajectory = run_sampled(initial, policy, params, options, seed);
            break;
        }
        case StrategyKind::kSparse: {
            SparsePolicy policy(params);
            rec.trajectory = run_sampled(initial, policy, params, options, seed);
            break;
        }
        case StrategyKind::kUniform: {
            UniformPolicy policy(params);
            rec.trajectory = run_sampled(initial, policy, params, options, seed);
            break;
        }
        case StrategyKind::kRandom: {
            RandomPolicy policy(params, seed);
            rec.trajectory = run_sampled(initial, policy, params, options, seed);
            break;
        }
    }
    if (strategy.kind != StrategyKind::kProjected) {
        rec.t0 = rec.trajectory.switch_off_time;
        rec.t0_5 = rec.trajectory.half_time;
    }
    rec.initial_margin = rec.trajectory.samples.front().margin;
    rec.final_margin = rec.trajectory.samples.back().margin;
    rec.max_control_cost = rec.trajectory.max_control_cost;
    return rec;
}

}  // namespace csjl
