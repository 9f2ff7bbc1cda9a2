#include "csjl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "csjl/simd/kernels.hpp"

namespace csjl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pair_rate(const TheoryConstants& k, double n, ControlledForm form) {
    return form == ControlledForm::kTheorem ? 4.0 * k.la * std::sqrt(n * k.v0) : 2.0 * k.la * std::sqrt(n * k.w0);
}

// ln of the controlled-bound prefactor ln(sqrt(N)(r(sqrt(2X0) + alpha) + theta/sqrt(N)) t) + t * rate.
double log_controlled(double t, const TheoryConstants& k, const ModelParams& p, ControlledForm form) {
    const double n = static_cast<double>(p.agents);
    const double r = pair_rate(k, n, form);
    const double coeff = std::sqrt(n) * (r * (std::sqrt(2.0 * k.x0) + k.alpha) + p.budget / std::sqrt(n));
    const double rate = std::max(2.0 * k.a0 + 1.0, r) + 8.0 * p.budget / k.delta;
    return std::log(coeff) + std::log(t) + t * rate;
}

}  // namespace

TheoryConstants compute_constants(double x0, double v0, double w0, double y0, const ModelParams& params) {
    params.validate();
    if (x0 < 0.0 || v0 < 0.0 || w0 < 0.0 || y0 < 0.0) throw std::invalid_argument("compute_constants: negative moment");
    const double n = static_cast<double>(params.agents);
    const double theta = params.budget;
    TheoryConstants k;
    k.x0 = x0;
    k.v0 = v0;
    k.w0 = w0;
    k.y0 = y0;
    k.tau = params.sampling_time;
    k.la = lipschitz_constant(params);
    k.a0 = kernel_a(0.0, params);

    const double lw = k.la * std::sqrt(n * w0);
    k.k1 = lw * std::sqrt(2.0 * x0);
    k.k2 = 2.0 * lw;
    k.k3 = 0.5 * lw * std::sqrt(2.0 * v0);
    k.alpha = std::sqrt(2.0) * n / (k.c * theta);
    k.k4 = lw * k.alpha;
    k.knorm = std::max(2.0 * k.a0 + 1.0, 2.0 * lw);

    k.xbar = 2.0 * x0 + 2.0 * n * n * v0 * v0 / (k.c * k.c * theta * theta);
    k.ybar = 2.0 * y0 + 2.0 * n * n * w0 * w0 / (theta * theta);

    const GammaValue g1 = gamma_functional(k.xbar, params);
    const GammaValue g4 = gamma_functional(4.0 * k.xbar, params);
    if (g1.is_infinite() || g4.is_infinite()) {
        k.delta_degenerate = true;
        k.delta = kInf;
        k.that = k.that_displayed = k.tau0 = k.gamma_threshold = kInf;
        k.eps_prime = k.log10_eps_prime = std::numeric_limits<double>::quiet_NaN();
        k.note = "gamma diverges (beta <= 1/2): every state is in the consensus region";
        return k;
    }
    k.delta = std::min(g1.value() / k.cc, 0.5 * g4.value());
    k.gamma_threshold = 4.0 * k.delta * k.delta;
    k.that = 2.0 * n / theta * (std::sqrt(v0) - 2.0 * k.delta);
    k.that_displayed = 2.0 * n / theta * (2.0 * std::sqrt(v0) - 2.0 * k.delta);

    // a0 theta tau^2 + (a0 sqrt(N V0) + theta) tau - Delta/4 = 0; stable form of the positive root.
    const double qa = k.a0 * theta;
    const double qb = k.a0 * std::sqrt(n) * std::sqrt(v0) + theta;
    const double qc = 0.25 * k.delta;
    k.tau0 = 2.0 * qc / (qb + std::sqrt(qb * qb + 4.0 * qa * qc));

    if (!(k.delta > 0.0)) {
        k.note = "Delta <= 0";
        k.eps_prime = k.log10_eps_prime = std::numeric_limits<double>::quiet_NaN();
        return k;
    }
    if (!(k.that > 0.0)) {
        k.note = "T_hat <= 0 (initial state already close to consensus)";
        k.eps_prime = k.log10_eps_prime = std::numeric_limits<double>::quiet_NaN();
        return k;
    }
    // The defining inequality is linear in eps', so the largest admissible value is explicit.
    const double horizon = k.that + k.tau;
    const double log_eps = std::log(0.5 * k.delta) - log_controlled(horizon, k, params, ControlledForm::kTheorem);
    const double cap = std::nextafter(1.0, 0.0);
    k.log10_eps_prime = std::min(log_eps / std::log(10.0), std::log10(cap));
    k.eps_prime = std::min(std::exp(log_eps), cap);
    k.feasible = true;
    return k;
}

double tau0_residual(double tau, const TheoryConstants& k, const ModelParams& params) {
    const double n = static_cast<double>(params.agents);
    return tau * (k.a0 * std::sqrt(n) * std::sqrt(k.v0) + params.budget) + tau * tau * k.a0 * params.budget -
           0.25 * k.delta;
}

ErrorSeries error_series(const Trajectory& high, const Trajectory& low, const ProjectionMatrix& m) {
    if (high.states.size() != low.states.size() || high.samples.size() != low.samples.size()) {
        throw std::invalid_argument("error_series: trajectories are on different grids");
    }
    if (high.states.size() != high.samples.size()) throw std::invalid_argument("error_series: states not recorded");
    const auto& kern = simd::active();
    ErrorSeries out;
    out.samples.reserve(high.states.size());
    std::vector<double> img(m.rows());
    for (std::size_t s = 0; s < high.states.size(); ++s) {
        const FlockState& hi = high.states[s];
        const FlockState& lo = low.states[s];
        if (high.samples[s].t != low.samples[s].t) throw std::invalid_argument("error_series: sample times differ");
        if (lo.dim() != m.rows() || hi.dim() != m.cols()) throw std::invalid_argument("error_series: shape mismatch");
        ErrorSample e;
        e.t = high.samples[s].t;
        const std::size_t n = hi.agents();
        e.ex.resize(n);
        e.ev.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            m.apply(hi.x.row(i), img);
            e.ex[i] = std::sqrt(kern.sq_dist(lo.x.row(i).data(), img.data(), img.size()));
            m.apply(hi.v.row(i), img);
            e.ev[i] = std::sqrt(kern.sq_dist(lo.v.row(i).data(), img.data(), img.size()));
            e.ex_max = std::max(e.ex_max, e.ex[i]);
            e.ev_max = std::max(e.ev_max, e.ev[i]);
            e.ex_rms += e.ex[i] * e.ex[i];
            e.ev_rms += e.ev[i] * e.ev[i];
        }
        e.ex_rms = std::sqrt(e.ex_rms / static_cast<double>(n));
        e.ev_rms = std::sqrt(e.ev_rms / static_cast<double>(n));
        out.samples.push_back(std::move(e));
    }
    return out;
}

UncontrolledBound uncontrolled_bound(double t, const TheoryConstants& k, double eps, double delta, double m_norm,
                                     double vt, double wt, const ModelParams& params) {
    const double rn = std::sqrt(static_cast<double>(params.agents));
    const double growth = std::exp(t * k.knorm);
    UncontrolledBound b;
    const double core = ((eps * k.k1 + delta * k.k2) * t + eps * k.k3 * t * t) * growth;
    b.mean = core;
    b.gronwall = rn * core;
    b.min_bound = rn * std::min(core, m_norm * std::sqrt(vt) + std::sqrt(wt));
    b.with_alpha = rn * ((eps * (k.k1 + k.k4) + delta * k.k2) * t) * growth;
    return b;
}

double controlled_bound(double t, const TheoryConstants& k, double eps_prime, const ModelParams& params,
                        ControlledForm form) {
    if (t <= 0.0 || eps_prime <= 0.0) return 0.0;
    if (k.delta_degenerate) return 0.0;
    return std::exp(std::log(eps_prime) + log_controlled(t, k, params, form));
}

CertificateReport convergence_certificates(const CoupledRun& run, const TheoryConstants& k,
                                           const ModelParams& params) {
    CertificateReport r;
    const double n = static_cast<double>(params.agents);
    r.hypotheses = k.feasible && params.sampling_time <= k.tau0;
    if (!r.hypotheses) r.note = "tau > tau0 or constants infeasible: a failure is outside the hypotheses. ";
    r.note += "alpha = sqrt(2) N / (c theta).";
    if (!run.ts) {
        r.note += " Threshold never reached within the horizon.";
        return r;
    }
    r.t0 = *run.ts;
    r.t0_bound = 2.0 * n / params.budget * (std::sqrt(k.w0) - 2.0 * k.delta) + params.sampling_time;
    r.time_ok = r.t0 <= r.t0_bound;

    const auto& hi = run.high;
    const auto& lo = run.low;
    if (hi.states.size() != hi.samples.size() || lo.states.size() != lo.samples.size()) {
        throw std::invalid_argument("convergence_certificates: run was not recorded with states");
    }
    const auto& kern = simd::active();
    r.x_spread_bound = 2.0 * std::sqrt(n * k.xbar);
    r.v_spread_bound = 2.0 * std::sqrt(n * k.v0);
    std::size_t at = hi.samples.size();
    for (std::size_t s = 0; s < hi.samples.size() && hi.samples[s].t <= r.t0; ++s) {
        const FlockState& st = hi.states[s];
        for (std::size_t i = 0; i < st.agents(); ++i) {
            for (std::size_t j = i + 1; j < st.agents(); ++j) {
                r.max_x_spread = std::max(r.max_x_spread, kern.sq_dist(st.x.row(i).data(), st.x.row(j).data(), st.dim()));
                r.max_v_spread = std::max(r.max_v_spread, kern.sq_dist(st.v.row(i).data(), st.v.row(j).data(), st.dim()));
            }
        }
        at = s;
    }
    r.max_x_spread = std::sqrt(r.max_x_spread);
    r.max_v_spread = std::sqrt(r.max_v_spread);
    r.spread_ok = r.max_x_spread <= r.x_spread_bound && r.max_v_spread <= r.v_spread_bound;
    r.region_ok = at < hi.samples.size() && hi.samples[at].margin <= 0.0 && lo.samples[at].margin <= 0.0;
    return r;
}

DecayCheck check_decay_bound(const Trajectory& traj, double eta, double slack) {
    if (!(eta > 0.0)) throw std::invalid_argument("check_decay_bound: eta must be > 0");
    DecayCheck out;
    const auto& s = traj.samples;
    if (s.empty()) return out;
    const double v0 = s.front().moments.velocity;
    const double x0 = s.front().moments.spread;
    const double x_bound = 2.0 * x0 + 2.0 * v0 * v0 / (eta * eta);
    out.prefix = 1;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double slope = (s[i + 1].moments.velocity - s[i].moments.velocity) / (s[i + 1].t - s[i].t);
        if (slope > -eta * std::sqrt(s[i].moments.velocity)) break;
        out.prefix = i + 2;
    }
    for (std::size_t i = 0; i < out.prefix; ++i) {
        const double base = std::max(0.0, std::sqrt(v0) - 0.5 * eta * s[i].t);
        const double dv = s[i].moments.velocity - base * base;
        const double dx = s[i].moments.spread - x_bound;
        out.worst_velocity_excess = std::max(out.worst_velocity_excess, dv);
        out.worst_spread_excess = std::max(out.worst_spread_excess, dx);
        if (dv > slack * std::max(1.0, v0)) out.velocity_ok = false;
        if (dx > slack * std::max(1.0, x_bound)) out.spread_ok = false;
    }
    return out;
}

MeasuredDistortion measure_pair_distortion(const std::vector<FlockState>& states, const ProjectionMatrix& m) {
    const auto& kern = simd::active();
    MeasuredDistortion out;
    std::vector<double> diff(m.cols()), img(m.rows());
    for (const FlockState& st : states) {
        for (std::size_t i = 0; i < st.agents(); ++i) {
            for (std::size_t j = i + 1; j < st.agents(); ++j) {
                const auto xi = st.x.row(i);
                const auto xj = st.x.row(j);
                for (std::size_t c = 0; c < diff.size(); ++c) diff[c] = xi[c] - xj[c];
                const double nz = std::sqrt(kern.dot(diff.data(), diff.data(), diff.size()));
                if (nz == 0.0) continue;
                m.apply(diff, img);
                const double nm = std::sqrt(kern.dot(img.data(), img.data(), img.size()));
                out.eps_hat = std::max(out.eps_hat, std::abs(nm / nz - 1.0));
                ++out.points;
            }
        }
    }
    return out;
}

}  // namespace csjl
