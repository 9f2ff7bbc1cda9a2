#include "csjl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csjl/simd/kernels.hpp"

namespace csjl {

double ControlVector::l1_norm() const {
    const auto& k = simd::active();
    double s = 0.0;
    for (std::size_t i = 0; i < entries.agents(); ++i) {
        const auto r = entries.row(i);
        s += std::sqrt(k.dot(r.data(), r.data(), r.size()));
    }
    return s;
}

std::size_t ControlVector::nonzero_entries() const {
    std::size_t count = 0;
    for (std::size_t i = 0; i < entries.agents(); ++i) {
        for (double c : entries.row(i)) {
            if (c != 0.0) {
                ++count;
                break;
            }
        }
    }
    return count;
}

namespace {

void check_control(const FlockState& state, const ControlVector& control) {
    if (control.entries.agents() != state.agents() || control.entries.dim() != state.dim()) {
        throw std::invalid_argument("control shape (" + std::to_string(control.entries.agents()) + "x" +
                                    std::to_string(control.entries.dim()) + ") does not match state (" +
                                    std::to_string(state.agents()) + "x" + std::to_string(state.dim()) + ")");
    }
}

}  // namespace

void Rk4Integrator::ensure(std::size_t agents, std::size_t dim) {
    if (k1v_.agents() == agents && k1v_.dim() == dim) return;
    for (AgentVectors* a : {&x_stage_, &v_stage_, &k1v_, &k2v_, &k3v_, &k4v_, &k2x_, &k3x_, &k4x_}) {
        *a = AgentVectors(agents, dim);
    }
}

void Rk4Integrator::eval(const AgentVectors& x, const AgentVectors& v, const ControlVector& u,
                         AgentVectors& dv) const {
    const auto& k = simd::active();
    const std::size_t n = x.agents();
    const std::size_t dim = x.dim();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double s2 = params_.kernel_offset * params_.kernel_offset;
    const double scale = params_.kernel_scale * inv_n;
    const double beta = params_.kernel_decay;
    std::fill(dv.values().begin(), dv.values().end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = x.row(i).data();
        const double* vi = v.row(i).data();
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r2 = k.sq_dist(xi, x.row(j).data(), dim);
            const double w = beta == 0.0 ? scale : scale * std::pow(s2 + r2, -beta);
            k.pair_exchange(dv.row(i).data(), dv.row(j).data(), w, vi, v.row(j).data(), dim);
        }
    }
    if (u.active_index) {
        const std::size_t i = *u.active_index;
        k.axpy(dv.row(i).data(), 1.0, u.entries.row(i).data(), dim);
    } else {
        k.axpy(dv.data(), 1.0, u.entries.data(), n * dim);
    }
}

void Rk4Integrator::derivative(const FlockState& state, const ControlVector& control, AgentVectors& dv) {
    check_control(state, control);
    if (!dv.same_shape(state.v)) dv = AgentVectors(state.agents(), state.dim());
    eval(state.x, state.v, control, dv);
}

void Rk4Integrator::step(FlockState& s, const ControlVector& u, double h) {
    check_control(s, u);
    if (h == 0.0) return;
    const auto& k = simd::active();
    const std::size_t n = s.agents();
    const std::size_t dim = s.dim();
    const std::size_t len = n * dim;
    ensure(n, dim);

    // Stage 1: k1x = v, k1v = f(x, v).
    eval(s.x, s.v, u, k1v_);
    // Stage 2 at (x + h/2 k1x, v + h/2 k1v); k2x = v_stage.
    k.axpby_to(x_stage_.data(), s.x.data(), 0.5 * h, s.v.data(), len);
    k.axpby_to(k2x_.data(), s.v.data(), 0.5 * h, k1v_.data(), len);
    eval(x_stage_, k2x_, u, k2v_);
    // Stage 3.
    k.axpby_to(x_stage_.data(), s.x.data(), 0.5 * h, k2x_.data(), len);
    k.axpby_to(k3x_.data(), s.v.data(), 0.5 * h, k2v_.data(), len);
    eval(x_stage_, k3x_, u, k3v_);
    // Stage 4.
    k.axpby_to(x_stage_.data(), s.x.data(), h, k3x_.data(), len);
    k.axpby_to(k4x_.data(), s.v.data(), h, k3v_.data(), len);
    eval(x_stage_, k4x_, u, k4v_);

    k.rk4_combine(x_stage_.data(), s.x.data(), h, s.v.data(), k2x_.data(), k3x_.data(), k4x_.data(), len);
    k.rk4_combine(v_stage_.data(), s.v.data(), h, k1v_.data(), k2v_.data(), k3v_.data(), k4v_.data(), len);
    std::swap(s.x, x_stage_);
    std::swap(s.v, v_stage_);

    if (s.vbar_drift.size() != dim) s.vbar_drift.assign(dim, 0.0);
    const double w = h / static_cast<double>(n);
    if (u.active_index) {
        k.axpy(s.vbar_drift.data(), w, u.entries.row(*u.active_index).data(), dim);
    } else {
        for (std::size_t i = 0; i < n; ++i) k.axpy(s.vbar_drift.data(), w, u.entries.row(i).data(), dim);
    }
    s.t += h;
}

Derivative rhs(const FlockState& state, const ControlVector& control, const ModelParams& params) {
    check_control(state, control);
    Derivative d{state.v, AgentVectors(state.agents(), state.dim())};
    Rk4Integrator integrator(params);
    integrator.derivative(state, control, d.dv);
    return d;
}

FlockState rk4_step(const FlockState& state, const ControlVector& control, double h, const ModelParams& params) {
    if (!(h >= 0.0)) throw std::invalid_argument("rk4_step: h must be >= 0");
    FlockState out = state;
    Rk4Integrator integrator(params);
    integrator.step(out, control, h);
    if (!all_finite(out)) throw NumericalBlowup(0, out.t);
    return out;
}

bool all_finite(const FlockState& state) {
    for (double c : state.x.values()) {
        if (!std::isfinite(c)) return false;
    }
    for (double c : state.v.values()) {
        if (!std::isfinite(c)) return false;
    }
    return true;
}

}  // namespace csjl
