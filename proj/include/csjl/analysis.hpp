#pragma once
// Theoretical constants of the reduction/convergence results, projection error
// series between coupled runs, and the bound checkers built on them.

#include <cstddef>
#include <string>
#include <vector>

#include "csjl/control.hpp"
#include "csjl/dynamics.hpp"
#include "csjl/jl.hpp"
#include "csjl/model.hpp"

namespace csjl {

struct TheoryConstants {
    // Inputs.
    double x0 = 0.0, v0 = 0.0, w0 = 0.0, y0 = 0.0;
    double tau = 0.0;

    double la = 0.0;  // Lipschitz constant of a
    double a0 = 0.0;  // a(0)
    double c = kOrderingConstant;
    double cc = kSpreadConstant;

    // Uncontrolled reduction.
    double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;
    double knorm = 0.0;  // |K|_{l1->l1}

    // Convergence guarantee.
    double xbar = 0.0;
    double ybar = 0.0;
    double delta = 0.0;             // +inf when gamma diverges
    bool delta_degenerate = false;  // beta <= 1/2
    double that = 0.0;              // (2N/theta)(sqrt(V0) - 2 Delta)
    double that_displayed = 0.0;    // (2N/theta)(2 sqrt(V0) - 2 Delta)
    double tau0 = 0.0;
    double alpha = 0.0;
    double log10_eps_prime = 0.0;
    double eps_prime = 0.0;         // may underflow to 0; see log10_eps_prime
    double gamma_threshold = 0.0;   // (2 Delta)^2

    bool feasible = false;  // Delta > 0 finite and T_hat > 0
    std::string note;       // reason when infeasible
};

/// All constants from the initial moments of the high (X0, V0) and projected
/// (Y0, W0) systems.
TheoryConstants compute_constants(double x0, double v0, double w0, double y0, const ModelParams& params);

/// Left side of the tau0 inequality minus Delta/4 (zero at tau0).
double tau0_residual(double tau, const TheoryConstants& k, const ModelParams& params);

struct ErrorSample {
    double t = 0.0;
    std::vector<double> ex, ev;  // per agent |y_i - M x_i|, |w_i - M v_i|
    double ex_max = 0.0, ev_max = 0.0;
    double ex_rms = 0.0, ev_rms = 0.0;
};

struct ErrorSeries {
    std::vector<ErrorSample> samples;
};

/// Needs both trajectories recorded with states on the same grid.
ErrorSeries error_series(const Trajectory& high, const Trajectory& low, const ProjectionMatrix& m);

struct UncontrolledBound {
    double gronwall = 0.0;  // bound on E^x + E^v
    double mean = 0.0;      // bound on E2^x + E2^v (no sqrt(N) factor)
    double min_bound = 0.0; // bound on E^v
    double with_alpha = 0.0;  // K3 t^2 replaced by K4 t
};

UncontrolledBound uncontrolled_bound(double t, const TheoryConstants& k, double eps, double delta, double m_norm,
                                     double vt, double wt, const ModelParams& params);

enum class ControlledForm {
    kTheorem,      // rate 4 L_a sqrt(N V0)
    kProposition,  // rate 2 L_a sqrt(N W0), before sqrt(W0) <= 2 sqrt(V0) is applied
};

double controlled_bound(double t, const TheoryConstants& k, double eps_prime, const ModelParams& params,
                        ControlledForm form = ControlledForm::kTheorem);

struct CertificateReport {
    bool time_ok = false;
    bool spread_ok = false;
    bool region_ok = false;
    bool hypotheses = false;  // tau <= tau0 and constants feasible
    double t0 = 0.0;          // first sample with W <= Gamma (or high entry)
    double t0_bound = 0.0;
    double max_x_spread = 0.0, x_spread_bound = 0.0;
    double max_v_spread = 0.0, v_spread_bound = 0.0;
    std::string note;

    bool all_ok() const { return time_ok && spread_ok && region_ok; }
};

/// Checks the convergence guarantees on a coupled run recorded with states.
CertificateReport convergence_certificates(const CoupledRun& run, const TheoryConstants& k, const ModelParams& params);

struct DecayCheck {
    std::size_t prefix = 0;  // samples on which the finite-difference slope condition holds
    bool velocity_ok = true;
    bool spread_ok = true;
    double worst_velocity_excess = 0.0;
    double worst_spread_excess = 0.0;
};

/// If V' <= -eta sqrt(V) on a prefix [0, T] (forward differences on the
/// sample grid), checks V(t) <= (sqrt(V0) - eta t/2)^2 and
/// X(t) <= 2 X0 + 2 V0^2 / eta^2 there.
DecayCheck check_decay_bound(const Trajectory& traj, double eta, double slack = 1e-9);

struct MeasuredDistortion {
    double eps_hat = 0.0;  // max | |Mz|/|z| - 1 | over nonzero z
    std::size_t points = 0;
};

/// Distortion of M over every pairwise difference x_i - x_j of every
/// recorded state.
MeasuredDistortion measure_pair_distortion(const std::vector<FlockState>& states, const ProjectionMatrix& m);

}  // namespace csjl
