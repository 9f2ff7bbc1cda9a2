#include <doctest.h>

#include <cmath>
#include <random>

#include "csjl/analysis.hpp"
#include "csjl/config.hpp"
#include "helpers.hpp"

using namespace csjl;
using csjl::testing::gamma_oracle;
using csjl::testing::params;

namespace {

TheoryConstants constants_for(const FlockState& s, const ProjectionMatrix& m, const ModelParams& p) {
    const Moments hi = moments(s);
    const Moments lo = moments(FlockState(m.apply(s.x), m.apply(s.v)));
    return compute_constants(hi.spread, hi.velocity, lo.velocity, lo.spread, p);
}

Trajectory synthetic(const std::vector<double>& ts, const std::vector<double>& vs, const std::vector<double>& xs) {
    Trajectory tr;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        Sample s;
        s.step = i;
        s.t = ts[i];
        s.moments.velocity = vs[i];
        s.moments.spread = xs[i];
        tr.samples.push_back(s);
    }
    return tr;
}

}  // namespace

TEST_CASE("Delta matches the hypergeometric gamma oracle") {
    const auto p = preset_params("outlier");
    const auto s = generate_config("outlier", p, 0);
    const auto k = constants_for(s, ProjectionMatrix::identity(p.dim), p);
    const double ref = std::min(gamma_oracle(k.xbar, p) / std::sqrt(72.0), 0.5 * gamma_oracle(4.0 * k.xbar, p));
    CHECK(k.delta == doctest::Approx(ref).epsilon(1e-9));
    CHECK(k.gamma_threshold == doctest::Approx(4.0 * ref * ref).epsilon(1e-9));
    CHECK(k.feasible);
    CHECK(k.that == doctest::Approx(2.0 * 9.0 / 5.0 * (std::sqrt(k.v0) - 2.0 * k.delta)));
    CHECK(k.that_displayed - k.that == doctest::Approx(2.0 * 9.0 / 5.0 * std::sqrt(k.v0)));
}

TEST_CASE("derived constants follow their definitions") {
    const auto p = params(5, 3, 1.0, 2.0, 0.01);
    const auto k = compute_constants(0.7, 1.3, 1.1, 0.6, p);
    const double lw = lipschitz_constant(p) * std::sqrt(5.0 * 1.1);
    CHECK(k.k1 == doctest::Approx(lw * std::sqrt(1.4)));
    CHECK(k.k2 == doctest::Approx(2.0 * lw));
    CHECK(k.k3 == doctest::Approx(0.5 * lw * std::sqrt(2.6)));
    CHECK(k.alpha == doctest::Approx(std::sqrt(2.0) * 5.0 * 17.0 / 2.0));
    CHECK(k.xbar == doctest::Approx(1.4 + 2.0 * 25.0 * 1.69 * 289.0 / 4.0));
    CHECK(k.ybar == doctest::Approx(1.2 + 2.0 * 25.0 * 1.21 / 4.0));
    CHECK(k.knorm == doctest::Approx(std::max(2.0 * kernel_a(0.0, p) + 1.0, 2.0 * lw)));
}

TEST_CASE("tau0 is the positive root of its quadratic") {
    const auto p = preset_params("outlier");
    const auto s = generate_config("outlier", p, 0);
    const auto k = constants_for(s, ProjectionMatrix::identity(p.dim), p);
    CHECK(k.tau0 > 0.0);
    CHECK(std::abs(tau0_residual(k.tau0, k, p)) <= 1e-12 * k.delta);
    CHECK(tau0_residual(0.5 * k.tau0, k, p) < 0.0);
    CHECK(tau0_residual(2.0 * k.tau0, k, p) > 0.0);
}

TEST_CASE("tau0 tends to Delta/(4 theta) as a(0) vanishes") {
    auto p = params(4, 2, 1.0, 3.0, 0.01, 1e-12);
    const auto k = compute_constants(0.5, 2.0, 2.0, 0.5, p);
    CHECK(k.tau0 == doctest::Approx(k.delta / (4.0 * 3.0)).epsilon(1e-9));
}

TEST_CASE("degenerate inputs") {
    const auto zero_v = compute_constants(1.0, 0.0, 0.0, 1.0, params(4, 2, 1.0));
    CHECK_FALSE(zero_v.feasible);
    CHECK_FALSE(zero_v.note.empty());
    const auto flat = compute_constants(1.0, 1.0, 1.0, 1.0, params(4, 2, 0.5));
    CHECK(flat.delta_degenerate);
    CHECK(std::isinf(flat.delta));
    CHECK_THROWS(compute_constants(-1.0, 1.0, 1.0, 1.0, params(4, 2, 1.0)));
}

TEST_CASE("eps' makes the controlled bound equal Delta/2 at T_hat + tau") {
    for (const char* name : {"outlier", "uniform"}) {
        const auto p = preset_params(name);
        const auto s = generate_config(name, p, 0);
        const auto k = constants_for(s, ProjectionMatrix::identity(p.dim), p);
        REQUIRE(k.feasible);
        CHECK(k.log10_eps_prime < 0.0);
        if (k.eps_prime > 0.0) {
            const double at = controlled_bound(k.that + k.tau, k, k.eps_prime, p);
            CHECK(at == doctest::Approx(0.5 * k.delta).epsilon(1e-9));
            CHECK(controlled_bound(0.5 * k.that, k, k.eps_prime, p) < at);
        }
    }
}

TEST_CASE("controlled bound: monotone in t and eps, proposition form below theorem form") {
    const auto p = params(3, 4, 0.6, 5.0, 0.01);
    const auto k = compute_constants(0.05, 0.2, 0.2, 0.05, p);  // eps' ~ 1e-19, representable
    REQUIRE(k.feasible);
    REQUIRE(k.eps_prime > 0.0);
    const double eps = k.eps_prime;
    const double end = k.that + k.tau;
    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double t = end * i / 50.0;
        const double b = controlled_bound(t, k, eps, p);
        CHECK(b > prev);
        CHECK(b <= 0.5 * k.delta * (1.0 + 1e-9));
        CHECK(controlled_bound(t, k, 0.5 * eps, p) == doctest::Approx(0.5 * b));
        CHECK(controlled_bound(t, k, eps, p, ControlledForm::kProposition) <= b);
        prev = b;
    }
    CHECK(controlled_bound(0.0, k, 1e-6, p) == 0.0);
}

TEST_CASE("uncontrolled bound vanishes at t = 0 and the min form never exceeds Gronwall") {
    const auto p = params(6, 4, 1.0);
    const auto k = compute_constants(0.3, 0.8, 0.9, 0.3, p);
    const auto b0 = uncontrolled_bound(0.0, k, 0.2, 0.01, 1.3, 0.8, 0.9, p);
    CHECK(b0.gronwall == 0.0);
    CHECK(b0.min_bound == 0.0);
    for (double t : {0.1, 1.0, 10.0}) {
        const auto b = uncontrolled_bound(t, k, 0.2, 0.01, 1.3, 0.8, 0.9, p);
        CHECK(b.min_bound <= b.gronwall);
        CHECK(b.gronwall == doctest::Approx(std::sqrt(6.0) * b.mean));
    }
}

TEST_CASE("error series: zero at t = 0, identically zero for the identity") {
    const auto p = preset_params("outlier");
    const auto s = generate_config("outlier", p, 0);
    RunOptions opt;
    opt.horizon = 5.0;
    opt.record_states = true;
    opt.stop_at_switch_off = false;

    const auto id = ProjectionMatrix::identity(p.dim);
    const auto run_id = run_dr(s, id, p, ThresholdMode::kExperimental, 0.0, opt, 1);
    for (const auto& e : error_series(run_id.high, run_id.low, id).samples) {
        CHECK(e.ex_max == 0.0);
        CHECK(e.ev_max == 0.0);
    }

    const auto m = generate(ProjectionFamily::kGaussian, 30, p.dim, 3);
    const auto run = run_dr(s, m, p, ThresholdMode::kExperimental, 0.0, opt, 1);
    const auto es = error_series(run.high, run.low, m);
    CHECK(es.samples.front().ex_max < 1e-12);
    CHECK(es.samples.front().ev_max < 1e-12);
    CHECK(es.samples.back().ev_max > 0.0);
    CHECK(es.samples.back().ev_rms <= es.samples.back().ev_max);

    Trajectory bare = run.high;
    bare.states.clear();
    CHECK_THROWS(error_series(bare, run.low, m));
}

TEST_CASE("norm sandwich: W <= |M|^2 V for random states") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const auto m = generate(ProjectionFamily::kGaussian, 4, 12, 100 + t);
        const double norm = operator_norm(m);
        const auto s = csjl::testing::random_state(7, 12, rng);
        const double v = moments(s).velocity;
        const double w = moments(FlockState(m.apply(s.x), m.apply(s.v))).velocity;
        CHECK(w <= norm * norm * v * (1.0 + 1e-12));
    }
}

TEST_CASE("decay-bound checker") {
    const double v0 = 4.0, eta = 1.0;
    std::vector<double> ts, vs, xs;
    for (int i = 0; i <= 40; ++i) {
        const double t = 0.1 * i;
        const double r = std::max(0.0, std::sqrt(v0) - eta * t);  // twice the required rate
        ts.push_back(t);
        vs.push_back(r * r);
        xs.push_back(1.0);
    }
    const auto ok = check_decay_bound(synthetic(ts, vs, xs), eta);
    CHECK(ok.velocity_ok);
    CHECK(ok.spread_ok);
    CHECK(ok.prefix >= 2);

    auto bad_x = xs;
    bad_x[1] = 2.0 * 1.0 + 2.0 * v0 * v0 / (eta * eta) + 1.0;
    CHECK_FALSE(check_decay_bound(synthetic(ts, vs, bad_x), eta).spread_ok);

    // A plateau ends the prefix: no claim is made afterwards.
    auto flat = vs;
    for (std::size_t i = 5; i < flat.size(); ++i) flat[i] = flat[4];
    const auto f = check_decay_bound(synthetic(ts, flat, xs), eta);
    CHECK(f.prefix == 5);
    CHECK_THROWS(check_decay_bound(synthetic(ts, vs, xs), 0.0));
}

TEST_CASE("pair distortion") {
    std::mt19937_64 rng(2);
    std::vector<FlockState> states{csjl::testing::random_state(5, 6, rng)};
    CHECK(measure_pair_distortion(states, ProjectionMatrix::identity(6)).eps_hat == 0.0);
    CHECK(measure_pair_distortion(states, ProjectionMatrix::identity(6)).points == 10);
    auto e = ProjectionMatrix::identity(6).entries();
    for (double& x : e) x *= 2.0;
    ProjectionMatrix twice(6, 6, e, ProjectionFamily::kCustom, 0);
    CHECK(measure_pair_distortion(states, twice).eps_hat == doctest::Approx(1.0));
}

TEST_CASE("tiny instance inside the hypotheses is certified") {
    // Strong budget, near-orthogonal projection and a sampling time below tau0.
    auto p = params(3, 8, 1.0, 50.0, 2.5e-5);
    const FlockState s(AgentVectors(3, 8, {0.0, 0.1, 0, 0, 0, 0, 0, 0,  0.1, 0, 0, 0, 0, 0, 0, 0,
                                           0, 0, 0.1, 0, 0, 0, 0, 0}),
                       AgentVectors(3, 8, {2.0, 0, 0, 0, 0, 0, 0, 0,  -1.0, 0.5, 0, 0, 0, 0, 0, 0,
                                           -1.0, -0.5, 0, 0, 0, 0, 0, 0}));
    const auto m = generate(ProjectionFamily::kScaledProjection, 6, 8, 4);
    const auto k = constants_for(s, m, p);
    REQUIRE(k.feasible);
    REQUIRE(p.sampling_time <= k.tau0);
    RunOptions opt;
    opt.horizon = 2.0;
    opt.record_states = true;
    const auto run = run_dr(s, m, p, ThresholdMode::kTheoretical, k.gamma_threshold, opt, 1);
    const auto cert = convergence_certificates(run, k, p);
    CHECK(cert.hypotheses);
    CHECK_MESSAGE(cert.time_ok, cert.t0, " > ", cert.t0_bound);
    CHECK(cert.spread_ok);
    CHECK(cert.region_ok);
}
