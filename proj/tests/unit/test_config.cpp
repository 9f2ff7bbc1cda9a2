#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "csjl/config.hpp"
#include "helpers.hpp"

using namespace csjl;

TEST_CASE("named configurations carry their preset parameters") {
    CHECK(config_names().size() == 5);
    const auto p = preset_params("geometric");
    CHECK(p.agents == 15);
    CHECK(p.dim == 500);
    CHECK(p.kernel_decay == 0.65);
    CHECK(p.budget == 20.0);
    CHECK(p.sampling_time == 0.01);
    CHECK(preset_params("gaussian").sampling_time == 0.005);
    CHECK(preset_params("uniform").kernel_decay == 0.8);
    CHECK_THROWS(preset_params("ring"));
}

TEST_CASE("deterministic configurations match their formulas") {
    const auto out = generate_config("outlier", preset_params("outlier"), 0);
    CHECK(out.x(0, 0) == doctest::Approx(-0.3734598227334407).epsilon(1e-14));
    CHECK(out.x(8, 99) == doctest::Approx(0.4652371189005043).epsilon(1e-14));
    CHECK(out.v(0, 0) == doctest::Approx(0.6683964408733738).epsilon(1e-14));
    for (std::size_t c = 0; c < 100; ++c) CHECK(out.v(8, c) == 10.0);

    const auto geo = generate_config("geometric", preset_params("geometric"), 0);
    CHECK(geo.v(7, 2) == doctest::Approx(-1.8746278981545537).epsilon(1e-14));

    const auto uni = generate_config("uniform", preset_params("uniform"), 0);
    CHECK(uni.x == uni.v);
    // Seed-independent.
    CHECK(generate_config("outlier", preset_params("outlier"), 5) == out);
}

TEST_CASE("random configurations depend on the seed only") {
    const auto p = preset_params("gaussian");
    const auto a = generate_config("gaussian", p, 1);
    CHECK(a == generate_config("gaussian", p, 1));
    CHECK_FALSE(a == generate_config("gaussian", p, 2));
    double sx = 0.0, sv = 0.0;
    for (double x : a.x.values()) sx += x * x;
    for (double v : a.v.values()) sv += v * v;
    const double n = static_cast<double>(a.x.values().size());
    CHECK(std::sqrt(sx / n) == doctest::Approx(10.0).epsilon(0.02));
    CHECK(std::sqrt(sv / n) == doctest::Approx(8.0).epsilon(0.02));

    // Cauchy: the median of |v| is the scale 1/40.
    const auto c = generate_config("cauchy", preset_params("cauchy"), 3);
    auto abs_v = c.v.values();
    for (double& v : abs_v) v = std::abs(v);
    std::nth_element(abs_v.begin(), abs_v.begin() + abs_v.size() / 2, abs_v.end());
    CHECK(abs_v[abs_v.size() / 2] == doctest::Approx(1.0 / 40.0).epsilon(0.15));
}

TEST_CASE("config parse / emit round-trip") {
    auto cfg = default_config("geometric");
    cfg.strategies = {StrategyKind::kSparse, StrategyKind::kProjected, StrategyKind::kRandom};
    cfg.k_list = {25, 55};
    cfg.seeds = {1, 2, 3};
    cfg.horizon = 123.25;
    cfg.params.sampling_time = 0.1 + 0.2;  // not representable in short decimal form
    cfg.dr_mode = ThresholdMode::kTheoretical;
    cfg.family = ProjectionFamily::kGaussian;
    cfg.output_dir = "runs/geo";
    std::istringstream in(emit_config(cfg));
    CHECK(parse_config(in) == cfg);
}

TEST_CASE("config parsing: defaults, comments and errors") {
    std::istringstream in("# comment\nconfig = uniform\n\ntheta = 7   # trailing\nk=5, 10\n");
    const auto cfg = parse_config(in);
    CHECK(cfg.params.agents == 15);
    CHECK(cfg.params.budget == 7.0);
    CHECK(cfg.k_list == std::vector<std::size_t>{5, 10});

    auto bad = [](const char* text) {
        std::istringstream s(text);
        return parse_config(s);
    };
    CHECK_THROWS(bad("nonsense line\n"));
    CHECK_THROWS(bad("theta = 1\ntheta = 2\n"));
    CHECK_THROWS(bad("colour = red\n"));
    CHECK_THROWS(bad("N = -3\n"));
    CHECK_THROWS(bad("tau = fast\n"));
    CHECK_THROWS(bad("config = file\n"));
    CHECK_THROWS(bad("strategies = SP, XX\n"));
}

TEST_CASE("state file round-trip is bit exact") {
    std::mt19937_64 rng(5);
    const auto s = csjl::testing::random_state(4, 3, rng, 1e-7, 1e5);
    std::stringstream io;
    write_state(io, s);
    const auto back = read_state(io);
    CHECK(back.x == s.x);
    CHECK(back.v == s.v);

    std::istringstream text("2 2\n1 2\n3 4\n5 6\n7 8\n");
    const auto t = read_state(text);
    CHECK(t.x(1, 0) == 3.0);
    CHECK(t.v(0, 1) == 6.0);

    std::istringstream truncated("2 2\n1 2\n3 4\n5 6\n");
    CHECK_THROWS(read_state(truncated));
    std::istringstream trailing("1 1\n1\n2\n3\n");
    CHECK_THROWS(read_state(trailing));
    std::istringstream header("0 3\n");
    CHECK_THROWS(read_state(header));
}

TEST_CASE("file-based initial state") {
    const auto dir = std::filesystem::temp_directory_path() / "csjl_config_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "state.txt";
    const auto s = generate_config("outlier", preset_params("outlier"), 0);
    {
        std::ofstream f(path);
        write_state(f, s);
    }
    auto cfg = default_config("outlier");
    cfg.config_name = "file";
    cfg.state_file = path.string();
    CHECK(initial_state(cfg).v == s.v);
    std::filesystem::remove_all(dir);
}

TEST_CASE("matrix file round-trip") {
    const auto m = generate(ProjectionFamily::kGaussian, 3, 7, 11);
    std::stringstream io;
    write_matrix(io, m);
    const auto back = read_matrix(io);
    CHECK(back.entries() == m.entries());
    CHECK(back.rows() == 3);
    CHECK(back.family() == ProjectionFamily::kGaussian);
    CHECK(back.seed() == 11);
}

TEST_CASE("format_double keeps 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(2.0) == "2");
}
