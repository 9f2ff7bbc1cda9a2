// consensus-jl: command-line harness for the sampled-control experiments.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "csjl/experiment.hpp"

namespace fs = std::filesystem;
using namespace csjl;

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string strategy;
    std::vector<std::size_t> k;
    std::string mode;
    std::optional<double> horizon;
};

void add_common(CLI::App* app, CommonFlags& f) {
    app->add_option("--config", f.config, "config file, or one of outlier|geometric|cauchy|gaussian|uniform");
    app->add_option("--seed", f.seed, "single run seed (replaces the config's seed list)");
    app->add_option("--out", f.out, "output directory (file for gen-config)");
    app->add_option("--strategy", f.strategy, "comma-separated strategies: none,SP,U,R,DR");
    app->add_option("--k", f.k, "projected dimensions for DR")->delimiter(',');
    app->add_option("--mode", f.mode, "DR threshold: theoretical|experimental");
    app->add_option("--horizon", f.horizon, "simulated time");
}

ExperimentConfig resolve(const CommonFlags& f) {
    ExperimentConfig cfg;
    if (f.config.empty()) {
        cfg = default_config("outlier");
    } else if (fs::exists(f.config)) {
        cfg = load_config(f.config);
    } else {
        cfg = default_config(f.config);
    }
    if (f.seed) cfg.seeds = {*f.seed};
    if (!f.out.empty()) cfg.output_dir = f.out;
    if (!f.strategy.empty()) {
        cfg.strategies.clear();
        std::stringstream ss(f.strategy);
        std::string item;
        while (std::getline(ss, item, ',')) cfg.strategies.push_back(parse_strategy(item));
    }
    if (!f.k.empty()) cfg.k_list = f.k;
    if (!f.mode.empty()) cfg.dr_mode = parse_mode(f.mode);
    if (f.horizon) cfg.horizon = *f.horizon;
    return cfg;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

std::string fmt_opt(const std::optional<double>& x) { return x ? format_double(*x) : "not reached"; }

int cmd_simulate(const CommonFlags& f) {
    const ExperimentConfig cfg = resolve(f);
    const FlockState initial = initial_state(cfg);
    const auto cells = expand_cells(cfg);
    const auto results = run_cells(cfg, initial, cells, thread_cap());
    const Moments m = moments(initial);
    const TheoryConstants consts = compute_constants(m.spread, m.velocity, m.velocity, m.spread, cfg.params);
    const fs::path dir = cfg.output_dir;
    for (const auto& r : results) {
        auto out = open_out(dir / (r.cell.key() + ".csv"));
        write_run_csv(out, r.record);
    }
    open_out(dir / "summary.json") << summary_json(cfg, consts, results);
    open_out(dir / "config.txt") << emit_config(cfg);
    for (const auto& r : results) {
        std::cout << r.cell.key() << "  T0=" << fmt_opt(r.record.t0) << "  T0.5=" << fmt_opt(r.record.t0_5);
        if (r.cell.kind == StrategyKind::kProjected) {
            std::cout << "  TS=" << fmt_opt(r.record.ts) << "  E_M=" << fmt_opt(r.exactness);
        }
        std::cout << "  final_margin=" << format_double(r.record.final_margin) << "\n";
    }
    std::cout << "wrote " << results.size() << " run(s) to " << dir.string() << "\n";
    return 0;
}

int cmd_sweep_k(const CommonFlags& f) {
    const ExperimentConfig cfg = resolve(f);
    if (cfg.k_list.empty()) throw std::invalid_argument("sweep-k needs --k or a k list in the config");
    const auto rows = sweep_k(cfg, initial_state(cfg), thread_cap());
    const fs::path path = fs::path(cfg.output_dir) / "sweep_k.csv";
    auto out = open_out(path);
    write_sweep_csv(out, rows);
    write_sweep_csv(std::cout, rows);
    return 0;
}

int cmd_exactness(const CommonFlags& f) {
    const ExperimentConfig cfg = resolve(f);
    if (cfg.k_list.size() != 1) throw std::invalid_argument("exactness needs exactly one k");
    const auto study = exactness_study(cfg, initial_state(cfg), cfg.k_list.front(), thread_cap());
    auto out = open_out(fs::path(cfg.output_dir) / "exactness.csv");
    write_exactness_csv(out, study);
    write_exactness_csv(std::cout, study);
    std::cout << "spearman(E_M, T0) = " << format_double(study.spearman) << "\n";
    return 0;
}

int cmd_bounds(const CommonFlags& f, double eps, double delta) {
    const ExperimentConfig cfg = resolve(f);
    const std::string report = bounds_json(cfg, initial_state(cfg), eps, delta);
    std::cout << report;
    if (!f.out.empty()) open_out(fs::path(f.out) / "bounds.json") << report;
    return 0;
}

int cmd_gen_config(const CommonFlags& f, bool template_only) {
    const ExperimentConfig cfg = resolve(f);
    std::ostringstream text;
    if (template_only) {
        text << emit_config(cfg);
    } else {
        ExperimentConfig c = cfg;
        if (f.seed) c.config_seed = *f.seed;
        write_state(text, initial_state(c));
    }
    if (f.out.empty()) {
        std::cout << text.str();
    } else {
        open_out(f.out) << text.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sampled sparse control of Cucker-Smale systems with Johnson-Lindenstrauss projections"};
    app.require_subcommand(1);
    CommonFlags simulate_f, sweep_f, exact_f, bounds_f, gen_f;
    double eps = 0.5;
    double delta = 0.1;
    bool template_only = false;

    auto* simulate = app.add_subcommand("simulate", "run every (strategy, k, seed) cell; CSV per run + summary.json");
    add_common(simulate, simulate_f);
    auto* sweep = app.add_subcommand("sweep-k", "mean T0 of DR per k with SP and R baselines");
    add_common(sweep, sweep_f);
    auto* exact = app.add_subcommand("exactness", "E_M versus T0 for several matrices at one k");
    add_common(exact, exact_f);
    auto* bounds = app.add_subcommand("bounds", "theory constants and dimension estimate as JSON");
    add_common(bounds, bounds_f);
    bounds->add_option("--eps", eps, "JL distortion for the dimension estimate");
    bounds->add_option("--delta", delta, "small-norm threshold for the dimension estimate");
    auto* gen = app.add_subcommand("gen-config", "write the initial-state file of a configuration");
    add_common(gen, gen_f);
    gen->add_flag("--template", template_only, "emit the key = value config instead of the state");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*simulate) return cmd_simulate(simulate_f);
        if (*sweep) return cmd_sweep_k(sweep_f);
        if (*exact) return cmd_exactness(exact_f);
        if (*bounds) return cmd_bounds(bounds_f, eps, delta);
        if (*gen) return cmd_gen_config(gen_f, template_only);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
