#include "csjl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <json.hpp>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace csjl {

using nlohmann::json;

std::string Cell::key() const {
    std::string out(strategy_name(kind));
    if (kind == StrategyKind::kProjected) out += "_k" + std::to_string(k);
    out += "_s" + std::to_string(seed);
    return out;
}

std::size_t thread_cap() {
    if (const char* env = std::getenv("CONSENSUS_JL_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<Cell> expand_cells(const ExperimentConfig& cfg) {
    if (cfg.seeds.empty()) throw std::invalid_argument("config: at least one seed is required");
    std::vector<Cell> cells;
    for (StrategyKind kind : cfg.strategies) {
        switch (kind) {
            case StrategyKind::kNone:
            case StrategyKind::kSparse:
            case StrategyKind::kUniform:
                cells.push_back({kind, 0, cfg.seeds.front()});
                break;
            case StrategyKind::kRandom:
                for (auto s : cfg.seeds) cells.push_back({kind, 0, s});
                break;
            case StrategyKind::kProjected:
                if (cfg.k_list.empty()) throw std::invalid_argument("config: DR needs a k list");
                for (auto k : cfg.k_list) {
                    for (auto s : cfg.seeds) cells.push_back({kind, k, s});
                }
                break;
        }
    }
    return cells;
}

ProjectionMatrix cell_matrix(const ExperimentConfig& cfg, std::size_t k, std::uint64_t seed) {
    if (k == cfg.params.dim || cfg.family == ProjectionFamily::kIdentity) {
        if (k != cfg.params.dim) throw std::invalid_argument("identity projection requires k == d");
        return ProjectionMatrix::identity(k);
    }
    return generate(cfg.family, k, cfg.params.dim, seed);
}

RunOptions run_options(const ExperimentConfig& cfg) {
    RunOptions o;
    o.horizon = cfg.horizon;
    o.substeps = cfg.substeps;
    return o;
}

CellResult run_cell(const ExperimentConfig& cfg, const FlockState& initial, const Cell& cell) {
    CellResult r;
    r.cell = cell;
    Strategy strategy;
    strategy.kind = cell.kind;
    strategy.mode = cfg.dr_mode;
    RunOptions opts = run_options(cfg);
    if (cell.kind == StrategyKind::kNone) opts.stop_at_switch_off = false;
    if (cell.kind == StrategyKind::kProjected) {
        strategy.projection = cell_matrix(cfg, cell.k, cell.seed);
        r.exactness = exactness_at_zero(*strategy.projection, initial.v);
        const FlockState low(strategy.projection->apply(initial.x), strategy.projection->apply(initial.v));
        const Moments hm = moments(initial);
        const Moments lm = moments(low);
        r.low_margin = consensus_margin(lm, cfg.params);
        if (cfg.dr_mode == ThresholdMode::kTheoretical) {
            const auto consts = compute_constants(hm.spread, hm.velocity, lm.velocity, lm.spread, cfg.params);
            strategy.gamma_threshold = consts.gamma_threshold;
        }
    }
    r.record = run_strategy(initial, strategy, cfg.params, opts, cell.seed);
    return r;
}

std::vector<CellResult> run_cells(const ExperimentConfig& cfg, const FlockState& initial,
                                  const std::vector<Cell>& cells, std::size_t threads) {
    std::vector<CellResult> out(cells.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_lock;
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                out[i] = run_cell(cfg, initial, cells[i]);
            } catch (...) {
                std::lock_guard<std::mutex> g(error_lock);
                if (!error) error = std::current_exception();
            }
        }
    };
    const std::size_t n = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(cells.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

namespace {

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return format_double(x);
}

json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json constants_json(const TheoryConstants& k) {
    return json{
        {"La", k.la},
        {"a0", k.a0},
        {"c", k.c},
        {"C", k.cc},
        {"K1", k.k1},
        {"K2", k.k2},
        {"K3", k.k3},
        {"K4", k.k4},
        {"Knorm", k.knorm},
        {"Xbar", k.xbar},
        {"Ybar", k.ybar},
        {"Delta", finite_or_null(k.delta)},
        {"Delta_degenerate", k.delta_degenerate},
        {"That", finite_or_null(k.that)},
        {"That_displayed", finite_or_null(k.that_displayed)},
        {"tau0", finite_or_null(k.tau0)},
        {"alpha", k.alpha},
        {"eps_prime", finite_or_null(k.eps_prime)},
        {"log10_eps_prime", finite_or_null(k.log10_eps_prime)},
        {"Gamma", finite_or_null(k.gamma_threshold)},
        {"feasible", k.feasible},
        {"note", k.note},
    };
}

}  // namespace

void write_run_csv(std::ostream& out, const RunRecord& record) {
    out << "t,X,V,gamma_sq,margin,W,Y,control_index,active\n";
    const auto& hs = record.trajectory.samples;
    const auto* low = record.low ? &record.low->samples : nullptr;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const Sample& s = hs[i];
        out << num(s.t) << ',' << num(s.moments.spread) << ',' << num(s.moments.velocity) << ',' << num(s.gamma_sq)
            << ',' << num(s.margin) << ',';
        if (low) out << num((*low)[i].moments.velocity);
        out << ',';
        if (low) out << num((*low)[i].moments.spread);
        out << ',';
        if (s.control_index) out << (*s.control_index + 1);
        out << ',' << (s.active ? 1 : 0) << '\n';
    }
}

std::string summary_json(const ExperimentConfig& cfg, const TheoryConstants& consts,
                         const std::vector<CellResult>& results) {
    json runs = json::array();
    for (const auto& r : results) {
        json j{
            {"key", r.cell.key()},
            {"strategy", std::string(strategy_name(r.cell.kind))},
            {"seed", r.cell.seed},
            {"T0", opt(r.record.t0)},
            {"T0_5", opt(r.record.t0_5)},
            {"reached", r.record.reached()},
            {"initial_margin", finite_or_null(r.record.initial_margin)},
            {"final_margin", finite_or_null(r.record.final_margin)},
            {"max_control_cost", r.record.max_control_cost},
        };
        if (r.cell.kind == StrategyKind::kProjected) {
            j["k"] = r.cell.k;
            j["mode"] = std::string(mode_name(cfg.dr_mode));
            j["TS"] = opt(r.record.ts);
            j["E_M"] = opt(r.exactness);
            j["low_initial_margin"] = opt(r.low_margin);
        }
        runs.push_back(std::move(j));
    }
    json out{
        {"config", cfg.config_name},
        {"config_seed", cfg.config_seed},
        {"seeds", cfg.seeds},
        {"params",
         {{"N", cfg.params.agents},
          {"d", cfg.params.dim},
          {"K", cfg.params.kernel_scale},
          {"sigma", cfg.params.kernel_offset},
          {"beta", cfg.params.kernel_decay},
          {"theta", cfg.params.budget},
          {"tau", cfg.params.sampling_time}}},
        {"horizon", cfg.horizon},
        {"theory_constants", constants_json(consts)},
        {"runs", std::move(runs)},
    };
    return out.dump(2) + "\n";
}

std::vector<SweepRow> sweep_k(const ExperimentConfig& cfg, const FlockState& initial, std::size_t threads) {
    ExperimentConfig c = cfg;
    c.strategies = {StrategyKind::kSparse, StrategyKind::kRandom, StrategyKind::kProjected};
    const auto cells = expand_cells(c);
    const auto results = run_cells(c, initial, cells, threads);

    auto summarize = [&](std::string label, std::size_t k, auto pred) {
        SweepRow row;
        row.label = std::move(label);
        row.k = k;
        row.min_t0 = std::numeric_limits<double>::infinity();
        row.max_t0 = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (const auto& r : results) {
            if (!pred(r.cell)) continue;
            ++row.n_seeds;
            if (!r.record.t0) continue;
            ++row.n_reached;
            sum += *r.record.t0;
            row.min_t0 = std::min(row.min_t0, *r.record.t0);
            row.max_t0 = std::max(row.max_t0, *r.record.t0);
        }
        row.mean_t0 = row.n_reached ? sum / static_cast<double>(row.n_reached)
                                    : std::numeric_limits<double>::quiet_NaN();
        return row;
    };
    std::vector<SweepRow> rows;
    for (auto k : c.k_list) {
        rows.push_back(summarize("DR", k, [k](const Cell& x) { return x.kind == StrategyKind::kProjected && x.k == k; }));
    }
    rows.push_back(summarize("SP", 0, [](const Cell& x) { return x.kind == StrategyKind::kSparse; }));
    rows.push_back(summarize("R", 0, [](const Cell& x) { return x.kind == StrategyKind::kRandom; }));
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "label,k,mean_T0,min,max,n_seeds,n_reached\n";
    for (const auto& r : rows) {
        out << r.label << ',' << r.k << ',' << num(r.mean_t0) << ',' << num(r.min_t0) << ',' << num(r.max_t0) << ','
            << r.n_seeds << ',' << r.n_reached << '\n';
    }
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman: size mismatch");
    const std::size_t n = a.size();
    if (n < 2) return 0.0;
    auto ranks = [n](const std::vector<double>& x) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double mean = 0.5 * static_cast<double>(n + 1);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sab += (ra[i] - mean) * (rb[i] - mean);
        saa += (ra[i] - mean) * (ra[i] - mean);
        sbb += (rb[i] - mean) * (rb[i] - mean);
    }
    return saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0;
}

ExactnessStudy exactness_study(const ExperimentConfig& cfg, const FlockState& initial, std::size_t k,
                               std::size_t threads) {
    if (cfg.seeds.empty()) throw std::invalid_argument("exactness: at least one seed is required");
    std::vector<std::uint64_t> seeds = cfg.seeds;
    if (seeds.size() == 1) {
        for (std::size_t m = 1; m < cfg.n_matrices; ++m) seeds.push_back(cfg.seeds.front() + m);
    }
    std::vector<Cell> cells;
    for (auto s : seeds) cells.push_back({StrategyKind::kProjected, k, s});
    cells.push_back({StrategyKind::kProjected, cfg.params.dim, seeds.front()});  // identity control row
    const auto results = run_cells(cfg, initial, cells, threads);

    ExactnessStudy study;
    study.k = k;
    std::vector<double> em, t0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        ExactnessRow row;
        row.label = i + 1 == results.size() ? "identity" : "matrix";
        row.seed = r.cell.seed;
        row.e_m = r.exactness.value_or(0.0);
        row.t0 = r.record.t0;
        if (row.label == "matrix" && row.t0) {
            em.push_back(row.e_m);
            t0.push_back(*row.t0);
        }
        study.rows.push_back(std::move(row));
    }
    study.spearman = spearman(em, t0);
    return study;
}

void write_exactness_csv(std::ostream& out, const ExactnessStudy& study) {
    out << "label,k,seed,E_M,T0\n";
    for (const auto& r : study.rows) {
        out << r.label << ',' << (r.label == "identity" ? 0 : study.k) << ',' << r.seed << ',' << num(r.e_m) << ',';
        if (r.t0) out << num(*r.t0);
        out << '\n';
    }
}

std::string bounds_json(const ExperimentConfig& cfg, const FlockState& initial, double eps, double delta) {
    const Moments m = moments(initial);
    const TheoryConstants k = compute_constants(m.spread, m.velocity, m.velocity, m.spread, cfg.params);
    json out{
        {"config", cfg.config_name},
        {"X0", m.spread},
        {"V0", m.velocity},
        {"initial_margin", finite_or_null(consensus_margin(m, cfg.params))},
        {"theory_constants", constants_json(k)},
    };
    if (k.feasible) {
        const DimensionEstimate e = dimension_estimate(cfg.params, k.that, eps, delta, m.velocity);
        out["dimension_estimate"] = json{
            {"eps", eps},
            {"delta", delta},
            {"horizon", k.that},
            {"branching_exponent", e.branching_exponent},
            {"log_paths", e.log_paths},
            {"log_N1", e.log_n1},
            {"log_N2", e.log_n2},
            {"log_N3", e.log_n3},
            {"log_N_total", e.log_total},
            {"k0", e.k0},
            {"proportionality", e.proportionality},
            {"exceeds_d", e.k0 > static_cast<double>(cfg.params.dim)},
        };
    }
    out["curve_guarantee_families"] = json{{"bernoulli", true}, {"scaled_projection", true}, {"gaussian", false}};
    return out.dump(2) + "\n";
}

}  // namespace csjl
