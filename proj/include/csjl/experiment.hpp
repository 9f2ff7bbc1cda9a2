#pragma once
// Experiment harness shared by the CLI and the acceptance suite: expands a
// config into (strategy, k, seed) cells, runs them in parallel and emits the
// per-run CSV, the JSON summary and the sweep/exactness tables.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "csjl/analysis.hpp"
#include "csjl/config.hpp"

namespace csjl {

struct Cell {
    StrategyKind kind = StrategyKind::kSparse;
    std::size_t k = 0;  // DR only
    std::uint64_t seed = 0;

    std::string key() const;  // e.g. "DR_k25_s3", stable file stem
};

struct CellResult {
    Cell cell;
    RunRecord record;
    std::optional<double> exactness;        // E_M, DR only
    std::optional<double> low_margin;       // W(0) - gamma(Y(0))^2, DR only
};

/// Parallelism cap: CONSENSUS_JL_THREADS if set and positive, otherwise the
/// hardware concurrency.
std::size_t thread_cap();

/// Strategies x (k list for DR) x seeds; the U/SP/none cells use only the
/// first seed since they are deterministic.
std::vector<Cell> expand_cells(const ExperimentConfig& cfg);

/// DR matrix for a cell: the identity when k == d, else the config family.
ProjectionMatrix cell_matrix(const ExperimentConfig& cfg, std::size_t k, std::uint64_t seed);

RunOptions run_options(const ExperimentConfig& cfg);

CellResult run_cell(const ExperimentConfig& cfg, const FlockState& initial, const Cell& cell);

/// Runs cells on up to `threads` workers; results come back in input order.
std::vector<CellResult> run_cells(const ExperimentConfig& cfg, const FlockState& initial,
                                  const std::vector<Cell>& cells, std::size_t threads);

/// Columns t, X, V, gamma_sq, margin, W, Y, control_index, active. Agent
/// indices are 1-based; W/Y are empty outside DR.
void write_run_csv(std::ostream& out, const RunRecord& record);

/// JSON summary of a simulate invocation.
std::string summary_json(const ExperimentConfig& cfg, const TheoryConstants& consts,
                         const std::vector<CellResult>& results);

struct SweepRow {
    std::string label;  // "DR", "SP", "R"
    std::size_t k = 0;
    double mean_t0 = 0.0, min_t0 = 0.0, max_t0 = 0.0;
    std::size_t n_seeds = 0;
    std::size_t n_reached = 0;
};

std::vector<SweepRow> sweep_k(const ExperimentConfig& cfg, const FlockState& initial, std::size_t threads);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct ExactnessRow {
    std::string label;  // "matrix" or "identity"
    std::uint64_t seed = 0;
    double e_m = 0.0;
    std::optional<double> t0;
};

struct ExactnessStudy {
    std::size_t k = 0;
    std::vector<ExactnessRow> rows;
    double spearman = 0.0;  // rank correlation E_M vs T0 over matrix rows that reached consensus
};

ExactnessStudy exactness_study(const ExperimentConfig& cfg, const FlockState& initial, std::size_t k,
                               std::size_t threads);
void write_exactness_csv(std::ostream& out, const ExactnessStudy& study);

/// Spearman rank correlation (average ranks for ties); 0 for fewer than 2 points.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Bounds report: TheoryConstants plus the dimension estimate.
std::string bounds_json(const ExperimentConfig& cfg, const FlockState& initial, double eps, double delta);

}  // namespace csjl
