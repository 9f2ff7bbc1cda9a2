#pragma once
// Sampled sparse feedback strategies (SP, U, R) and the coupled
// high/low-dimensional run in which the projected twin picks the agent (DR).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "csjl/dynamics.hpp"
#include "csjl/jl.hpp"
#include "csjl/rng.hpp"

namespace csjl {

enum class StrategyKind { kNone, kSparse, kUniform, kRandom, kProjected };

/// Threshold used by the low-dimensional twin to hand over to (R).
enum class ThresholdMode {
    kExperimental,  // W <= gamma(Y)^2
    kTheoretical,   // W <= Gamma = (2 Delta)^2
};

std::string_view strategy_name(StrategyKind kind);  // none, SP, U, R, DR
StrategyKind parse_strategy(std::string_view name);
std::string_view mode_name(ThresholdMode mode);
ThresholdMode parse_mode(std::string_view name);

struct IndexChoice {
    std::size_t index = 0;   // 0-based
    bool zero_norm = false;  // every perp component vanishes
};

/// Smallest index maximizing |v_i - mean|.
IndexChoice select_max_perp_index(const AgentVectors& v);

/// u_i = -theta v_i^perp / |v_i^perp| at one agent, zero elsewhere; the zero
/// control if v_i^perp = 0.
ControlVector sparse_control_at(const AgentVectors& v, std::size_t index, double theta);

ControlVector control_sp(const FlockState& state, const ModelParams& params);
ControlVector control_uniform(const FlockState& state, const ModelParams& params);
ControlVector control_random(const FlockState& state, const ModelParams& params, Engine& rng);

class SparsePolicy final : public ControlPolicy {
  public:
    explicit SparsePolicy(const ModelParams& params) : params_(params) {}
    ControlVector control(const FlockState& state, const SampleContext&) override { return control_sp(state, params_); }

  private:
    ModelParams params_;
};

class UniformPolicy final : public ControlPolicy {
  public:
    explicit UniformPolicy(const ModelParams& params) : params_(params) {}
    ControlVector control(const FlockState& state, const SampleContext&) override {
        return control_uniform(state, params_);
    }

  private:
    ModelParams params_;
};

class RandomPolicy final : public ControlPolicy {
  public:
    RandomPolicy(const ModelParams& params, std::uint64_t seed)
        : params_(params), rng_(make_engine(seed, Stream::kRandomControl)) {}
    ControlVector control(const FlockState& state, const SampleContext&) override {
        return control_random(state, params_, rng_);
    }

  private:
    ModelParams params_;
    Engine rng_;
};

struct Strategy {
    StrategyKind kind = StrategyKind::kSparse;
    ThresholdMode mode = ThresholdMode::kExperimental;  // DR only
    std::optional<ProjectionMatrix> projection;         // DR only
    double gamma_threshold = 0.0;                       // Gamma, theoretical DR only
};

struct CoupledRun {
    Trajectory high;
    Trajectory low;
    std::optional<double> t0;    // high system enters the region
    std::optional<double> t0_5;  // high margin halves
    std::optional<double> ts;    // hand-over to (R); = t0 if the high system enters first
    std::uint64_t seed = 0;
};

/// Coupled sampled run. At every sample: the high region test switches the
/// control off; otherwise a low system past its threshold hands over to (R)
/// on the high system (low control zero from then on); otherwise the agent is
/// picked from w^perp and both systems receive their own sparse control.
CoupledRun run_dr(const FlockState& initial_high, const ProjectionMatrix& m, const ModelParams& params,
                  ThresholdMode mode, double gamma_threshold, const RunOptions& options, std::uint64_t seed);

struct RunRecord {
    StrategyKind kind = StrategyKind::kNone;
    ThresholdMode mode = ThresholdMode::kExperimental;
    std::uint64_t seed = 0;
    Trajectory trajectory;
    std::optional<Trajectory> low;  // DR only
    std::optional<double> t0;
    std::optional<double> t0_5;
    std::optional<double> ts;
    double initial_margin = 0.0;
    double final_margin = 0.0;
    double max_control_cost = 0.0;

    bool reached() const { return t0.has_value(); }
};

RunRecord run_strategy(const FlockState& initial, const Strategy& strategy, const ModelParams& params,
                       const RunOptions& options, std::uint64_t seed);

}  // namespace csjl
