#pragma once
// Experiment configuration: the five named initial conditions, the flat
// key = value config file, and the initial-state file.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "csjl/control.hpp"
#include "csjl/jl.hpp"
#include "csjl/model.hpp"

namespace csjl {

/// outlier, geometric, cauchy, gaussian, uniform.
const std::vector<std::string>& config_names();

/// Preset parameters of a named configuration.
ModelParams preset_params(std::string_view name);

/// Initial state of a named configuration (indices 1-based in the formulas).
/// Only cauchy and gaussian consume the seed.
FlockState generate_config(std::string_view name, const ModelParams& params, std::uint64_t seed);

struct ExperimentConfig {
    std::string config_name = "outlier";  // or "file"
    std::string state_file;               // used when config_name == "file"
    std::uint64_t config_seed = 0;        // draw of the random configurations
    ModelParams params = preset_params("outlier");
    std::vector<StrategyKind> strategies{StrategyKind::kSparse};
    std::vector<std::size_t> k_list;
    std::vector<std::uint64_t> seeds{1};
    double horizon = 300.0;
    std::size_t substeps = 1;
    ThresholdMode dr_mode = ThresholdMode::kExperimental;
    ProjectionFamily family = ProjectionFamily::kBernoulli;
    std::size_t n_matrices = 6;  // exactness study
    std::string output_dir = "out";

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Defaults for a named configuration (preset parameters, horizon).
ExperimentConfig default_config(std::string_view name);

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string emit_config(const ExperimentConfig& cfg);

/// Header "N dim", then N lines of x, then N lines of v.
FlockState read_state(std::istream& in);
FlockState load_state(const std::filesystem::path& path);
void write_state(std::ostream& out, const FlockState& state);

/// Header "family k d seed", then k rows of d entries.
ProjectionMatrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const ProjectionMatrix& m);

/// %.17g: 17 significant digits, enough to round-trip any double.
std::string format_double(double x);

/// Initial state for a config: generated or read from state_file.
FlockState initial_state(const ExperimentConfig& cfg);

}  // namespace csjl
