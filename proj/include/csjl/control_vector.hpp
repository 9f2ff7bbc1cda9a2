#pragma once

#include <cstddef>
#include <optional>

#include "csjl/agent_vectors.hpp"

namespace csjl {

/// Per-agent control entries u_1..u_N. `active_index` is set for componentwise
/// sparse controls (at most one nonzero entry).
struct ControlVector {
    ControlVector() = default;
    ControlVector(std::size_t agents, std::size_t dim) : entries(agents, dim) {}

    static ControlVector zero(std::size_t agents, std::size_t dim) { return ControlVector(agents, dim); }

    /// sum_i |u_i|_2, the l1(l2) cost of the control.
    double l1_norm() const;
    std::size_t nonzero_entries() const;

    AgentVectors entries;
    std::optional<std::size_t> active_index;
    double magnitude = 0.0;
};

}  // namespace csjl
