#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace csjl {

/// N vectors of equal dimension stored row-major in one contiguous buffer.
/// Row i is agent i (0-based at storage level).
class AgentVectors {
  public:
    AgentVectors() = default;
    AgentVectors(std::size_t agents, std::size_t dim) : agents_(agents), dim_(dim), data_(agents * dim, 0.0) {}
    AgentVectors(std::size_t agents, std::size_t dim, std::vector<double> data)
        : agents_(agents), dim_(dim), data_(std::move(data)) {
        if (data_.size() != agents_ * dim_) throw std::invalid_argument("AgentVectors: buffer size mismatch");
    }

    std::size_t agents() const { return agents_; }
    std::size_t dim() const { return dim_; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

    double& operator()(std::size_t i, std::size_t c) { return data_[i * dim_ + c]; }
    double operator()(std::size_t i, std::size_t c) const { return data_[i * dim_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool same_shape(const AgentVectors& o) const { return agents_ == o.agents_ && dim_ == o.dim_; }

    friend bool operator==(const AgentVectors&, const AgentVectors&) = default;

  private:
    std::size_t agents_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

}  // namespace csjl
