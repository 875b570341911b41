#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sdde/linalg.hpp"

namespace sdde {

// Brownian increments on the finest grid of a convergence study. Coarser step
// sizes read aggregated sums of the same increments, so every resolution is
// driven by one Brownian path.
//
// Increments are stored step-major: entry (k, j) is ΔW_j over [k Δ_ref, (k+1) Δ_ref).
class BrownianLattice {
public:
    /// Deterministic in all arguments; each (seed, path_index) pair gets its own stream.
    static BrownianLattice generate(std::uint64_t seed, std::uint64_t path_index, int noise_dim, double fine_dt,
                                    double horizon);

    int noise_dim() const noexcept { return m_; }
    double fine_dt() const noexcept { return fine_dt_; }
    double horizon() const noexcept { return horizon_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t path_index() const noexcept { return path_index_; }
    std::int64_t fine_steps() const noexcept { return steps_; }

    std::span<const double> fine_increment(std::int64_t k) const;
    std::span<const double> increments() const noexcept { return increments_; }

    /// Number of fine steps per coarse step; throws GridAlignmentError unless coarse_dt = k·fine_dt.
    std::int64_t stride_for(double coarse_dt) const;

    /// Sum of the fine increments covering [i·coarse_dt, (i+1)·coarse_dt), left to right.
    Vector coarse_increment(double coarse_dt, std::int64_t step_index) const;
    void coarse_increment_into(std::int64_t stride, std::int64_t step_index, std::span<double> out) const;

    /// W(t) for t on the fine grid; W(0) = 0.
    Vector value_at(double t) const;
    Vector value_at_step(std::int64_t k) const;

private:
    BrownianLattice(std::uint64_t seed, std::uint64_t path_index, int noise_dim, double fine_dt, double horizon,
                    std::int64_t steps, std::vector<double> increments);

    std::uint64_t seed_;
    std::uint64_t path_index_;
    int m_;
    double fine_dt_;
    double horizon_;
    std::int64_t steps_;
    std::vector<double> increments_;
};

/// Integer k with value = k·unit up to 1e-9 relative, or GridAlignmentError.
std::int64_t grid_multiple(double value, double unit, const char* what);

}  // namespace sdde
