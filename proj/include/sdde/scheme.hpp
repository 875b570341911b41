#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sdde/brownian.hpp"
#include "sdde/linalg.hpp"
#include "sdde/model.hpp"
#include "sdde/truncation.hpp"

namespace sdde {

// Uniform grid with Δ = τ/N. Times are always i·Δ, never accumulated.
struct SimulationGrid {
    double delay;
    double dt;
    int steps_per_delay;
    std::int64_t horizon_steps;

    double time(std::int64_t i) const noexcept { return static_cast<double>(i) * dt; }
};

/// dt = delay/n, horizon_steps = ⌈horizon/dt⌉. Throws ParameterError if dt > 1.
SimulationGrid make_grid(double delay, int n, double horizon);

enum class SchemeKind { GenericTEM, StabilityTEM, ClassicEM };

const char* to_string(SchemeKind kind);

// The last N+1 states z_{i−N}, ..., z_i in a ring.
class DelayHistory {
public:
    DelayHistory(int dim, int steps_per_delay);

    /// Loads ξ(jΔ) for j = −N..0.
    void fill_from_segment(const SddeModel& model, const SimulationGrid& grid);
    /// Appends z_{i+1}; the oldest entry drops out.
    void push(std::span<const double> state);

    std::span<const double> current() const;
    std::span<const double> delayed() const;
    int dim() const noexcept { return dim_; }
    int steps_per_delay() const noexcept { return n_; }

private:
    int dim_;
    int n_;
    std::size_t oldest_ = 0;
    std::vector<double> ring_;
};

struct StepResult {
    Vector pre;
    Vector post;
    bool truncated = false;
};

/// Generic truncated Euler-Maruyama step: Euler update followed by the radial
/// clamp at Φ⁻¹(h(Δ)). Throws BlowUpError(step_index + 1) if the Euler update is non-finite.
StepResult tem_step(const SddeModel& model, const TruncationProfile& profile, const SimulationGrid& grid,
                    const DelayHistory& history, std::span<const double> dW, std::int64_t step_index = 0);

/// Same algebra as tem_step, driven by a stability profile (Φ̂, μ < 1/2).
StepResult stability_tem_step(const SddeModel& model, const TruncationProfile& profile,
                              const SimulationGrid& grid, const DelayHistory& history,
                              std::span<const double> dW, std::int64_t step_index = 0);

/// Untruncated Euler-Maruyama; non-finite values are returned, not thrown.
Vector em_step(const SddeModel& model, const SimulationGrid& grid, const DelayHistory& history,
               std::span<const double> dW);

// Steps one path forward on a grid using coupled increments from a lattice.
// Keeps only the delay ring, so memory is O(N·d) regardless of the horizon.
class PathRunner {
public:
    /// profile may be null for ClassicEM only.
    PathRunner(const SddeModel& model, const TruncationProfile* profile, const SimulationGrid& grid,
               SchemeKind kind, const BrownianLattice& lattice);

    bool done() const noexcept { return index_ >= grid_.horizon_steps; }
    std::int64_t index() const noexcept { return index_; }
    double time() const noexcept { return grid_.time(index_); }

    /// Advances i → i+1.
    void step();
    void run_to_end();

    std::span<const double> state() const { return history_.current(); }
    std::span<const double> last_pre() const noexcept { return pre_; }
    double last_pre_norm() const noexcept { return pre_norm_; }
    bool last_truncated() const noexcept { return truncated_; }
    /// Infinite for ClassicEM.
    double bound() const noexcept { return bound_; }
    std::optional<std::int64_t> first_nonfinite_step() const noexcept { return first_nonfinite_; }
    std::int64_t truncation_count() const noexcept { return truncation_count_; }

private:
    const SddeModel& model_;
    SimulationGrid grid_;
    SchemeKind kind_;
    const BrownianLattice& lattice_;
    std::int64_t stride_;
    double bound_;
    DelayHistory history_;
    std::int64_t index_ = 0;
    Vector f_, g_, dw_, pre_, post_;
    double pre_norm_ = 0.0;
    bool truncated_ = false;
    std::int64_t truncation_count_ = 0;
    std::optional<std::int64_t> first_nonfinite_;
};

struct PathTrajectory {
    SimulationGrid grid;
    SchemeKind scheme_kind;
    int dim;
    /// Rows for i = −N..horizon_steps, row i at offset (i + N)·dim.
    std::vector<double> data;
    /// |pre-truncation state| per i = 0..horizon_steps (for i = 0 the initial value).
    std::vector<double> pre_norms;
    std::vector<std::uint8_t> truncated;
    Vector pre_truncation_last;
    std::optional<std::int64_t> first_nonfinite_step;

    std::span<const double> state(std::int64_t i) const;
    std::int64_t first_index() const noexcept { return -grid.steps_per_delay; }
    std::int64_t last_index() const noexcept { return grid.horizon_steps; }
};

/// Full trajectory; the piecewise-constant process is z(t) = states[i] on [t_i, t_{i+1}).
PathTrajectory simulate(const SddeModel& model, const TruncationProfile* profile, const SimulationGrid& grid,
                        SchemeKind kind, const BrownianLattice& lattice);

/// Continuous interpolant z_i + f(z_i, z_{i−N})(t − t_i) + g(z_i, z_{i−N})(W(t) − W(t_i))
/// at a fine-grid time t. Equals states[i] exactly at grid times.
Vector interpolate_aux(const PathTrajectory& trajectory, const SddeModel& model, const BrownianLattice& lattice,
                       double t);

}  // namespace sdde
