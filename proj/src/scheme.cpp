#include "sdde/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sdde/errors.hpp"

namespace sdde {

namespace {

// out = x + f(x,y)Δ + g(x,y)ΔW, with f and g as scratch.
void euler_update(const SddeModel& model, std::span<const double> x, std::span<const double> y,
                  std::span<const double> dW, double dt, std::span<double> f, std::span<double> g,
                  std::span<double> out) {
    const auto d = static_cast<std::size_t>(model.state_dim());
    const auto m = static_cast<std::size_t>(model.noise_dim());
    model.drift_into(x, y, f);
    model.diffusion_into(x, y, g);
    for (std::size_t r = 0; r < d; ++r) {
        double noise = 0.0;
        for (std::size_t j = 0; j < m; ++j) noise += g[r * m + j] * dW[j];
        out[r] = x[r] + f[r] * dt + noise;
    }
}

void check_step_inputs(const SddeModel& model, const SimulationGrid& grid, const DelayHistory& history,
                       std::span<const double> dW) {
    if (history.dim() != model.state_dim()) throw ParameterError("history dimension does not match the model");
    if (history.steps_per_delay() != grid.steps_per_delay)
        throw ParameterError("history length does not match the grid");
    if (dW.size() != static_cast<std::size_t>(model.noise_dim()))
        throw ParameterError("Brownian increment has the wrong dimension");
}

StepResult truncated_step(const SddeModel& model, const TruncationProfile& profile, const SimulationGrid& grid,
                          const DelayHistory& history, std::span<const double> dW, std::int64_t step_index) {
    check_step_inputs(model, grid, history, dW);
    const auto d = static_cast<std::size_t>(model.state_dim());
    Vector f(d), g(d * static_cast<std::size_t>(model.noise_dim()));
    StepResult out{Vector(d), Vector(), false};
    euler_update(model, history.current(), history.delayed(), dW, grid.dt, f, g, out.pre);
    if (!all_finite(out.pre)) throw BlowUpError(step_index + 1, "non-finite Euler update before truncation");
    out.post = out.pre;
    out.truncated = truncate_in_place(out.post, truncation_bound(profile, grid.dt));
    return out;
}

}  // namespace

SimulationGrid make_grid(double delay, int n, double horizon) {
    if (!(delay > 0.0)) throw ParameterError("delay must be positive");
    if (n < 1) throw ParameterError("steps per delay must be a positive integer");
    if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
    const double dt = delay / static_cast<double>(n);
    if (dt > 1.0) throw ParameterError("step size delay/n = " + std::to_string(dt) + " exceeds 1");
    const auto steps = static_cast<std::int64_t>(std::ceil(horizon / dt - 1e-9));
    return {delay, dt, n, steps};
}

const char* to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::GenericTEM: return "tem";
        case SchemeKind::StabilityTEM: return "stab-tem";
        case SchemeKind::ClassicEM: return "em";
    }
    return "?";
}

DelayHistory::DelayHistory(int dim, int steps_per_delay)
    : dim_(dim),
      n_(steps_per_delay),
      ring_(static_cast<std::size_t>(steps_per_delay + 1) * static_cast<std::size_t>(dim), 0.0) {
    if (dim < 1 || steps_per_delay < 1) throw ParameterError("history needs positive dimension and length");
}

void DelayHistory::fill_from_segment(const SddeModel& model, const SimulationGrid& grid) {
    if (model.state_dim() != dim_ || grid.steps_per_delay != n_)
        throw ParameterError("history shape does not match model and grid");
    const auto d = static_cast<std::size_t>(dim_);
    for (int j = 0; j <= n_; ++j) {
        const double theta = grid.time(j - n_);
        model.initial_segment_into(theta, std::span<double>(ring_).subspan(static_cast<std::size_t>(j) * d, d));
    }
    oldest_ = 0;
}

void DelayHistory::push(std::span<const double> state) {
    const auto d = static_cast<std::size_t>(dim_);
    std::copy(state.begin(), state.end(), ring_.begin() + static_cast<std::ptrdiff_t>(oldest_ * d));
    oldest_ = (oldest_ + 1) % static_cast<std::size_t>(n_ + 1);
}

std::span<const double> DelayHistory::current() const {
    const auto d = static_cast<std::size_t>(dim_);
    const std::size_t newest = (oldest_ + static_cast<std::size_t>(n_)) % static_cast<std::size_t>(n_ + 1);
    return std::span<const double>(ring_).subspan(newest * d, d);
}

std::span<const double> DelayHistory::delayed() const {
    const auto d = static_cast<std::size_t>(dim_);
    return std::span<const double>(ring_).subspan(oldest_ * d, d);
}

StepResult tem_step(const SddeModel& model, const TruncationProfile& profile, const SimulationGrid& grid,
                    const DelayHistory& history, std::span<const double> dW, std::int64_t step_index) {
    if (profile.kind() != ProfileKind::Generic) throw ParameterError("generic TEM step needs a generic profile");
    return truncated_step(model, profile, grid, history, dW, step_index);
}

StepResult stability_tem_step(const SddeModel& model, const TruncationProfile& profile,
                              const SimulationGrid& grid, const DelayHistory& history,
                              std::span<const double> dW, std::int64_t step_index) {
    if (profile.kind() != ProfileKind::Stability)
        throw ParameterError("stability TEM step needs a stability profile");
    return truncated_step(model, profile, grid, history, dW, step_index);
}

Vector em_step(const SddeModel& model, const SimulationGrid& grid, const DelayHistory& history,
               std::span<const double> dW) {
    check_step_inputs(model, grid, history, dW);
    const auto d = static_cast<std::size_t>(model.state_dim());
    Vector f(d), g(d * static_cast<std::size_t>(model.noise_dim())), out(d);
    euler_update(model, history.current(), history.delayed(), dW, grid.dt, f, g, out);
    return out;
}

PathRunner::PathRunner(const SddeModel& model, const TruncationProfile* profile, const SimulationGrid& grid,
                       SchemeKind kind, const BrownianLattice& lattice)
    : model_(model),
      grid_(grid),
      kind_(kind),
      lattice_(lattice),
      stride_(0),
      bound_(std::numeric_limits<double>::infinity()),
      history_(model.state_dim(), grid.steps_per_delay) {
    if (std::abs(grid.delay - model.delay()) > 1e-12 * model.delay())
        throw ParameterError("grid delay does not match the model delay");
    if (lattice.noise_dim() != model.noise_dim())
        throw ParameterError("lattice noise dimension does not match the model");
    if (kind != SchemeKind::ClassicEM) {
        if (profile == nullptr) throw ParameterError("truncated schemes need a truncation profile");
        const auto wanted = kind == SchemeKind::GenericTEM ? ProfileKind::Generic : ProfileKind::Stability;
        if (profile->kind() != wanted)
            throw ParameterError(std::string("scheme '") + to_string(kind) + "' is incompatible with the profile kind");
        bound_ = truncation_bound(*profile, grid.dt);
    }
    stride_ = lattice.stride_for(grid.dt);
    if (lattice.fine_steps() < grid.horizon_steps * stride_)
        throw GridAlignmentError("lattice horizon is shorter than the simulation horizon");

    const auto d = static_cast<std::size_t>(model.state_dim());
    f_.resize(d);
    g_.resize(d * static_cast<std::size_t>(model.noise_dim()));
    dw_.resize(static_cast<std::size_t>(model.noise_dim()));
    pre_.resize(d);
    post_.resize(d);
    history_.fill_from_segment(model, grid);
    const auto x0 = history_.current();
    std::copy(x0.begin(), x0.end(), pre_.begin());
    pre_norm_ = norm(pre_);
}

void PathRunner::step() {
    if (done()) throw ParameterError("path already reached the horizon");
    lattice_.coarse_increment_into(stride_, index_, dw_);
    euler_update(model_, history_.current(), history_.delayed(), dw_, grid_.dt, f_, g_, pre_);
    ++index_;
    pre_norm_ = norm(pre_);
    truncated_ = false;
    if (!std::isfinite(pre_norm_)) {
        if (kind_ != SchemeKind::ClassicEM)
            throw BlowUpError(index_, std::string("non-finite pre-truncation state in ") + to_string(kind_));
        if (!first_nonfinite_) first_nonfinite_ = index_;
        history_.push(pre_);
        return;
    }
    if (kind_ == SchemeKind::ClassicEM) {
        history_.push(pre_);
        return;
    }
    // Truncate a copy so pre_ keeps the value before the clamp.
    std::copy(pre_.begin(), pre_.end(), post_.begin());
    truncated_ = truncate_in_place(post_, bound_);
    if (truncated_) ++truncation_count_;
    history_.push(post_);
}

void PathRunner::run_to_end() {
    while (!done()) step();
}

std::span<const double> PathTrajectory::state(std::int64_t i) const {
    if (i < first_index() || i > last_index()) throw ParameterError("trajectory index out of range");
    const auto d = static_cast<std::size_t>(dim);
    return std::span<const double>(data).subspan(static_cast<std::size_t>(i - first_index()) * d, d);
}

PathTrajectory simulate(const SddeModel& model, const TruncationProfile* profile, const SimulationGrid& grid,
                        SchemeKind kind, const BrownianLattice& lattice) {
    PathRunner runner(model, profile, grid, kind, lattice);
    const auto d = static_cast<std::size_t>(model.state_dim());
    const auto n = static_cast<std::size_t>(grid.steps_per_delay);
    const auto steps = static_cast<std::size_t>(grid.horizon_steps);

    PathTrajectory traj{grid, kind, model.state_dim(), {}, {}, {}, {}, std::nullopt};
    traj.data.resize((n + steps + 1) * d);
    for (std::size_t j = 0; j <= n; ++j) {
        const double theta = grid.time(static_cast<std::int64_t>(j) - grid.steps_per_delay);
        model.initial_segment_into(theta, std::span<double>(traj.data).subspan(j * d, d));
    }
    traj.pre_norms.reserve(steps + 1);
    traj.truncated.reserve(steps + 1);
    traj.pre_norms.push_back(runner.last_pre_norm());
    traj.truncated.push_back(0);

    std::size_t row = n + 1;
    while (!runner.done()) {
        runner.step();
        const auto s = runner.state();
        std::copy(s.begin(), s.end(), traj.data.begin() + static_cast<std::ptrdiff_t>(row * d));
        ++row;
        traj.pre_norms.push_back(runner.last_pre_norm());
        traj.truncated.push_back(runner.last_truncated() ? 1 : 0);
    }
    const auto pre = runner.last_pre();
    traj.pre_truncation_last.assign(pre.begin(), pre.end());
    traj.first_nonfinite_step = runner.first_nonfinite_step();
    return traj;
}

Vector interpolate_aux(const PathTrajectory& trajectory, const SddeModel& model, const BrownianLattice& lattice,
                       double t) {
    const auto& grid = trajectory.grid;
    if (t < 0.0 || t > grid.time(grid.horizon_steps) * (1.0 + 1e-12))
        throw ParameterError("interpolation time outside [0, horizon]");
    const std::int64_t stride = lattice.stride_for(grid.dt);
    const std::int64_t k = t == 0.0 ? 0 : grid_multiple(t, lattice.fine_dt(), "interpolation time");
    const std::int64_t i = k / stride;
    const std::int64_t offset = k - i * stride;
    const auto zi = trajectory.state(i);
    if (offset == 0) return Vector(zi.begin(), zi.end());

    const auto zd = trajectory.state(i - grid.steps_per_delay);
    const auto d = static_cast<std::size_t>(model.state_dim());
    const auto m = static_cast<std::size_t>(model.noise_dim());
    Vector dw(m, 0.0);
    for (std::int64_t q = i * stride; q < k; ++q) {
        const auto inc = lattice.fine_increment(q);
        for (std::size_t j = 0; j < m; ++j) dw[j] += inc[j];
    }
    Vector f(d), g(d * m), out(d);
    euler_update(model, zi, zd, dw, static_cast<double>(offset) * lattice.fine_dt(), f, g, out);
    return out;
}

}  // namespace sdde
