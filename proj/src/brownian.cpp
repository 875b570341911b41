#include "sdde/brownian.hpp"

#include <cmath>
#include <random>
#include <string>

#include "sdde/errors.hpp"

namespace sdde {

namespace {

constexpr double kAlignTolerance = 1e-9;

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t path_index) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(path_index), hi(path_index), 0x5dde5ddeu};
    return std::mt19937_64(seq);
}

}  // namespace

std::int64_t grid_multiple(double value, double unit, const char* what) {
    const double ratio = value / unit;
    const double k = std::round(ratio);
    if (!(k >= 1.0) || std::abs(ratio - k) > kAlignTolerance * k)
        throw GridAlignmentError(std::string(what) + " is not an integer multiple of the fine step");
    return static_cast<std::int64_t>(k);
}

BrownianLattice::BrownianLattice(std::uint64_t seed, std::uint64_t path_index, int noise_dim, double fine_dt,
                                 double horizon, std::int64_t steps, std::vector<double> increments)
    : seed_(seed),
      path_index_(path_index),
      m_(noise_dim),
      fine_dt_(fine_dt),
      horizon_(horizon),
      steps_(steps),
      increments_(std::move(increments)) {}

BrownianLattice BrownianLattice::generate(std::uint64_t seed, std::uint64_t path_index, int noise_dim,
                                          double fine_dt, double horizon) {
    if (noise_dim < 1) throw ParameterError("noise dimension must be at least 1");
    if (!(fine_dt > 0.0)) throw ParameterError("fine step must be positive");
    if (!(horizon >= fine_dt * (1.0 - kAlignTolerance))) throw ParameterError("horizon must be at least one fine step");

    const auto steps = static_cast<std::int64_t>(std::ceil(horizon / fine_dt - kAlignTolerance));
    std::vector<double> inc(static_cast<std::size_t>(steps) * static_cast<std::size_t>(noise_dim));
    auto gen = stream_for(seed, path_index);
    std::normal_distribution<double> normal(0.0, std::sqrt(fine_dt));
    for (double& v : inc) v = normal(gen);
    return BrownianLattice(seed, path_index, noise_dim, fine_dt, horizon, steps, std::move(inc));
}

std::span<const double> BrownianLattice::fine_increment(std::int64_t k) const {
    if (k < 0 || k >= steps_) throw ParameterError("fine step index out of range");
    return std::span<const double>(increments_).subspan(static_cast<std::size_t>(k * m_),
                                                        static_cast<std::size_t>(m_));
}

std::int64_t BrownianLattice::stride_for(double coarse_dt) const {
    return grid_multiple(coarse_dt, fine_dt_, "coarse step");
}

void BrownianLattice::coarse_increment_into(std::int64_t stride, std::int64_t step_index,
                                            std::span<double> out) const {
    const std::int64_t first = step_index * stride;
    if (step_index < 0 || first + stride > steps_) throw ParameterError("coarse step index beyond the horizon");
    for (int j = 0; j < m_; ++j) out[static_cast<std::size_t>(j)] = 0.0;
    const double* p = increments_.data() + first * m_;
    for (std::int64_t k = 0; k < stride; ++k, p += m_)
        for (int j = 0; j < m_; ++j) out[static_cast<std::size_t>(j)] += p[j];
}

Vector BrownianLattice::coarse_increment(double coarse_dt, std::int64_t step_index) const {
    Vector out(static_cast<std::size_t>(m_));
    coarse_increment_into(stride_for(coarse_dt), step_index, out);
    return out;
}

Vector BrownianLattice::value_at_step(std::int64_t k) const {
    if (k < 0 || k > steps_) throw ParameterError("fine grid index out of range");
    Vector w(static_cast<std::size_t>(m_), 0.0);
    const double* p = increments_.data();
    for (std::int64_t i = 0; i < k; ++i, p += m_)
        for (int j = 0; j < m_; ++j) w[static_cast<std::size_t>(j)] += p[j];
    return w;
}

Vector BrownianLattice::value_at(double t) const {
    if (t == 0.0) return Vector(static_cast<std::size_t>(m_), 0.0);
    return value_at_step(grid_multiple(t, fine_dt_, "time"));
}

}  // namespace sdde
