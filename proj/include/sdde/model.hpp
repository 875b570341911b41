#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdde/linalg.hpp"
#include "sdde/truncation.hpp"

namespace sdde {

// f(x, y) written into out (length d).
using DriftFn = std::function<void(std::span<const double> x, std::span<const double> y, std::span<double> out)>;
// g(x, y) written row-major into out (length d*m).
using DiffusionFn = DriftFn;
// ξ(θ) for θ ∈ [−τ, 0], written into out (length d).
using SegmentFn = std::function<void(double theta, std::span<double> out)>;

// dx(t) = f(x(t), x(t−τ)) dt + g(x(t), x(t−τ)) dW(t),  x = ξ on [−τ, 0].
//
// Coefficient callables must be pure; a model is immutable once built and can be
// shared by any number of concurrent path simulations.
class SddeModel {
public:
    SddeModel(int state_dim, int noise_dim, double delay, DriftFn drift, DiffusionFn diffusion,
              SegmentFn initial_segment, double initial_sup_norm);

    int state_dim() const noexcept { return d_; }
    int noise_dim() const noexcept { return m_; }
    double delay() const noexcept { return delay_; }
    double initial_sup_norm() const noexcept { return xi_sup_; }

    void drift_into(std::span<const double> x, std::span<const double> y, std::span<double> out) const {
        drift_(x, y, out);
    }
    void diffusion_into(std::span<const double> x, std::span<const double> y, std::span<double> out) const {
        diffusion_(x, y, out);
    }
    void initial_segment_into(double theta, std::span<double> out) const { segment_(theta, out); }

    Vector drift(std::span<const double> x, std::span<const double> y) const;
    /// Row-major d×m.
    Vector diffusion(std::span<const double> x, std::span<const double> y) const;
    Vector initial_segment(double theta) const;

private:
    int d_;
    int m_;
    double delay_;
    DriftFn drift_;
    DiffusionFn diffusion_;
    SegmentFn segment_;
    double xi_sup_;
};

/// Hilbert-Schmidt norm of a matrix stored as a flat array.
inline double hs_norm(std::span<const double> g) { return norm(g); }

// Constants of the one-sided Khasminskii-type condition
// 2<x,f> + |g|² ≤ −K̄₆|x|² + K₆|y|² − K̄₇V(x) + K₇V(y).
struct StabilityConstants {
    double k6_bar;
    double k6;
    double k7_bar;
    double k7;
};

struct ModelCatalogEntry {
    std::string name;
    SddeModel model;
    TruncationProfile recommended_profile;
    std::string notes;
    std::optional<StabilityConstants> stability;
};

/// x' = (x − 8x³)dt + |x(t−1)|^{3/2} dW, ξ(θ) = θ², τ = 1.
ModelCatalogEntry builtin_example_1();

/// Two-dimensional cubic-damped system with cross-delayed quadratic noise, ξ(θ) = (e^{−1.3θ}, 0).
ModelCatalogEntry builtin_example_2();

/// f = −rate·x, g = 0, ξ ≡ 1, τ = 1. Exact solution e^{−rate·t}.
SddeModel oracle_linear_delay_model(double rate);
double linear_decay_exact(double rate, double t);
ModelCatalogEntry linear_decay_entry(double rate = 1.0);

/// d = m = 1, f ≡ 0, g ≡ 1, ξ ≡ 0; x(t) = W(t).
SddeModel oracle_pure_diffusion_model();

/// Catalog names: example1, example2, linear-decay.
std::vector<std::string> catalog_names();
/// Throws ParameterError for an unknown name.
ModelCatalogEntry find_catalog_entry(const std::string& name);

}  // namespace sdde
