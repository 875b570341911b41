#pragma once

#include <functional>
#include <span>

#include "sdde/linalg.hpp"

namespace sdde {

enum class ProfileKind { Generic, Stability };

using ScalarFn = std::function<double(double)>;

// Growth-bound function Φ on [1, ∞) together with its inverse, the exponent μ
// and the constant K = Φ(max(‖ξ‖, 1)). The truncation radius for a step Δ is
// Φ⁻¹(K Δ^{-μ}); it grows without bound as Δ → 0.
class TruncationProfile {
public:
    // phi_inv may be empty, in which case Φ is inverted by bisection.
    TruncationProfile(ScalarFn phi, ScalarFn phi_inv, double mu, double xi_sup, ProfileKind kind);

    double phi(double l) const { return phi_(l); }
    double phi_inv(double v) const;
    double mu() const noexcept { return mu_; }
    double k_const() const noexcept { return k_const_; }
    ProfileKind kind() const noexcept { return kind_; }
    bool has_closed_form_inverse() const noexcept { return static_cast<bool>(phi_inv_); }

private:
    ScalarFn phi_;
    ScalarFn phi_inv_;
    double mu_;
    double k_const_;
    ProfileKind kind_;
};

/// h(Δ) = K Δ^{-μ}. Throws DomainError unless 0 < dt ≤ 1.
double step_budget(const TruncationProfile& profile, double dt);

/// Φ⁻¹(h(Δ)), the radius of the ball the truncation projects onto.
double truncation_bound(const TruncationProfile& profile, double dt);

/// Radial clamp onto the closed ball of radius bound. Zero maps to zero.
/// Returns true when the input was rescaled.
bool truncate_in_place(std::span<double> x, double bound);
Vector truncate(std::span<const double> x, double bound);

/// Inverse of a strictly increasing phi at value, by bisection on [1, 1e12]
/// with a fixed 200 iterations.
double invert_by_bisection(const ScalarFn& phi, double value);

struct PolynomialGrowth {
    double alpha;     // polynomial growth exponent of the local Lipschitz constant
    double k4;        // local Lipschitz coefficient
    double f00_norm;  // |f(0,0)|
    double g00_norm;  // |g(0,0)| (Hilbert-Schmidt)
    double q;         // moment order
    double r;         // convergence moment, 2 ≤ r ≤ q/(α+3) ∧ q/(2α)
    double xi_sup;    // ‖ξ‖
};

/// Φ(l) = (|f(0,0)| ∨ 2|g(0,0)|²) + 6 K₄ l^{α+2}, μ = r(α+2) / (2(q−r)).
TruncationProfile polynomial_profile(const PolynomialGrowth& p);

/// Stability-scheme profile with K̂ = Φ̂(max(‖ξ‖,1)); μ must lie strictly inside (0, 1/2).
TruncationProfile stability_profile(ScalarFn phi_hat, double mu, double xi_sup, ScalarFn phi_hat_inv = {});

/// Φ̂(l) = 2(1 + l²), used for the two-dimensional stability example.
ScalarFn quadratic_phi_hat();
ScalarFn quadratic_phi_hat_inverse();

}  // namespace sdde
