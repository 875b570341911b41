#include "sdde/model.hpp"

#include <cmath>

#include "sdde/errors.hpp"

namespace sdde {

SddeModel::SddeModel(int state_dim, int noise_dim, double delay, DriftFn drift, DiffusionFn diffusion,
                     SegmentFn initial_segment, double initial_sup_norm)
    : d_(state_dim),
      m_(noise_dim),
      delay_(delay),
      drift_(std::move(drift)),
      diffusion_(std::move(diffusion)),
      segment_(std::move(initial_segment)),
      xi_sup_(initial_sup_norm) {
    if (d_ < 1) throw ParameterError("state dimension must be at least 1");
    if (m_ < 1) throw ParameterError("noise dimension must be at least 1");
    if (!(delay_ > 0.0) || !std::isfinite(delay_)) throw ParameterError("delay must be positive and finite");
    if (!drift_ || !diffusion_ || !segment_) throw ParameterError("model callables must be set");
    if (!(xi_sup_ >= 0.0)) throw ParameterError("initial sup norm must be nonnegative");
}

Vector SddeModel::drift(std::span<const double> x, std::span<const double> y) const {
    Vector out(static_cast<std::size_t>(d_), 0.0);
    drift_(x, y, out);
    return out;
}

Vector SddeModel::diffusion(std::span<const double> x, std::span<const double> y) const {
    Vector out(static_cast<std::size_t>(d_) * static_cast<std::size_t>(m_), 0.0);
    diffusion_(x, y, out);
    return out;
}

Vector SddeModel::initial_segment(double theta) const {
    Vector out(static_cast<std::size_t>(d_), 0.0);
    segment_(theta, out);
    return out;
}

ModelCatalogEntry builtin_example_1() {
    SddeModel model(
        1, 1, 1.0,
        [](std::span<const double> x, std::span<const double>, std::span<double> out) {
            out[0] = x[0] - 8.0 * x[0] * x[0] * x[0];
        },
        [](std::span<const double>, std::span<const double> y, std::span<double> out) {
            const double a = std::abs(y[0]);
            out[0] = a * std::sqrt(a);
        },
        [](double theta, std::span<double> out) { out[0] = theta * theta; }, 1.0);

    // α = 2, K₄ = 12, q = 15, r = 3 gives Φ(l) = 72 l⁴ and μ = 1/2.
    auto profile = polynomial_profile({.alpha = 2.0, .k4 = 12.0, .f00_norm = 0.0, .g00_norm = 0.0,
                                       .q = 15.0, .r = 3.0, .xi_sup = 1.0});
    return {"example1", std::move(model), std::move(profile),
            "scalar cubic drift, delayed |y|^{3/2} noise; not one-sided Lipschitz. "
            "Polynomial growth with alpha=2, K4=12, q=15, r=3: h(dt)=72 dt^{-1/2}, "
            "Phi^{-1}(l)=(l/72)^{1/4}. Expected L^3 error rate dt^{3/2}.",
            std::nullopt};
}

ModelCatalogEntry builtin_example_2() {
    const double xi_sup = std::exp(1.3);
    SddeModel model(
        2, 2, 1.0,
        [](std::span<const double> x, std::span<const double>, std::span<double> out) {
            out[0] = -1.5 * x[0] - x[0] * x[0] * x[0];
            out[1] = -x[1] - x[1] * x[1] * x[1];
        },
        [](std::span<const double>, std::span<const double> y, std::span<double> out) {
            out[0] = y[1] * y[1];
            out[1] = 0.0;
            out[2] = 0.0;
            out[3] = y[0] * y[0];
        },
        [](double theta, std::span<double> out) {
            out[0] = std::exp(-1.3 * theta);
            out[1] = 0.0;
        },
        xi_sup);

    auto profile = stability_profile(quadratic_phi_hat(), 0.01, xi_sup, quadratic_phi_hat_inverse());
    return {"example2", std::move(model), std::move(profile),
            "two-dimensional, f(0,0)=0, g(0,0)=0; Khasminskii-type condition with V(x)=x1^4+x2^4, "
            "K6bar=2, K6=0.6, K7bar=2, K7=1. Phi_hat(l)=2(1+l^2), mu=1/100; gamma=0.69, "
            "epsilon=0.5 and dt_bar=2^-7 give decay rate 0.19 in mean square.",
            StabilityConstants{.k6_bar = 2.0, .k6 = 0.6, .k7_bar = 2.0, .k7 = 1.0}};
}

SddeModel oracle_linear_delay_model(double rate) {
    if (!(rate > 0.0)) throw ParameterError("decay rate must be positive");
    return SddeModel(
        1, 1, 1.0,
        [rate](std::span<const double> x, std::span<const double>, std::span<double> out) {
            out[0] = -rate * x[0];
        },
        [](std::span<const double>, std::span<const double>, std::span<double> out) { out[0] = 0.0; },
        [](double, std::span<double> out) { out[0] = 1.0; }, 1.0);
}

double linear_decay_exact(double rate, double t) { return std::exp(-rate * t); }

ModelCatalogEntry linear_decay_entry(double rate) {
    auto model = oracle_linear_delay_model(rate);
    TruncationProfile profile([rate](double l) { return rate * l; }, [rate](double v) { return v / rate; }, 0.5,
                              model.initial_sup_norm(), ProfileKind::Generic);
    return {"linear-decay", std::move(model), std::move(profile),
            "deterministic f=-rate x, g=0, xi=1; exact solution exp(-rate t).", std::nullopt};
}

SddeModel oracle_pure_diffusion_model() {
    return SddeModel(
        1, 1, 1.0, [](std::span<const double>, std::span<const double>, std::span<double> out) { out[0] = 0.0; },
        [](std::span<const double>, std::span<const double>, std::span<double> out) { out[0] = 1.0; },
        [](double, std::span<double> out) { out[0] = 0.0; }, 0.0);
}

std::vector<std::string> catalog_names() { return {"example1", "example2", "linear-decay"}; }

ModelCatalogEntry find_catalog_entry(const std::string& name) {
    if (name == "example1") return builtin_example_1();
    if (name == "example2") return builtin_example_2();
    if (name == "linear-decay") return linear_decay_entry();
    throw ParameterError("unknown model '" + name + "' (expected example1, example2 or linear-decay)");
}

}  // namespace sdde
