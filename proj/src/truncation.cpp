#include "sdde/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdde/errors.hpp"

namespace sdde {

namespace {

constexpr double kBisectionLo = 1.0;
constexpr double kBisectionHi = 1e12;
constexpr int kBisectionIterations = 200;
// |x| within this relative distance above the bound counts as inside.
constexpr double kInsideTolerance = 1e-15;

std::string fmt_value(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

TruncationProfile::TruncationProfile(ScalarFn phi, ScalarFn phi_inv, double mu, double xi_sup,
                                     ProfileKind kind)
    : phi_(std::move(phi)), phi_inv_(std::move(phi_inv)), mu_(mu), k_const_(0.0), kind_(kind) {
    if (!phi_) throw ParameterError("truncation profile requires a growth function");
    if (!(mu > 0.0)) throw ParameterError("mu must be positive, got " + fmt_value(mu));
    if (kind == ProfileKind::Generic && mu > 0.5)
        throw ParameterError("mu must satisfy mu <= 1/2, got " + fmt_value(mu));
    if (kind == ProfileKind::Stability && !(mu < 0.5))
        throw ParameterError("stability profile requires mu < 1/2 strictly, got " + fmt_value(mu));
    if (!(xi_sup >= 0.0)) throw ParameterError("initial sup norm must be nonnegative");
    k_const_ = phi_(std::max(xi_sup, 1.0));
    if (!(k_const_ > 0.0) || !std::isfinite(k_const_))
        throw ParameterError("K = phi(max(|xi|,1)) must be positive and finite, got " + fmt_value(k_const_));
}

double TruncationProfile::phi_inv(double v) const {
    const double floor = phi_(1.0);
    // Small relative slack so that phi_inv(phi(1)) survives rounding in phi.
    if (!(v >= floor * (1.0 - 1e-14)))
        throw ProfileError("value " + fmt_value(v) + " lies below phi(1) = " + fmt_value(floor));
    if (phi_inv_) return phi_inv_(std::max(v, floor));
    return invert_by_bisection(phi_, v);
}

double invert_by_bisection(const ScalarFn& phi, double value) {
    double lo = kBisectionLo;
    double hi = kBisectionHi;
    if (phi(lo) > value) throw ProfileError("value " + fmt_value(value) + " lies below phi(1)");
    if (phi(hi) < value) throw ProfileError("value " + fmt_value(value) + " exceeds phi(1e12)");
    for (int it = 0; it < kBisectionIterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (phi(mid) < value)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double step_budget(const TruncationProfile& profile, double dt) {
    if (!(dt > 0.0 && dt <= 1.0)) throw DomainError("step size must lie in (0, 1], got " + fmt_value(dt));
    return profile.k_const() * std::pow(dt, -profile.mu());
}

double truncation_bound(const TruncationProfile& profile, double dt) {
    return profile.phi_inv(step_budget(profile, dt));
}

bool truncate_in_place(std::span<double> x, double bound) {
    if (!(bound > 0.0)) throw ParameterError("truncation bound must be positive");
    const double n = norm(x);
    if (!std::isfinite(n)) throw DomainError("non-finite state passed to truncation");
    if (n == 0.0 || n <= bound * (1.0 + kInsideTolerance)) return false;
    const double scale = bound / n;
    for (double& v : x) v *= scale;
    return true;
}

Vector truncate(std::span<const double> x, double bound) {
    Vector out(x.begin(), x.end());
    truncate_in_place(out, bound);
    return out;
}

TruncationProfile polynomial_profile(const PolynomialGrowth& p) {
    if (!(p.alpha > 0.0)) throw ParameterError("alpha must be positive");
    if (!(p.k4 > 0.0)) throw ParameterError("k4 must be positive");
    if (!(p.f00_norm >= 0.0) || !(p.g00_norm >= 0.0))
        throw ParameterError("|f(0,0)| and |g(0,0)| must be nonnegative");
    if (!(p.q > 0.0)) throw ParameterError("q must be positive");
    const double r_max = std::min(p.q / (p.alpha + 3.0), p.q / (2.0 * p.alpha));
    if (!(p.r >= 2.0) || p.r > r_max)
        throw ParameterError("r must satisfy 2 <= r <= q/(alpha+3) ^ q/(2 alpha) = " + fmt_value(r_max) +
                             ", got " + fmt_value(p.r));
    const double mu = p.r * (p.alpha + 2.0) / (2.0 * (p.q - p.r));
    if (!(mu > 0.0 && mu <= 0.5))
        throw ParameterError("mu = r(alpha+2)/(2(q-r)) = " + fmt_value(mu) + " is outside (0, 1/2]");

    const double offset = std::max(p.f00_norm, 2.0 * p.g00_norm * p.g00_norm);
    const double coeff = 6.0 * p.k4;
    const double power = p.alpha + 2.0;
    auto phi = [=](double l) { return offset + coeff * std::pow(l, power); };
    auto phi_inv = [=](double v) { return std::pow((v - offset) / coeff, 1.0 / power); };
    return TruncationProfile(phi, phi_inv, mu, p.xi_sup, ProfileKind::Generic);
}

TruncationProfile stability_profile(ScalarFn phi_hat, double mu, double xi_sup, ScalarFn phi_hat_inv) {
    if (!(mu > 0.0 && mu < 0.5))
        throw ParameterError("stability profile requires mu in (0, 1/2) strictly, got " + fmt_value(mu));
    return TruncationProfile(std::move(phi_hat), std::move(phi_hat_inv), mu, xi_sup, ProfileKind::Stability);
}

ScalarFn quadratic_phi_hat() {
    return [](double l) { return 2.0 * (1.0 + l * l); };
}

ScalarFn quadratic_phi_hat_inverse() {
    return [](double v) { return std::sqrt(v / 2.0 - 1.0); };
}

}  // namespace sdde
