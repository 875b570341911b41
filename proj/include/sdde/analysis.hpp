#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sdde/model.hpp"
#include "sdde/scheme.hpp"
#include "sdde/truncation.hpp"

namespace sdde {

struct RegressionFit {
    double slope;
    double intercept;
    /// Two standard errors of the slope (0 for two points or an exact fit).
    double ci_halfwidth;
};

/// Ordinary least squares y = intercept + slope·x.
RegressionFit ols_fit(std::span<const double> x, std::span<const double> y);

/// OLS of log₂(error) on log₂(dt). Needs at least two points (three for a
/// meaningful interval); any nonpositive dt or error is a DomainError.
RegressionFit rate_regress(std::span<const std::pair<double, double>> points);

/// Parallelism knob for Monte Carlo studies. Results do not depend on it.
struct Execution {
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct StrongErrorRow {
    int n;  // steps per delay
    double dt;
    std::int64_t sample_count;
    double error;  // Monte Carlo mean of |x_ref(T) − z_dt(T)|^p
    double standard_error;
    std::vector<double> path_errors;
};

struct StrongErrorReport {
    double order_p;
    double T;
    int ref_n;
    double ref_dt;
    std::uint64_t seed;
    std::vector<StrongErrorRow> rows;
    double fitted_slope;
    double fitted_intercept;
    double slope_ci_halfwidth;
};

struct StrongErrorConfig {
    double T = 1.0;
    double p_bar = 2.0;
    std::vector<int> n_list;
    int ref_n = 1 << 16;
    std::int64_t samples = 1000;
    std::uint64_t seed = 0;
};

/// Coupled strong-error study: the reference (τ/ref_n) and every coarse
/// resolution are driven by the same lattice per path. The slope is fitted
/// only when at least two rows have dt > ref_dt and positive error.
StrongErrorReport strong_error_study(const SddeModel& model, const TruncationProfile& profile,
                                     const StrongErrorConfig& config, Execution exec = {});

struct MomentProbe {
    std::vector<double> times;
    std::vector<double> moments;  // E|z(t_i)|^q
    std::vector<double> standard_errors;
    double sup_moment;
    /// Fraction of (path, step) pairs at which the truncation was active.
    double truncation_fraction;
    std::int64_t nonfinite_samples;
};

MomentProbe moment_probe(const SddeModel& model, const TruncationProfile* profile, SchemeKind kind, double q,
                         int n, double T, std::int64_t samples, std::uint64_t seed, Execution exec = {});

struct GammaChecks {
    double delay_constraint;    // K₆e^{γτ} + γ
    double lyapunov_constraint; // K₇e^{γτ}
};

GammaChecks gamma_constraints(double gamma, double k6, double k7, double tau);

/// Largest γ > 0 with K₆e^{γτ} + γ ≤ K̄₆ and K₇e^{γτ} ≤ K̄₇, bisection to 1e-9 absolute.
double gamma_solve(double k6_bar, double k6, double k7_bar, double k7, double tau);

/// Largest Δ ∈ (0,1] with 2K̂Δ^{2(1−μ)} ≤ εΔ and K₆Δ + 2K̂Δ^{2(1−μ)} ≤ K₆e^{γτ}Δ.
double max_stable_stepsize(double gamma, double epsilon, double k6, double k_hat, double mu, double tau);

struct MeanSquareDecay {
    std::vector<double> times;
    std::vector<double> mean_square;
    std::vector<double> standard_errors;
    double fit_lo;
    double fit_hi;
    /// Slope of ln E|y(t)|² over the window; −∞ when a mean inside it is exactly 0.
    double slope;
    double intercept;
    bool extinct;
    std::int64_t sample_count;
};

MeanSquareDecay ms_decay_study(const SddeModel& model, const TruncationProfile* profile, SchemeKind kind, int n,
                               double T, std::int64_t samples, std::uint64_t seed, double fit_lo, double fit_hi,
                               Execution exec = {});

struct AsExponents {
    double T;
    /// (1/T)·ln|y(T)| per path; −∞ for an exact zero.
    std::vector<double> exponents;
    double max_exponent;

    double fraction_at_most(double threshold) const;
};

AsExponents as_exponent_study(const SddeModel& model, const TruncationProfile* profile, SchemeKind kind, int n,
                              double T, std::int64_t samples, std::uint64_t seed, Execution exec = {});

struct StabilityReport {
    double gamma_theoretical;
    double gamma_used;
    double epsilon;
    double dt_bar;
    double dt;
    MeanSquareDecay mean_square;
    AsExponents almost_sure;
    std::int64_t sample_count;
};

struct StabilityStudyConfig {
    StabilityConstants constants;
    double epsilon = 0.5;
    std::optional<double> gamma;  // defaults to the solver's γ*
    int n = 128;
    double T = 8.0;
    std::int64_t samples = 1000;
    std::int64_t as_samples = 100;
    std::uint64_t seed = 0;
    double fit_lo = 1.0;
    double fit_hi = 8.0;
};

/// γ*, Δ̄ and both decay studies for the stability scheme. Δ > Δ̄ is allowed
/// (the caller decides whether to warn).
StabilityReport stability_study(const SddeModel& model, const TruncationProfile& profile,
                                const StabilityStudyConfig& config, Execution exec = {});

/// Log-linear fit helper for mean-square data; exposed for testing with injected data.
RegressionFit fit_log_decay(std::span<const double> times, std::span<const double> values, double lo, double hi,
                            bool& extinct);

}  // namespace sdde
