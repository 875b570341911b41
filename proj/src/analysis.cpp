#include "sdde/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "sdde/brownian.hpp"
#include "sdde/errors.hpp"

namespace sdde {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

unsigned worker_count(Execution exec, std::int64_t samples) {
    unsigned t = exec.threads != 0 ? exec.threads : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::int64_t>(t, std::max<std::int64_t>(samples, 1)));
}

// Runs fn(path) for every path index. Each path writes only its own slot, so
// the caller's reduction in path order is independent of scheduling. When
// several paths throw, the exception of the lowest path index wins.
template <class Fn>
void for_each_path(std::int64_t samples, Execution exec, Fn&& fn) {
    const unsigned threads = worker_count(exec, samples);
    std::atomic<std::int64_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::int64_t error_path = std::numeric_limits<std::int64_t>::max();

    auto worker = [&] {
        for (;;) {
            const std::int64_t p = next.fetch_add(1);
            if (p >= samples) return;
            try {
                fn(p);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (p < error_path) {
                    error_path = p;
                    error = std::current_exception();
                }
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

struct MeanAndError {
    double mean;
    double standard_error;
};

MeanAndError mean_and_error(std::span<const double> values) {
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

SchemeKind scheme_for(const TruncationProfile& profile) {
    return profile.kind() == ProfileKind::Generic ? SchemeKind::GenericTEM : SchemeKind::StabilityTEM;
}

double log_norm_or_sentinel(std::span<const double> y) {
    const double r = norm(y);
    return r == 0.0 ? -kInf : std::log(r);
}

}  // namespace

RegressionFit ols_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ParameterError("regression inputs differ in length");
    if (x.size() < 2) throw ParameterError("regression needs at least two points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ParameterError("regression abscissae are all equal");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ci = 0.0;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (intercept + slope * x[i]);
            rss += r * r;
        }
        ci = 2.0 * std::sqrt(rss / (n - 2.0) / sxx);
    }
    return {slope, intercept, ci};
}

RegressionFit rate_regress(std::span<const std::pair<double, double>> points) {
    std::vector<double> x, y;
    x.reserve(points.size());
    y.reserve(points.size());
    for (const auto& [dt, err] : points) {
        if (!(dt > 0.0)) throw DomainError("step size must be positive for log-log regression");
        if (!(err > 0.0)) throw DomainError("error must be positive for log-log regression");
        x.push_back(std::log2(dt));
        y.push_back(std::log2(err));
    }
    return ols_fit(x, y);
}

StrongErrorReport strong_error_study(const SddeModel& model, const TruncationProfile& profile,
                                     const StrongErrorConfig& config, Execution exec) {
    if (config.n_list.empty()) throw ParameterError("strong error study needs at least one step size");
    if (config.samples < 2) throw ParameterError("strong error study needs at least two samples");
    if (!(config.p_bar > 0.0)) throw ParameterError("error moment p must be positive");
    if (!(config.T > 0.0)) throw ParameterError("terminal time must be positive");

    const double tau = model.delay();
    const SimulationGrid ref_grid = make_grid(tau, config.ref_n, config.T);
    std::vector<SimulationGrid> grids;
    for (int n : config.n_list) {
        if (n < 1 || config.ref_n % n != 0)
            throw GridAlignmentError("n = " + std::to_string(n) + " does not divide the reference n = " +
                                     std::to_string(config.ref_n));
        grids.push_back(make_grid(tau, n, config.T));
        grid_multiple(config.T, grids.back().dt, "terminal time");
    }
    grid_multiple(config.T, ref_grid.dt, "terminal time");

    const SchemeKind kind = scheme_for(profile);
    const auto samples = static_cast<std::size_t>(config.samples);
    std::vector<std::vector<double>> errors(grids.size(), std::vector<double>(samples, 0.0));

    for_each_path(config.samples, exec, [&](std::int64_t p) {
        const auto lattice = BrownianLattice::generate(config.seed, static_cast<std::uint64_t>(p),
                                                       model.noise_dim(), ref_grid.dt, config.T);
        PathRunner ref(model, &profile, ref_grid, kind, lattice);
        ref.run_to_end();
        const auto x_ref = ref.state();
        Vector diff(x_ref.size());
        for (std::size_t r = 0; r < grids.size(); ++r) {
            PathRunner coarse(model, &profile, grids[r], kind, lattice);
            coarse.run_to_end();
            const auto z = coarse.state();
            for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = x_ref[j] - z[j];
            errors[r][static_cast<std::size_t>(p)] = std::pow(norm(diff), config.p_bar);
        }
    });

    StrongErrorReport report{config.p_bar, config.T, config.ref_n, ref_grid.dt, config.seed, {},
                             std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN()};
    std::vector<std::pair<double, double>> points;
    for (std::size_t r = 0; r < grids.size(); ++r) {
        const auto stats = mean_and_error(errors[r]);
        report.rows.push_back({config.n_list[r], grids[r].dt, config.samples, stats.mean, stats.standard_error,
                               std::move(errors[r])});
        if (config.n_list[r] < config.ref_n && stats.mean > 0.0) points.emplace_back(grids[r].dt, stats.mean);
    }
    if (points.size() >= 2) {
        const auto fit = rate_regress(points);
        report.fitted_slope = fit.slope;
        report.fitted_intercept = fit.intercept;
        report.slope_ci_halfwidth = fit.ci_halfwidth;
    }
    return report;
}

MomentProbe moment_probe(const SddeModel& model, const TruncationProfile* profile, SchemeKind kind, double q,
                         int n, double T, std::int64_t samples, std::uint64_t seed, Execution exec) {
    if (!(q > 0.0)) throw ParameterError("moment order q must be positive");
    if (samples < 1) throw ParameterError("moment probe needs at least one sample");
    const SimulationGrid grid = make_grid(model.delay(), n, T);
    const auto points = static_cast<std::size_t>(grid.horizon_steps) + 1;
    std::vector<std::vector<double>> per_path(static_cast<std::size_t>(samples));
    std::vector<std::int64_t> truncations(static_cast<std::size_t>(samples), 0);

    for_each_path(samples, exec, [&](std::int64_t p) {
        const auto lattice = BrownianLattice::generate(seed, static_cast<std::uint64_t>(p), model.noise_dim(),
                                                       grid.dt, grid.time(grid.horizon_steps));
        PathRunner runner(model, profile, grid, kind, lattice);
        auto& row = per_path[static_cast<std::size_t>(p)];
        row.reserve(points);
        row.push_back(std::pow(norm(runner.state()), q));
        while (!runner.done()) {
            runner.step();
            row.push_back(std::pow(norm(runner.state()), q));
        }
        truncations[static_cast<std::size_t>(p)] = runner.truncation_count();
    });

    MomentProbe out{{}, {}, {}, 0.0, 0.0, 0};
    std::vector<double> column(static_cast<std::size_t>(samples));
    for (std::size_t i = 0; i < points; ++i) {
        for (std::size_t p = 0; p < column.size(); ++p) {
            column[p] = per_path[p][i];
            if (!std::isfinite(column[p])) ++out.nonfinite_samples;
        }
        const auto stats = mean_and_error(column);
        out.times.push_back(grid.time(static_cast<std::int64_t>(i)));
        out.moments.push_back(stats.mean);
        out.standard_errors.push_back(stats.standard_error);
        out.sup_moment = std::max(out.sup_moment, stats.mean);
        if (std::isnan(stats.mean)) out.sup_moment = stats.mean;
    }
    std::int64_t total = 0;
    for (auto c : truncations) total += c;
    out.truncation_fraction =
        static_cast<double>(total) / (static_cast<double>(samples) * static_cast<double>(grid.horizon_steps));
    return out;
}

GammaChecks gamma_constraints(double gamma, double k6, double k7, double tau) {
    const double e = std::exp(gamma * tau);
    return {k6 * e + gamma, k7 * e};
}

double gamma_solve(double k6_bar, double k6, double k7_bar, double k7, double tau) {
    if (!(k6 > 0.0 && k6_bar > k6)) throw ParameterError("need K6bar > K6 > 0");
    if (!(k7 >= 0.0 && k7_bar > k7)) throw ParameterError("need K7bar > K7 >= 0");
    if (!(tau > 0.0)) throw ParameterError("delay must be positive");

    // Largest γ with g(γ) ≤ 0 for an increasing g with g(0) < 0.
    auto largest_feasible = [](auto&& g) {
        double lo = 0.0, hi = 1.0;
        while (g(hi) <= 0.0) {
            lo = hi;
            hi *= 2.0;
        }
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) <= 0.0 ? lo : hi) = mid;
        }
        return lo;
    };
    const double delay_root = largest_feasible([&](double g) { return k6 * std::exp(g * tau) + g - k6_bar; });
    if (k7 == 0.0) return delay_root;
    const double lyapunov_root = largest_feasible([&](double g) { return k7 * std::exp(g * tau) - k7_bar; });
    return std::min(delay_root, lyapunov_root);
}

double max_stable_stepsize(double gamma, double epsilon, double k6, double k_hat, double mu, double tau) {
    if (!(epsilon > 0.0 && epsilon < gamma))
        throw ParameterError("epsilon must lie in (0, gamma); got epsilon = " + std::to_string(epsilon) +
                             ", gamma = " + std::to_string(gamma));
    if (!(mu > 0.0 && mu < 0.5)) throw ParameterError("mu must lie in (0, 1/2)");
    if (!(k_hat > 0.0)) throw ParameterError("K_hat must be positive");
    if (!(k6 > 0.0)) throw ParameterError("K6 must be positive");
    if (!(tau > 0.0)) throw ParameterError("delay must be positive");
    // 2K̂Δ^{2(1−μ)} ≤ cΔ  ⇔  Δ ≤ (c / 2K̂)^{1/(1−2μ)}
    const double power = 1.0 / (1.0 - 2.0 * mu);
    const double from_epsilon = std::pow(epsilon / (2.0 * k_hat), power);
    const double from_delay = std::pow(k6 * (std::exp(gamma * tau) - 1.0) / (2.0 * k_hat), power);
    return std::min({1.0, from_epsilon, from_delay});
}

RegressionFit fit_log_decay(std::span<const double> times, std::span<const double> values, double lo, double hi,
                            bool& extinct) {
    if (times.size() != values.size()) throw ParameterError("times and values differ in length");
    if (!(hi > lo)) throw ParameterError("fit window must satisfy t_lo < t_hi");
    extinct = false;
    std::vector<double> x, y;
    const double slack = 1e-9 * std::max(1.0, std::abs(hi));
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < lo - slack || times[i] > hi + slack) continue;
        if (values[i] == 0.0) {
            extinct = true;
            return {-kInf, -kInf, 0.0};
        }
        if (!(values[i] > 0.0)) throw DomainError("mean square must be nonnegative and finite inside the window");
        x.push_back(times[i]);
        y.push_back(std::log(values[i]));
    }
    if (x.size() < 2) throw ParameterError("fit window contains fewer than two grid times");
    return ols_fit(x, y);
}

MeanSquareDecay ms_decay_study(const SddeModel& model, const TruncationProfile* profile, SchemeKind kind, int n,
                               double T, std::int64_t samples, std::uint64_t seed, double fit_lo, double fit_hi,
                               Execution exec) {
    if (fit_lo < model.delay() * (1.0 - 1e-12))
        throw ParameterError("fit window must start at or after the delay to skip the initial transient");
    if (fit_hi > T * (1.0 + 1e-12)) throw ParameterError("fit window extends past the horizon");
    const auto probe = moment_probe(model, profile, kind, 2.0, n, T, samples, seed, exec);
    MeanSquareDecay out{probe.times, probe.moments, probe.standard_errors, fit_lo, fit_hi, 0.0, 0.0, false, samples};
    const auto fit = fit_log_decay(out.times, out.mean_square, fit_lo, fit_hi, out.extinct);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    return out;
}

double AsExponents::fraction_at_most(double threshold) const {
    if (exponents.empty()) return 0.0;
    const auto hits = std::count_if(exponents.begin(), exponents.end(), [&](double e) { return e <= threshold; });
    return static_cast<double>(hits) / static_cast<double>(exponents.size());
}

AsExponents as_exponent_study(const SddeModel& model, const TruncationProfile* profile, SchemeKind kind, int n,
                              double T, std::int64_t samples, std::uint64_t seed, Execution exec) {
    if (samples < 1) throw ParameterError("exponent study needs at least one sample");
    const SimulationGrid grid = make_grid(model.delay(), n, T);
    const double t_end = grid.time(grid.horizon_steps);
    AsExponents out{t_end, std::vector<double>(static_cast<std::size_t>(samples)), -kInf};

    for_each_path(samples, exec, [&](std::int64_t p) {
        const auto lattice =
            BrownianLattice::generate(seed, static_cast<std::uint64_t>(p), model.noise_dim(), grid.dt, t_end);
        PathRunner runner(model, profile, grid, kind, lattice);
        runner.run_to_end();
        out.exponents[static_cast<std::size_t>(p)] = log_norm_or_sentinel(runner.state()) / t_end;
    });
    for (double e : out.exponents) out.max_exponent = std::max(out.max_exponent, e);
    return out;
}

StabilityReport stability_study(const SddeModel& model, const TruncationProfile& profile,
                                const StabilityStudyConfig& config, Execution exec) {
    if (profile.kind() != ProfileKind::Stability) throw ParameterError("stability study needs a stability profile");
    const auto& c = config.constants;
    const double tau = model.delay();
    const double gamma_star = gamma_solve(c.k6_bar, c.k6, c.k7_bar, c.k7, tau);
    const double gamma = config.gamma.value_or(gamma_star);
    const double dt_bar = max_stable_stepsize(gamma, config.epsilon, c.k6, profile.k_const(), profile.mu(), tau);
    const SimulationGrid grid = make_grid(tau, config.n, config.T);

    auto ms = ms_decay_study(model, &profile, SchemeKind::StabilityTEM, config.n, config.T, config.samples,
                             config.seed, config.fit_lo, config.fit_hi, exec);
    auto as = as_exponent_study(model, &profile, SchemeKind::StabilityTEM, config.n, config.T, config.as_samples,
                                config.seed, exec);
    return {gamma_star, gamma, config.epsilon, dt_bar, grid.dt, std::move(ms), std::move(as), config.samples};
}

}  // namespace sdde
