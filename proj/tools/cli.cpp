#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sdde/analysis.hpp"
#include "sdde/errors.hpp"
#include "sdde/model.hpp"
#include "sdde/scheme.hpp"
#include "sdde/truncation.hpp"

namespace sdde::cli {

namespace {

namespace fs = std::filesystem;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
    return os.str();
}

struct Resolved {
    ModelCatalogEntry entry;
    TruncationProfile profile;
    SchemeKind kind;
};

// "polynomial:alpha=2,k4=12,q=15,r=3" | "stability:mu=0.01" | "default"
TruncationProfile parse_profile(const std::string& spec, const ModelCatalogEntry& entry) {
    if (spec.empty() || spec == "default") return entry.recommended_profile;
    const auto colon = spec.find(':');
    const std::string family = spec.substr(0, colon);
    std::map<std::string, double> params;
    if (colon != std::string::npos) {
        std::stringstream ss(spec.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ParameterError("profile parameter '" + item + "' is not key=value");
            const std::string key = item.substr(0, eq);
            try {
                params[key] = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw ParameterError("profile parameter '" + key + "' is not a number");
            }
        }
    }
    auto take = [&](const std::string& key, std::optional<double> fallback = std::nullopt) {
        const auto it = params.find(key);
        if (it == params.end()) {
            if (fallback) return *fallback;
            throw ParameterError("profile '" + family + "' needs parameter '" + key + "'");
        }
        const double v = it->second;
        params.erase(it);
        return v;
    };

    const auto& model = entry.model;
    const Vector zero(static_cast<std::size_t>(model.state_dim()), 0.0);
    std::optional<TruncationProfile> profile;
    if (family == "polynomial") {
        PolynomialGrowth g{};
        g.alpha = take("alpha");
        g.k4 = take("k4");
        g.q = take("q");
        g.r = take("r");
        g.f00_norm = take("f00", norm(model.drift(zero, zero)));
        g.g00_norm = take("g00", hs_norm(model.diffusion(zero, zero)));
        g.xi_sup = model.initial_sup_norm();
        profile = polynomial_profile(g);
    } else if (family == "stability") {
        profile = stability_profile(quadratic_phi_hat(), take("mu"), model.initial_sup_norm(),
                                    quadratic_phi_hat_inverse());
    } else {
        throw ParameterError("unknown profile family '" + family + "' (expected polynomial or stability)");
    }
    if (!params.empty()) throw ParameterError("unknown profile parameter '" + params.begin()->first + "'");
    return *profile;
}

SchemeKind parse_scheme(const std::string& name, const TruncationProfile& profile) {
    if (name.empty()) return profile.kind() == ProfileKind::Generic ? SchemeKind::GenericTEM : SchemeKind::StabilityTEM;
    SchemeKind kind;
    if (name == "tem")
        kind = SchemeKind::GenericTEM;
    else if (name == "stab-tem")
        kind = SchemeKind::StabilityTEM;
    else if (name == "em")
        kind = SchemeKind::ClassicEM;
    else
        throw ParameterError("unknown scheme '" + name + "' (expected tem, stab-tem or em)");
    if (kind == SchemeKind::GenericTEM && profile.kind() != ProfileKind::Generic)
        throw ParameterError("scheme 'tem' needs a polynomial (generic) profile");
    if (kind == SchemeKind::StabilityTEM && profile.kind() != ProfileKind::Stability)
        throw ParameterError("scheme 'stab-tem' needs a stability profile");
    return kind;
}

const char* profile_kind_name(ProfileKind k) { return k == ProfileKind::Generic ? "generic" : "stability"; }

Resolved resolve(ExperimentConfig& cfg) {
    auto entry = find_catalog_entry(cfg.model_name);
    auto profile = parse_profile(cfg.profile_spec, entry);
    const auto kind = parse_scheme(cfg.scheme, profile);
    if (cfg.profile_spec.empty()) cfg.profile_spec = "default";
    cfg.scheme = to_string(kind);
    return {std::move(entry), std::move(profile), kind};
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ParameterError(what);
}

fs::path prepare_out_dir(const ExperimentConfig& cfg) {
    const fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + cfg.out_dir + "'");
    return dir;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    os.precision(17);
    return os;
}

void finish(std::ofstream& os, const fs::path& path) {
    os.flush();
    if (!os) throw IoError("write to '" + path.string() + "' failed");
}

std::string command_line(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "sdde " << cfg.command << " --model " << cfg.model_name << " --profile " << cfg.profile_spec
       << " --seed " << cfg.seed << " --T " << cfg.T;
    if (cfg.command == "simulate") {
        os << " --scheme " << cfg.scheme << " --n " << cfg.n_list.front() << " --paths " << cfg.paths;
        if (!cfg.out_file.empty()) os << " --out " << cfg.out_file;
    } else if (cfg.command == "converge") {
        os << " --p " << cfg.p_bar << " --n-list " << join(cfg.n_list) << " --ref-n " << cfg.ref_n << " --samples "
           << cfg.samples;
    } else if (cfg.command == "stability") {
        os << " --n " << cfg.n_list.front() << " --samples " << cfg.samples << " --as-samples " << cfg.as_samples
           << " --epsilon " << cfg.epsilon << " --fit-window " << join(cfg.fit_window) << " --k6bar " << *cfg.k6_bar
           << " --k6 " << *cfg.k6 << " --k7bar " << *cfg.k7_bar << " --k7 " << *cfg.k7;
        if (cfg.gamma) os << " --gamma " << *cfg.gamma;
    }
    os << " --out-dir " << cfg.out_dir;
    return os.str();
}

void write_profile(std::ostream& os, const TruncationProfile& profile, double dt) {
    os << "profile_kind = " << profile_kind_name(profile.kind()) << "\n"
       << "profile_mu = " << num(profile.mu()) << "\n"
       << "profile_K = " << num(profile.k_const()) << "\n"
       << "truncation_bound(dt=" << num(dt) << ") = " << num(truncation_bound(profile, dt)) << "\n";
}

int run_simulate(ExperimentConfig& cfg, std::ostream& out) {
    if (cfg.T == 0.0) cfg.T = 1.0;
    if (cfg.n_list.empty()) cfg.n_list = {128};
    auto r = resolve(cfg);
    require(cfg.T > 0.0, "--T must be positive");
    require(cfg.paths >= 1, "--paths must be at least 1");
    const auto grid = make_grid(r.entry.model.delay(), cfg.n_list.front(), cfg.T);
    if (r.kind != SchemeKind::ClassicEM) truncation_bound(r.profile, grid.dt);

    const auto dir = prepare_out_dir(cfg);
    const fs::path first = cfg.out_file.empty() ? dir / "path.csv" : fs::path(cfg.out_file);
    auto path_file = [&](std::int64_t p) {
        if (cfg.paths == 1) return first;
        fs::path f = first;
        f.replace_filename(first.stem().string() + "_" + std::to_string(p) + first.extension().string());
        return f;
    };

    const fs::path report_path = dir / "report.txt";
    auto report = open_out(report_path);
    report << "# sdde simulate\ncommand_line = " << command_line(cfg) << "\nseed = " << cfg.seed << "\n"
           << "model = " << r.entry.name << "\nscheme = " << cfg.scheme << "\ndt = " << num(grid.dt)
           << "\nhorizon_steps = " << grid.horizon_steps << "\n";
    if (r.kind != SchemeKind::ClassicEM) write_profile(report, r.profile, grid.dt);

    const int d = r.entry.model.state_dim();
    for (std::int64_t p = 0; p < cfg.paths; ++p) {
        const auto lattice = BrownianLattice::generate(cfg.seed, static_cast<std::uint64_t>(p),
                                                       r.entry.model.noise_dim(), grid.dt, grid.time(grid.horizon_steps));
        const auto traj = simulate(r.entry.model, r.kind == SchemeKind::ClassicEM ? nullptr : &r.profile, grid,
                                   r.kind, lattice);
        const auto file = path_file(p);
        auto csv = open_out(file);
        csv << "t";
        for (int j = 1; j <= d; ++j) csv << ",x_" << j;
        csv << ",pre_norm,post_norm,truncated\n";
        for (std::int64_t i = 0; i <= grid.horizon_steps; ++i) {
            const auto s = traj.state(i);
            csv << grid.time(i);
            for (double v : s) csv << "," << v;
            csv << "," << traj.pre_norms[static_cast<std::size_t>(i)] << "," << norm(s) << ","
                << static_cast<int>(traj.truncated[static_cast<std::size_t>(i)]) << "\n";
        }
        finish(csv, file);
        report << "path " << p << ": file = " << file.string() << ", first_nonfinite_step = "
               << (traj.first_nonfinite_step ? std::to_string(*traj.first_nonfinite_step) : std::string("none"))
               << "\n";
        out << "path " << p << " -> " << file.string()
            << (traj.first_nonfinite_step ? " (non-finite from step " + std::to_string(*traj.first_nonfinite_step) + ")"
                                          : std::string())
            << "\n";
    }
    finish(report, report_path);
    return kOk;
}

int run_converge(ExperimentConfig& cfg, std::ostream& out) {
    if (cfg.T == 0.0) cfg.T = 1.0;
    if (cfg.samples == 0) cfg.samples = 1000;
    if (cfg.n_list.empty()) cfg.n_list = {64, 256, 1024, 4096, 16384};
    if (cfg.p_bar == 0.0) cfg.p_bar = cfg.model_name == "example1" ? 3.0 : 2.0;
    auto r = resolve(cfg);
    require(r.kind != SchemeKind::ClassicEM, "converge runs a truncated scheme; --scheme em is not supported");
    require(cfg.samples >= 2, "--samples must be at least 2");
    require(cfg.T > 0.0, "--T must be positive");
    require(cfg.p_bar > 0.0, "--p must be positive");
    const double tau = r.entry.model.delay();
    const auto ref_grid = make_grid(tau, cfg.ref_n, cfg.T);
    grid_multiple(cfg.T, ref_grid.dt, "--T");
    for (int n : cfg.n_list) {
        require(n >= 1 && cfg.ref_n % n == 0,
                "n = " + std::to_string(n) + " in --n-list does not divide --ref-n " + std::to_string(cfg.ref_n));
        grid_multiple(cfg.T, make_grid(tau, n, cfg.T).dt, "--T");
    }
    const auto dir = prepare_out_dir(cfg);

    StrongErrorConfig sc{cfg.T, cfg.p_bar, cfg.n_list, cfg.ref_n, cfg.samples, cfg.seed};
    const auto rep = strong_error_study(r.entry.model, r.profile, sc, Execution{cfg.threads});

    const fs::path csv_path = dir / "converge.csv";
    auto csv = open_out(csv_path);
    csv << "dt,samples,error,stderr\n";
    for (const auto& row : rep.rows) {
        csv << row.dt << "," << row.sample_count << "," << row.error << "," << row.standard_error << "\n";
        out << "dt = " << num(row.dt) << "  error = " << num(row.error) << "  stderr = " << num(row.standard_error)
            << "\n";
    }
    finish(csv, csv_path);

    const fs::path report_path = dir / "report.txt";
    auto report = open_out(report_path);
    report << "# sdde converge\ncommand_line = " << command_line(cfg) << "\nseed = " << cfg.seed
           << "\nmodel = " << r.entry.name << "\nscheme = " << cfg.scheme << "\np = " << num(cfg.p_bar)
           << "\nT = " << num(cfg.T) << "\nref_n = " << cfg.ref_n << "\nref_dt = " << num(rep.ref_dt)
           << "\nsamples = " << cfg.samples << "\n";
    write_profile(report, r.profile, rep.ref_dt);
    for (const auto& row : rep.rows)
        report << "row n = " << row.n << ", dt = " << num(row.dt) << ", error = " << num(row.error)
               << ", stderr = " << num(row.standard_error) << "\n";
    report << "fitted_slope = " << num(rep.fitted_slope) << "\nslope_ci_halfwidth = " << num(rep.slope_ci_halfwidth)
           << "\nfitted_intercept = " << num(rep.fitted_intercept) << "\n";
    finish(report, report_path);
    out << "fitted slope = " << num(rep.fitted_slope) << " +/- " << num(rep.slope_ci_halfwidth) << "\n";
    return kOk;
}

int run_stability(ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.model_name.empty()) cfg.model_name = "example2";
    if (cfg.T == 0.0) cfg.T = 8.0;
    if (cfg.samples == 0) cfg.samples = 1000;
    if (cfg.as_samples == 0) cfg.as_samples = 100;
    if (cfg.n_list.empty()) cfg.n_list = {128};
    auto r = resolve(cfg);
    require(r.kind == SchemeKind::StabilityTEM, "stability runs the stability scheme and needs a stability profile");
    const double tau = r.entry.model.delay();
    if (cfg.fit_window.empty()) cfg.fit_window = {tau, cfg.T};
    require(cfg.fit_window.size() == 2, "--fit-window takes two values lo,hi");
    require(cfg.samples >= 1 && cfg.as_samples >= 1, "--samples and --as-samples must be at least 1");
    require(cfg.T > 0.0, "--T must be positive");
    require(cfg.fit_window[0] >= tau, "--fit-window must start at or after the delay");
    require(cfg.fit_window[0] < cfg.fit_window[1] && cfg.fit_window[1] <= cfg.T,
            "--fit-window must satisfy lo < hi <= T");

    const auto& cat = r.entry.stability;
    auto pick = [&](std::optional<double>& v, double StabilityConstants::*field, const char* flag) {
        if (!v) {
            if (!cat) throw ParameterError(std::string("model has no stability constants; pass ") + flag);
            v = (*cat).*field;
        }
    };
    pick(cfg.k6_bar, &StabilityConstants::k6_bar, "--k6bar");
    pick(cfg.k6, &StabilityConstants::k6, "--k6");
    pick(cfg.k7_bar, &StabilityConstants::k7_bar, "--k7bar");
    pick(cfg.k7, &StabilityConstants::k7, "--k7");
    const StabilityConstants constants{*cfg.k6_bar, *cfg.k6, *cfg.k7_bar, *cfg.k7};
    const double gamma_star = gamma_solve(constants.k6_bar, constants.k6, constants.k7_bar, constants.k7, tau);
    const double gamma = cfg.gamma.value_or(gamma_star);
    const double dt_bar = max_stable_stepsize(gamma, cfg.epsilon, constants.k6, r.profile.k_const(), r.profile.mu(), tau);
    const auto grid = make_grid(tau, cfg.n_list.front(), cfg.T);
    const auto dir = prepare_out_dir(cfg);
    if (grid.dt > dt_bar) err << "warning: dt = " << num(grid.dt) << " exceeds the admissible step " << num(dt_bar) << "\n";

    StabilityStudyConfig sc{constants, cfg.epsilon, cfg.gamma, cfg.n_list.front(), cfg.T, cfg.samples, cfg.as_samples,
                            cfg.seed, cfg.fit_window[0], cfg.fit_window[1]};
    const auto rep = stability_study(r.entry.model, r.profile, sc, Execution{cfg.threads});

    const fs::path ms_path = dir / "stability_ms.csv";
    auto ms = open_out(ms_path);
    ms << "t,mean_square,stderr\n";
    for (std::size_t i = 0; i < rep.mean_square.times.size(); ++i)
        ms << rep.mean_square.times[i] << "," << rep.mean_square.mean_square[i] << ","
           << rep.mean_square.standard_errors[i] << "\n";
    finish(ms, ms_path);

    const fs::path as_path = dir / "stability_as.csv";
    auto as = open_out(as_path);
    as << "path,exponent\n";
    for (std::size_t p = 0; p < rep.almost_sure.exponents.size(); ++p)
        as << p << "," << rep.almost_sure.exponents[p] << "\n";
    finish(as, as_path);

    const double rate = rep.gamma_used - rep.epsilon;
    const auto checks = gamma_constraints(rep.gamma_used, constants.k6, constants.k7, tau);
    const fs::path report_path = dir / "report.txt";
    auto report = open_out(report_path);
    report << "# sdde stability\ncommand_line = " << command_line(cfg) << "\nseed = " << cfg.seed
           << "\nmodel = " << r.entry.name << "\nscheme = " << cfg.scheme << "\ndt = " << num(rep.dt)
           << "\nT = " << num(cfg.T) << "\nsamples = " << cfg.samples << "\nas_samples = " << cfg.as_samples << "\n";
    write_profile(report, r.profile, rep.dt);
    report << "gamma_star = " << num(rep.gamma_theoretical) << "\ngamma_used = " << num(rep.gamma_used)
           << "\nK6 e^{gamma tau} + gamma = " << num(checks.delay_constraint)
           << "\nK7 e^{gamma tau} = " << num(checks.lyapunov_constraint) << "\nepsilon = " << num(rep.epsilon)
           << "\ndt_bar = " << num(rep.dt_bar) << "\ndt_within_dt_bar = " << (rep.dt <= rep.dt_bar ? "yes" : "no")
           << "\nguaranteed_ms_rate = " << num(-rate) << "\nms_slope = " << num(rep.mean_square.slope)
           << "\nms_intercept = " << num(rep.mean_square.intercept)
           << "\nms_extinct = " << (rep.mean_square.extinct ? "yes" : "no") << "\nfit_window = "
           << join(cfg.fit_window) << "\nguaranteed_as_exponent = " << num(-rate / 2.0)
           << "\nas_max_exponent = " << num(rep.almost_sure.max_exponent)
           << "\nas_fraction_within_bound = " << num(rep.almost_sure.fraction_at_most(-rate / 2.0)) << "\n";
    finish(report, report_path);

    out << "gamma* = " << num(rep.gamma_theoretical) << ", dt_bar = " << num(rep.dt_bar)
        << ", ms slope = " << num(rep.mean_square.slope) << " (bound " << num(-rate) << ")"
        << ", a.s. fraction <= " << num(-rate / 2.0) << ": " << num(rep.almost_sure.fraction_at_most(-rate / 2.0))
        << "\n";
    return kOk;
}

int run_gamma(ExperimentConfig& cfg, std::ostream& out) {
    const double g = gamma_solve(*cfg.k6_bar, *cfg.k6, *cfg.k7_bar, *cfg.k7, cfg.tau);
    auto show = [&](const char* label, double gamma) {
        const auto c = gamma_constraints(gamma, *cfg.k6, *cfg.k7, cfg.tau);
        out << label << " = " << num(gamma) << "\n  K6 e^{gamma tau} + gamma = " << num(c.delay_constraint)
            << " (K6bar = " << num(*cfg.k6_bar) << ")\n  K7 e^{gamma tau} = " << num(c.lyapunov_constraint)
            << " (K7bar = " << num(*cfg.k7_bar) << ")\n";
    };
    show("gamma*", g);
    show("gamma (2 decimals, rounded down)", std::floor(g * 100.0) / 100.0);
    if (cfg.gamma) show("gamma (user)", *cfg.gamma);
    if (cfg.mu || cfg.k_hat) {
        require(cfg.mu && cfg.k_hat, "--mu and --k-hat must be given together");
        const double gamma = cfg.gamma.value_or(g);
        out << "dt_bar = " << num(max_stable_stepsize(gamma, cfg.epsilon, *cfg.k6, *cfg.k_hat, *cfg.mu, cfg.tau))
            << " (gamma = " << num(gamma) << ", epsilon = " << num(cfg.epsilon) << ")\n";
    }
    return kOk;
}

void add_common(CLI::App* sub, ExperimentConfig& cfg) {
    sub->add_option("--model", cfg.model_name, "example1 | example2 | linear-decay");
    sub->add_option("--profile", cfg.profile_spec,
                    "default | polynomial:alpha=..,k4=..,q=..,r=.. | stability:mu=..");
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--T", cfg.T, "horizon");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
    sub->add_option("--out-dir", cfg.out_dir, "output directory (default $SDDE_OUT_DIR or .)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg;
    if (const char* env = std::getenv("SDDE_OUT_DIR"); env && *env) cfg.out_dir = env;
    if (cfg.out_dir.empty()) cfg.out_dir = ".";

    CLI::App app{"Truncated Euler-Maruyama experiments for stochastic delay differential equations", "sdde"};
    app.require_subcommand(1);

    int n_single = 0;
    auto* sim = app.add_subcommand("simulate", "simulate sample paths and write them as CSV");
    add_common(sim, cfg);
    sim->add_option("--scheme", cfg.scheme, "tem | stab-tem | em");
    sim->add_option("--n", n_single, "steps per delay (dt = tau/n)");
    sim->add_option("--paths", cfg.paths, "number of paths");
    sim->add_option("--out", cfg.out_file, "CSV file (default <out-dir>/path.csv)");

    auto* conv = app.add_subcommand("converge", "coupled strong-error study and log-log slope");
    add_common(conv, cfg);
    conv->add_option("--p", cfg.p_bar, "error moment");
    conv->add_option("--n-list", cfg.n_list, "steps per delay for the coarse runs")->delimiter(',');
    conv->add_option("--ref-n", cfg.ref_n, "steps per delay of the reference solution");
    conv->add_option("--samples", cfg.samples, "Monte Carlo paths");

    auto* stab = app.add_subcommand("stability", "mean-square decay and almost-sure exponents");
    add_common(stab, cfg);
    stab->add_option("--scheme", cfg.scheme, "stab-tem");
    stab->add_option("--n", n_single, "steps per delay");
    stab->add_option("--samples", cfg.samples, "paths for the mean-square study");
    stab->add_option("--as-samples", cfg.as_samples, "paths for the almost-sure exponents");
    stab->add_option("--epsilon", cfg.epsilon, "epsilon in (0, gamma)");
    stab->add_option("--gamma", cfg.gamma, "decay rate to use instead of gamma*");
    stab->add_option("--fit-window", cfg.fit_window, "lo,hi")->delimiter(',');
    stab->add_option("--k6bar", cfg.k6_bar);
    stab->add_option("--k6", cfg.k6);
    stab->add_option("--k7bar", cfg.k7_bar);
    stab->add_option("--k7", cfg.k7);

    auto* gam = app.add_subcommand("gamma", "solve for the exponential rate and admissible step");
    gam->add_option("--k6bar", cfg.k6_bar)->required();
    gam->add_option("--k6", cfg.k6)->required();
    gam->add_option("--k7bar", cfg.k7_bar)->required();
    gam->add_option("--k7", cfg.k7)->required();
    gam->add_option("--tau", cfg.tau);
    gam->add_option("--gamma", cfg.gamma, "check this rate too");
    gam->add_option("--epsilon", cfg.epsilon);
    gam->add_option("--mu", cfg.mu);
    gam->add_option("--k-hat", cfg.k_hat);

    std::vector<std::string> argv_store{"sdde"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    }
    auto* active = app.get_subcommands().front();
    cfg.command = active->get_name();
    // Zero means "use the command default" internally, so explicit zeros are rejected here.
    auto given = [&](const char* flag) { return active->get_option_no_throw(flag) && active->count(flag) > 0; };
    if ((given("--T") && !(cfg.T > 0.0)) || (given("--samples") && cfg.samples < 1) ||
        (given("--as-samples") && cfg.as_samples < 1)) {
        err << "config error: --T, --samples and --as-samples must be positive\n";
        return kConfigError;
    }
    if (sim->count("--n") + stab->count("--n") > 0) cfg.n_list = {n_single};
    if (cfg.command == "stability" && stab->count("--model") == 0) cfg.model_name = "example2";

    try {
        if (cfg.command == "simulate") return run_simulate(cfg, out);
        if (cfg.command == "converge") return run_converge(cfg, out);
        if (cfg.command == "stability") return run_stability(cfg, out, err);
        return run_gamma(cfg, out);
    } catch (const BlowUpError& e) {
        err << "blow-up: " << e.what() << "\n";
        return kBlowUp;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::domain_error& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::logic_error& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace sdde::cli
