#include <doctest.h>

#include <cmath>

#include "sdde/brownian.hpp"
#include "sdde/errors.hpp"
#include "sdde/model.hpp"
#include "sdde/scheme.hpp"

using namespace sdde;

namespace {

void zero_fn(std::span<const double>, std::span<const double>, std::span<double> out) {
    for (auto& v : out) v = 0.0;
}

SddeModel constant_model(double c) {
    return SddeModel(1, 1, 1.0, zero_fn, zero_fn, [c](double, std::span<double> out) { out[0] = c; }, std::abs(c));
}

// Generic profile whose bound is far beyond anything a short run reaches.
TruncationProfile huge_profile(double xi_sup) {
    return TruncationProfile([](double l) { return 1.0 + 1e-9 * (l - 1.0); }, [](double v) { return 1.0 + 1e9 * (v - 1.0); },
                             0.5, xi_sup, ProfileKind::Generic);
}

BrownianLattice lattice_for(const SddeModel& m, const SimulationGrid& g, std::uint64_t seed, std::uint64_t path) {
    return BrownianLattice::generate(seed, path, m.noise_dim(), g.dt, g.time(g.horizon_steps));
}

}  // namespace

TEST_CASE("grid construction") {
    const auto g = make_grid(1.0, 128, 8.0);
    CHECK(g.dt == std::ldexp(1.0, -7));
    CHECK(g.horizon_steps == 1024);
    CHECK(g.time(1024) == 8.0);
    const auto one = make_grid(1.0, 1, 1.0);
    CHECK(one.dt == 1.0);
    CHECK(one.horizon_steps == 1);
    CHECK_THROWS_AS(make_grid(2.0, 1, 1.0), ParameterError);
    CHECK_THROWS_AS(make_grid(1.0, 0, 1.0), ParameterError);
    CHECK_THROWS_AS(make_grid(1.0, 4, 0.0), ParameterError);
}

TEST_CASE("delay history ring") {
    const auto m = builtin_example_1().model;
    const auto g = make_grid(1.0, 4, 1.0);
    DelayHistory h(1, 4);
    h.fill_from_segment(m, g);
    CHECK(h.current()[0] == 0.0);
    CHECK(h.delayed()[0] == 1.0);
    const std::vector<double> s{5.0};
    h.push(s);
    CHECK(h.current()[0] == 5.0);
    CHECK(h.delayed()[0] == 0.5625);  // xi(-3/4)
}

TEST_CASE("single generic step by hand") {
    const auto e = builtin_example_1();
    const auto g = make_grid(1.0, 16, 1.0);
    DelayHistory h(1, 16);
    const std::vector<double> one{1.0};
    for (int i = 0; i <= 16; ++i) h.push(one);
    const std::vector<double> dw{0.0};
    const auto r = tem_step(e.model, e.recommended_profile, g, h, dw);
    CHECK(r.pre[0] == doctest::Approx(0.5625).epsilon(1e-15));
    CHECK(r.post[0] == r.pre[0]);
    CHECK_FALSE(r.truncated);
    CHECK_THROWS_AS(stability_tem_step(e.model, e.recommended_profile, g, h, dw), ParameterError);

    // The classic step shares the algebra.
    CHECK(em_step(e.model, g, h, dw) == r.pre);

    const std::vector<double> big_dw{3.0};
    const auto t = tem_step(e.model, e.recommended_profile, g, h, big_dw);
    CHECK(t.truncated);
    CHECK(t.post[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(t.post[0] * t.pre[0] > 0.0);
}

TEST_CASE("identity step leaves states inside the ball unchanged") {
    const auto m = constant_model(0.0);
    const auto p = huge_profile(0.0);
    const auto g = make_grid(1.0, 8, 1.0);
    DelayHistory h(1, 8);
    const std::vector<double> z{0.7}, dw{0.3};
    for (int i = 0; i <= 8; ++i) h.push(z);
    const auto r = tem_step(m, p, g, h, dw);
    CHECK(r.post[0] == 0.7);
}

TEST_CASE("stability step with linear drift") {
    const SddeModel m(
        2, 1, 1.0,
        [](std::span<const double> x, std::span<const double>, std::span<double> out) {
            out[0] = -x[0];
            out[1] = -x[1];
        },
        zero_fn, [](double, std::span<double> out) { out[0] = out[1] = 0.5; }, 0.5);
    const auto p = stability_profile(quadratic_phi_hat(), 0.01, 0.5, quadratic_phi_hat_inverse());
    const auto g = make_grid(1.0, 64, 1.0);
    DelayHistory h(2, 64);
    h.fill_from_segment(m, g);
    const std::vector<double> dw{0.0};
    const auto r = stability_tem_step(m, p, g, h, dw);
    CHECK(r.post[0] == doctest::Approx((1.0 - g.dt) * 0.5));
    CHECK(r.post[1] == doctest::Approx((1.0 - g.dt) * 0.5));
}

TEST_CASE("non-finite pre-truncation state is a blow-up at its step") {
    const SddeModel m(
        1, 1, 1.0, [](std::span<const double>, std::span<const double>, std::span<double> out) { out[0] = INFINITY; },
        zero_fn, [](double, std::span<double> out) { out[0] = 0.0; }, 0.0);
    const auto p = huge_profile(0.0);
    const auto g = make_grid(1.0, 4, 1.0);
    DelayHistory h(1, 4);
    h.fill_from_segment(m, g);
    const std::vector<double> dw{0.0};
    try {
        tem_step(m, p, g, h, dw, 6);
        FAIL("expected blow-up");
    } catch (const BlowUpError& e) {
        CHECK(e.step() == 7);
    }
    const auto lat = lattice_for(m, g, 0, 0);
    CHECK_THROWS_AS(simulate(m, &p, g, SchemeKind::GenericTEM, lat), BlowUpError);
}

TEST_CASE("initial segment is copied exactly") {
    const auto e = builtin_example_2();
    const auto g = make_grid(1.0, 32, 2.0);
    const auto lat = lattice_for(e.model, g, 3, 0);
    const auto traj = simulate(e.model, &e.recommended_profile, g, SchemeKind::StabilityTEM, lat);
    CHECK(traj.first_index() == -32);
    CHECK(traj.last_index() == 64);
    for (std::int64_t i = -32; i <= 0; ++i) CHECK(Vector(traj.state(i).begin(), traj.state(i).end()) ==
                                                  e.model.initial_segment(g.time(i)));
}

TEST_CASE("truncation ceiling on every truncated trajectory") {
    const auto e1 = builtin_example_1();
    const auto e2 = builtin_example_2();
    int violations = 0, truncations = 0;
    for (int n : {4, 16, 64}) {
        const auto g = make_grid(1.0, n, 2.0);
        const double b1 = truncation_bound(e1.recommended_profile, g.dt);
        const double b2 = truncation_bound(e2.recommended_profile, g.dt);
        for (std::uint64_t path = 0; path < 40; ++path) {
            const auto l1 = lattice_for(e1.model, g, 17, path);
            const auto t1 = simulate(e1.model, &e1.recommended_profile, g, SchemeKind::GenericTEM, l1);
            const auto l2 = lattice_for(e2.model, g, 17, path);
            const auto t2 = simulate(e2.model, &e2.recommended_profile, g, SchemeKind::StabilityTEM, l2);
            for (std::int64_t i = 1; i <= g.horizon_steps; ++i) {
                violations += norm(t1.state(i)) > b1 + 1e-9;
                violations += norm(t2.state(i)) > b2 + 1e-9;
            }
            for (auto t : t1.truncated) truncations += t;
            for (auto t : t2.truncated) truncations += t;
        }
    }
    CHECK(violations == 0);
    CHECK(truncations > 0);  // the ceiling was actually exercised
}

TEST_CASE("example2 iterates respect the 2^-7 bound") {
    const auto e = builtin_example_2();
    const auto g = make_grid(1.0, 128, 8.0);
    const double b = truncation_bound(e.recommended_profile, g.dt);
    CHECK(b == doctest::Approx(3.766).epsilon(1e-3));
    for (std::uint64_t path = 0; path < 10; ++path) {
        const auto lat = lattice_for(e.model, g, 42, path);
        const auto t = simulate(e.model, &e.recommended_profile, g, SchemeKind::StabilityTEM, lat);
        for (std::int64_t i = 1; i <= g.horizon_steps; ++i) REQUIRE(norm(t.state(i)) <= b + 1e-9);
    }
}

TEST_CASE("inactive truncation reproduces the classic scheme bit for bit") {
    const auto e = builtin_example_1();
    const auto p = huge_profile(e.model.initial_sup_norm());
    const auto g = make_grid(1.0, 64, 2.0);
    CHECK(truncation_bound(p, g.dt) > 1e6);
    for (std::uint64_t path = 0; path < 20; ++path) {
        const auto lat = lattice_for(e.model, g, 5, path);
        const auto tem = simulate(e.model, &p, g, SchemeKind::GenericTEM, lat);
        const auto em = simulate(e.model, nullptr, g, SchemeKind::ClassicEM, lat);
        double max_pre = 0.0;
        for (double v : tem.pre_norms) max_pre = std::max(max_pre, v);
        REQUIRE(max_pre < truncation_bound(p, g.dt));
        CHECK(tem.data == em.data);
        CHECK(tem.pre_norms == em.pre_norms);
    }
}

TEST_CASE("zero equilibrium is preserved by the stability scheme") {
    const auto e = builtin_example_2();
    const SddeModel zero_start(
        2, 2, 1.0, [&](auto x, auto y, auto out) { e.model.drift_into(x, y, out); },
        [&](auto x, auto y, auto out) { e.model.diffusion_into(x, y, out); },
        [](double, std::span<double> out) { out[0] = out[1] = 0.0; }, 0.0);
    const auto p = stability_profile(quadratic_phi_hat(), 0.01, 0.0, quadratic_phi_hat_inverse());
    const auto g = make_grid(1.0, 128, 8.0);
    for (std::uint64_t path = 0; path < 5; ++path) {
        const auto lat = lattice_for(zero_start, g, 1, path);
        const auto t = simulate(zero_start, &p, g, SchemeKind::StabilityTEM, lat);
        for (double v : t.data) REQUIRE(v == 0.0);
    }
}

TEST_CASE("constant model keeps its constant") {
    const auto m = constant_model(0.8);
    const auto p = huge_profile(0.8);
    const auto g = make_grid(1.0, 16, 3.0);
    const auto lat = lattice_for(m, g, 0, 0);
    const auto t = simulate(m, &p, g, SchemeKind::GenericTEM, lat);
    for (double v : t.data) CHECK(v == 0.8);
}

TEST_CASE("simulation is deterministic") {
    const auto e = builtin_example_1();
    const auto g = make_grid(1.0, 32, 1.0);
    const auto a = simulate(e.model, &e.recommended_profile, g, SchemeKind::GenericTEM, lattice_for(e.model, g, 9, 2));
    const auto b = simulate(e.model, &e.recommended_profile, g, SchemeKind::GenericTEM, lattice_for(e.model, g, 9, 2));
    const auto c = simulate(e.model, &e.recommended_profile, g, SchemeKind::GenericTEM, lattice_for(e.model, g, 9, 3));
    CHECK(a.data == b.data);
    CHECK(a.data != c.data);
}

TEST_CASE("linear decay reaches exp(-1)") {
    const auto m = oracle_linear_delay_model(1.0);
    const auto p = linear_decay_entry().recommended_profile;
    const auto g = make_grid(1.0, 1024, 1.0);
    const auto t = simulate(m, &p, g, SchemeKind::GenericTEM, lattice_for(m, g, 0, 0));
    const double z = t.state(g.horizon_steps)[0];
    CHECK(std::abs(z - std::exp(-1.0)) <= 1e-3);
    CHECK(z == doctest::Approx(0.3676997394112712).epsilon(1e-12));
}

TEST_CASE("classic scheme flags divergence instead of throwing") {
    SddeModel m(
        1, 1, 1.0, [](std::span<const double> x, std::span<const double>, std::span<double> out) {
            out[0] = x[0] - 8.0 * x[0] * x[0] * x[0];
        },
        [](std::span<const double>, std::span<const double> y, std::span<double> out) {
            out[0] = std::pow(std::abs(y[0]), 1.5);
        },
        [](double, std::span<double> out) { out[0] = 10.0; }, 10.0);
    const auto g = make_grid(1.0, 4, 12.5);
    int diverged = 0;
    for (std::uint64_t path = 0; path < 10; ++path) {
        const auto t = simulate(m, nullptr, g, SchemeKind::ClassicEM, lattice_for(m, g, 0, path));
        if (t.first_nonfinite_step) {
            ++diverged;
            CHECK(*t.first_nonfinite_step <= 50);
        }
    }
    CHECK(diverged >= 6);
}

TEST_CASE("auxiliary interpolant") {
    const auto e = builtin_example_1();
    const auto g = make_grid(1.0, 16, 1.0);
    const double fine = g.dt / 8.0;
    const auto lat = BrownianLattice::generate(2, 0, 1, fine, 1.0);
    const auto t = simulate(e.model, &e.recommended_profile, g, SchemeKind::GenericTEM, lat);
    for (std::int64_t i = 0; i <= g.horizon_steps; ++i) {
        const auto s = t.state(i);
        CHECK(interpolate_aux(t, e.model, lat, g.time(i)) == Vector(s.begin(), s.end()));
    }
    // Between nodes the interpolant is the partial Euler step driven by the partial W increment.
    const std::int64_t i = 5;
    const double at = g.time(i) + 3.0 * fine;
    const double z = t.state(i)[0], zd = t.state(i - 16)[0];
    const double dw = lat.value_at(at)[0] - lat.value_at(g.time(i))[0];
    const double expected = z + (z - 8.0 * z * z * z) * 3.0 * fine + std::pow(std::abs(zd), 1.5) * dw;
    CHECK(interpolate_aux(t, e.model, lat, at)[0] == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(interpolate_aux(t, e.model, lat, g.time(i) + 0.3 * fine), GridAlignmentError);
}

TEST_CASE("runner validation") {
    const auto e1 = builtin_example_1();
    const auto e2 = builtin_example_2();
    const auto g = make_grid(1.0, 8, 1.0);
    const auto lat1 = lattice_for(e1.model, g, 0, 0);
    CHECK_THROWS_AS(simulate(e1.model, &e2.recommended_profile, g, SchemeKind::GenericTEM, lat1), ParameterError);
    CHECK_THROWS_AS(simulate(e1.model, nullptr, g, SchemeKind::GenericTEM, lat1), ParameterError);
    CHECK_THROWS_AS(simulate(e2.model, &e2.recommended_profile, g, SchemeKind::StabilityTEM, lat1), ParameterError);
    const auto coarse = BrownianLattice::generate(0, 0, 1, 0.3, 1.2);
    CHECK_THROWS_AS(simulate(e1.model, &e1.recommended_profile, g, SchemeKind::GenericTEM, coarse),
                    GridAlignmentError);
    const auto g2 = make_grid(1.0, 8, 2.0);
    CHECK_THROWS_AS(simulate(e1.model, &e1.recommended_profile, g2, SchemeKind::GenericTEM, lat1),
                    GridAlignmentError);
    CHECK(std::string(to_string(SchemeKind::StabilityTEM)) == "stab-tem");
}
