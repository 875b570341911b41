#include <doctest.h>

#include <cmath>

#include "sdde/brownian.hpp"
#include "sdde/errors.hpp"

using namespace sdde;

TEST_CASE("generation is deterministic per seed and path") {
    const auto a = BrownianLattice::generate(1, 0, 2, 1.0 / 64, 2.0);
    const auto b = BrownianLattice::generate(1, 0, 2, 1.0 / 64, 2.0);
    const auto c = BrownianLattice::generate(1, 1, 2, 1.0 / 64, 2.0);
    const auto d = BrownianLattice::generate(2, 0, 2, 1.0 / 64, 2.0);
    CHECK(a.fine_steps() == 128);
    CHECK(a.increments().size() == 256);
    CHECK(std::equal(a.increments().begin(), a.increments().end(), b.increments().begin()));
    CHECK(a.increments()[0] != c.increments()[0]);
    CHECK(a.increments()[0] != d.increments()[0]);
    CHECK(a.seed() == 1);
    CHECK(c.path_index() == 1);
}

TEST_CASE("a shorter horizon is a prefix of a longer one") {
    const auto shortl = BrownianLattice::generate(5, 3, 2, 1.0 / 32, 1.0);
    const auto longl = BrownianLattice::generate(5, 3, 2, 1.0 / 32, 4.0);
    CHECK(std::equal(shortl.increments().begin(), shortl.increments().end(), longl.increments().begin()));
}

TEST_CASE("increment variance matches the step") {
    const double dt = std::ldexp(1.0, -10);
    const auto lat = BrownianLattice::generate(7, 0, 1, dt, 1000000 * dt);
    REQUIRE(lat.fine_steps() == 1000000);
    double s = 0.0, s2 = 0.0;
    for (double v : lat.increments()) {
        s += v;
        s2 += v * v;
    }
    const double n = static_cast<double>(lat.increments().size());
    const double var = s2 / n - (s / n) * (s / n);
    CHECK(var >= 0.95 * dt);
    CHECK(var <= 1.05 * dt);
}

TEST_CASE("coordinate streams are uncorrelated") {
    const auto lat = BrownianLattice::generate(9, 4, 2, 0.01, 1000.0);
    REQUIRE(lat.fine_steps() == 100000);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::int64_t k = 0; k < lat.fine_steps(); ++k) {
        const auto w = lat.fine_increment(k);
        sx += w[0];
        sy += w[1];
        sxx += w[0] * w[0];
        syy += w[1] * w[1];
        sxy += w[0] * w[1];
    }
    const double n = static_cast<double>(lat.fine_steps());
    const double cov = sxy / n - sx / n * sy / n;
    const double corr = cov / std::sqrt((sxx / n - sx / n * sx / n) * (syy / n - sy / n * sy / n));
    CHECK(std::abs(corr) <= 0.02);
}

TEST_CASE("coarse increments aggregate fine ones") {
    const double fine = 1.0 / 256;
    const auto lat = BrownianLattice::generate(3, 0, 2, fine, 1.0);
    const auto same = lat.coarse_increment(fine, 17);
    const auto f17 = lat.fine_increment(17);
    CHECK(same == Vector(f17.begin(), f17.end()));

    const auto four = lat.coarse_increment(4 * fine, 5);
    for (int j = 0; j < 2; ++j) {
        double direct = 0.0;
        for (int k = 20; k < 24; ++k) direct += lat.fine_increment(k)[static_cast<std::size_t>(j)];
        CHECK(four[static_cast<std::size_t>(j)] == direct);
    }
    CHECK(lat.stride_for(8 * fine) == 8);
    CHECK_THROWS_AS(lat.stride_for(1.5 * fine), GridAlignmentError);
    CHECK_THROWS_AS(lat.coarse_increment(3.3 * fine, 0), GridAlignmentError);
}

TEST_CASE("nested grids see the same Brownian path") {
    const double fine = std::ldexp(1.0, -12);
    const auto lat = BrownianLattice::generate(21, 8, 2, fine, 1.0);
    const double d1 = 4 * fine, d2 = 64 * fine;
    const std::int64_t ratio = 16;
    double worst = 0.0;
    for (std::int64_t i = 0; i < 64; ++i) {
        const auto direct = lat.coarse_increment(d2, i);
        Vector staged(2, 0.0);
        for (std::int64_t k = 0; k < ratio; ++k) {
            const auto part = lat.coarse_increment(d1, i * ratio + k);
            staged[0] += part[0];
            staged[1] += part[1];
        }
        for (int j = 0; j < 2; ++j) {
            const auto u = static_cast<std::size_t>(j);
            worst = std::max(worst, std::abs(direct[u] - staged[u]) / std::max(std::abs(direct[u]), std::sqrt(d2)));
        }
    }
    CHECK(worst <= 1e-12);

    // W at coarse nodes is the same whichever grid accumulates it.
    for (std::int64_t i = 0; i <= 64; ++i) {
        const auto w = lat.value_at(static_cast<double>(i) * d2);
        Vector acc(2, 0.0);
        for (std::int64_t k = 0; k < i * ratio; ++k) {
            const auto part = lat.coarse_increment(d1, k);
            acc[0] += part[0];
            acc[1] += part[1];
        }
        for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(w[j] - acc[j]) <= 1e-12 * std::max(1.0, std::abs(w[j])));
    }
}

TEST_CASE("value_at") {
    const double fine = 0.125;
    const auto lat = BrownianLattice::generate(4, 0, 1, fine, 2.0);
    CHECK(lat.value_at(0.0) == Vector{0.0});
    CHECK(lat.value_at(fine)[0] == lat.fine_increment(0)[0]);
    CHECK(lat.value_at_step(3)[0] ==
          doctest::Approx(lat.fine_increment(0)[0] + lat.fine_increment(1)[0] + lat.fine_increment(2)[0]));
    CHECK_THROWS_AS(lat.value_at(0.1), GridAlignmentError);
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(BrownianLattice::generate(0, 0, 0, 0.1, 1.0), ParameterError);
    CHECK_THROWS_AS(BrownianLattice::generate(0, 0, 1, 0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(grid_multiple(1.0, 0.3, "T"), GridAlignmentError);
    CHECK(grid_multiple(1.0, 1.0 / 3.0, "T") == 3);
}
