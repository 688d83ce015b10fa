#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fk/model.hpp"
#include "fk/rng.hpp"

using namespace fk;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ModelSpec standard_spec(double k, double f_dc = 0.0) {
    ModelSpec spec;
    spec.onsite_strength = k;
    spec.forcing.f_dc = f_dc;
    return spec;
}

PeriodicConfiguration random_config(std::int64_t p, std::int64_t q, CounterRng& rng,
                                    double amp = 0.4) {
    PeriodicConfiguration c;
    c.winding = p;
    c.base.resize(static_cast<std::size_t>(q));
    const double rho = static_cast<double>(p) / static_cast<double>(q);
    for (std::int64_t j = 0; j < q; ++j) {
        c.base[static_cast<std::size_t>(j)] =
            static_cast<double>(j) * rho + rng.uniform(-amp, amp);
    }
    return c;
}

}  // namespace

TEST_CASE("energy window on hand-evaluated configurations") {
    SUBCASE("all terms vanish for k = 0, zero spacing") {
        ModelSpec spec = standard_spec(0.0);
        PeriodicConfiguration c{0, {0.0}};
        CHECK(energy_window(c, 0, 1, spec) == doctest::Approx(0.0));
        CHECK(energy_window(c, -3, 7, spec) == doctest::Approx(0.0));
    }
    SUBCASE("one period of the uniform spacing-1/2 chain") {
        ModelSpec spec = standard_spec(1.0);
        PeriodicConfiguration c{1, {0.0, 0.5}};
        // 2 W(1/2) - V(0) - V(1/2) with V(0) = -1/(2 pi)^2, V(1/2) = +1/(2 pi)^2
        CHECK(energy_window(c, 0, 2, spec) == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("invariant under the unit vertical translation") {
        ModelSpec spec = standard_spec(0.7);
        CounterRng rng(11);
        const PeriodicConfiguration c = random_config(2, 5, rng);
        CHECK(energy_window(translate(c, 0, 1), 0, 5, spec) ==
              doctest::Approx(energy_window(c, 0, 5, spec)).epsilon(1e-12));
    }
}

TEST_CASE("right-hand side of the gradient flow") {
    SUBCASE("uniform chain with no on-site term is force free") {
        ModelSpec spec = standard_spec(0.0);
        PeriodicConfiguration c{1, {0.0, 0.25, 0.5, 0.75}};
        for (std::int64_t j = -4; j < 8; ++j) {
            CHECK(rhs_force(c, j, 0.0, spec) == doctest::Approx(0.0));
        }
    }
    SUBCASE("single particle at u = 1/4") {
        ModelSpec spec = standard_spec(1.0);
        PeriodicConfiguration c{0, {0.25}};
        CHECK(rhs_force(c, 0, 0.0, spec) == doctest::Approx(1.0 / kTwoPi).epsilon(1e-12));
    }
    SUBCASE("DC forcing shifts every component additively") {
        ModelSpec a = standard_spec(1.0, 0.0);
        ModelSpec b = standard_spec(1.0, 0.05);
        CounterRng rng(3);
        const PeriodicConfiguration c = random_config(1, 6, rng);
        for (std::int64_t j = 0; j < 6; ++j) {
            CHECK(rhs_force(c, j, 0.0, b) ==
                  doctest::Approx(rhs_force(c, j, 0.0, a) + 0.05).epsilon(1e-12));
        }
    }
    SUBCASE("agrees with central differences of the energy") {
        ModelSpec spec = standard_spec(1.3);
        spec.spring_offset = 0.2;
        CounterRng rng(5);
        const PeriodicConfiguration c = random_config(2, 7, rng);
        const double h = 1e-6;
        for (std::int64_t j = 0; j < c.q(); ++j) {
            PeriodicConfiguration up = c, dn = c;
            up.base[static_cast<std::size_t>(j)] += h;
            dn.base[static_cast<std::size_t>(j)] -= h;
            const double grad = (energy_window(up, j - 1, j + 1, spec) -
                                 energy_window(dn, j - 1, j + 1, spec)) /
                                (2.0 * h);
            const double force = rhs_force(c, j, 0.0, spec);
            CHECK(std::abs(force + grad) < 1e-6 * (1.0 + std::abs(force)));
        }
    }
    SUBCASE("translation equivariance") {
        ModelSpec spec = standard_spec(0.9, 0.02);
        CounterRng rng(7);
        const PeriodicConfiguration c = random_config(3, 5, rng);
        for (std::int64_t m = -2; m <= 2; ++m) {
            for (std::int64_t n = -1; n <= 1; ++n) {
                const PeriodicConfiguration s = translate(c, m, n);
                for (std::int64_t j = 0; j < 5; ++j) {
                    CHECK(rhs_force(s, j, 0.3, spec) ==
                          doctest::Approx(rhs_force(c, j - m, 0.3, spec)).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("spatial translations") {
    CounterRng rng(1);
    const PeriodicConfiguration c = random_config(1, 4, rng);
    SUBCASE("vertical shift adds one pointwise") {
        const PeriodicConfiguration s = translate(c, 0, 1);
        for (std::int64_t j = 0; j < 4; ++j) {
            CHECK(s.u(j) == doctest::Approx(c.u(j) + 1.0));
        }
    }
    SUBCASE("group inverse") {
        const PeriodicConfiguration back = translate(translate(c, 3, -2), -3, 2);
        for (std::int64_t j = 0; j < 4; ++j) {
            CHECK(back.u(j) == doctest::Approx(c.u(j)));
        }
    }
    SUBCASE("index shift pulls in the winding") {
        PeriodicConfiguration d{1, {0.0, 0.6}};
        const PeriodicConfiguration s = translate(d, 1, 0);
        CHECK(s.u(0) == doctest::Approx(-0.4));
        CHECK(s.u(1) == doctest::Approx(0.0));
    }
}

TEST_CASE("mean spacing is exact and reduced") {
    CHECK(mean_spacing(PeriodicConfiguration{1, {0.0, 0.5}}) == Rational{1, 2});
    CHECK(mean_spacing(PeriodicConfiguration{2, {0.0, 0.5, 1.0, 1.5}}) == Rational{1, 2});
    PeriodicConfiguration big;
    big.winding = 245;
    big.base.resize(397, 0.0);
    CHECK(mean_spacing(big) == Rational{245, 397});
    CHECK(mean_spacing(big).str() == "245/397");
}

TEST_CASE("width deviation") {
    SUBCASE("uniform configurations have zero width") {
        const PeriodicConfiguration c = make_uniform({3, 5}, 10, 0.7);
        CHECK(width_deviation(c) == doctest::Approx(0.0));
    }
    SUBCASE("hand-enumerated two-site example") {
        PeriodicConfiguration c{1, {0.0, 0.9}};
        CHECK(width_deviation(c) == doctest::Approx(0.4));
    }
    SUBCASE("equals the max over one window of index pairs") {
        CounterRng rng(9);
        for (int trial = 0; trial < 10; ++trial) {
            const PeriodicConfiguration c = random_config(2, 6, rng);
            const double rho = mean_spacing(c).value();
            double direct = 0.0;
            for (std::int64_t m = 0; m < c.q(); ++m) {
                for (std::int64_t n = m + 1; n < m + 2 * c.q(); ++n) {
                    direct = std::max(direct,
                                      std::abs(c.u(n) - c.u(m) -
                                               static_cast<double>(n - m) * rho));
                }
            }
            CHECK(width_deviation(c) == doctest::Approx(direct).epsilon(1e-12));
        }
    }
}

TEST_CASE("model validation") {
    SUBCASE("standard spring is accepted") {
        ModelSpec spec = standard_spec(1.0);
        CHECK_NOTHROW(spec.validate());
    }
    SUBCASE("concave custom spring is rejected") {
        ModelSpec spec;
        spec.w_series = {0.0, 0.0, -0.5};  // W = -x^2/2
        CHECK_THROWS_AS(spec.validate(), ModelError);
    }
    SUBCASE("custom on-site series is exactly 1-periodic") {
        ModelSpec spec;
        spec.onsite_strength = 0.0;
        spec.v_series = {0.3, -0.1, 0.02};
        spec.validate();
        for (double u : {0.0, 0.123, 0.77, 3.4}) {
            CHECK(spec.V(u + 1.0) == doctest::Approx(spec.V(u)).epsilon(1e-12));
        }
    }
    SUBCASE("AC frequency must be small-denominator rational") {
        ModelSpec spec = standard_spec(1.0);
        spec.forcing.f_ac = 0.2;
        spec.forcing.nu0 = 0.2;
        CHECK_NOTHROW(spec.validate());
        CHECK(spec.forcing.period() == doctest::Approx(5.0));
        spec.forcing.nu0 = std::numbers::pi * 1e-3;
        CHECK_THROWS_AS(spec.validate(), ModelError);
    }
    SUBCASE("uniform construction checks divisibility") {
        CHECK_THROWS_AS(make_uniform({1, 3}, 4), ModelError);
        CHECK_NOTHROW(make_uniform({1, 3}, 9));
    }
}

TEST_CASE("all operations commute with the unit vertical translation") {
    ModelSpec spec = standard_spec(1.1, 0.03);
    CounterRng rng(21);
    const PeriodicConfiguration c = random_config(1, 5, rng);
    const PeriodicConfiguration s = translate(c, 0, 1);
    CHECK(mean_spacing(s) == mean_spacing(c));
    CHECK(width_deviation(s) == doctest::Approx(width_deviation(c)));
    CHECK(energy_window(s, 0, 5, spec) == doctest::Approx(energy_window(c, 0, 5, spec)));
    for (std::int64_t j = 0; j < 5; ++j) {
        CHECK(rhs_force(s, j, 0.1, spec) == doctest::Approx(rhs_force(c, j, 0.1, spec)));
    }
}
