#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fk/dynamics.hpp"
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

// Stable rest point of the driven single particle: root of
// (k/2pi) sin(2pi u) + F on (1/2, 3/4) for 0 < F < k/2pi, k = 1.
double single_particle_rest(double f) {
    double lo = 0.5, hi = 0.75;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = std::sin(kTwoPi * mid) / kTwoPi + f;
        (g > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("integration basics") {
    SUBCASE("pure diffusion relaxes to the uniform chain") {
        ModelSpec spec = standard_spec(0.0);
        CounterRng rng(2);
        const PeriodicConfiguration c0 = random_config(2, 6, rng);
        IntegratorSettings s;
        const TrajectorySample traj = integrate(c0, spec, s, 60.0);
        const PeriodicConfiguration& last = traj.states.back();
        CHECK(last.winding == 2);
        CHECK(last.q() == 6);
        for (std::int64_t j = 0; j < 6; ++j) {
            CHECK(last.u(j + 1) - last.u(j) == doctest::Approx(2.0 / 6.0).epsilon(1e-6));
        }
        // and every particle has stopped
        CHECK(max_residual(last, traj.times.back(), spec) < 1e-8);
    }
    SUBCASE("single pinned particle settles on the stable rest point") {
        ModelSpec spec = standard_spec(1.0, 0.05);
        PeriodicConfiguration c0{0, {0.25}};
        IntegratorSettings s;
        const TrajectorySample traj = integrate(c0, spec, s, 120.0);
        const double expected = single_particle_rest(0.05);
        const double u_final = traj.states.back().u(0);
        CHECK(u_final - std::floor(u_final) == doctest::Approx(expected).epsilon(1e-7));
    }
    SUBCASE("flow commutes with spatial translations") {
        ModelSpec spec = standard_spec(1.0, 0.12);
        CounterRng rng(4);
        const PeriodicConfiguration c0 = random_config(1, 5, rng);
        IntegratorSettings s;
        const TrajectorySample a = integrate(c0, spec, s, 20.0);
        const TrajectorySample b = integrate(translate(c0, 2, 1), spec, s, 20.0);
        for (std::size_t i = 0; i < a.states.size(); ++i) {
            const PeriodicConfiguration expect = translate(a.states[i], 2, 1);
            for (std::int64_t j = 0; j < 5; ++j) {
                CHECK(b.states[i].u(j) == doctest::Approx(expect.u(j)).epsilon(1e-7));
            }
        }
    }
    SUBCASE("stroboscopic sampling grid") {
        ModelSpec spec = standard_spec(0.5, 0.02);
        IntegratorSettings s;
        s.strobe_period = 0.5;
        const TrajectorySample traj = integrate(make_uniform({0, 1}, 1), spec, s, 5.0);
        REQUIRE(traj.times.size() == 11);
        CHECK(traj.times[3] == doctest::Approx(1.5));
        CHECK(traj.strobe == doctest::Approx(0.5));
        CHECK(traj.displacement0.back() == doctest::Approx(traj.states.back().base[0]));
    }
    SUBCASE("AC sampling must respect the forcing period") {
        ModelSpec spec = standard_spec(1.0, 0.1);
        spec.forcing.f_ac = 0.2;
        spec.forcing.nu0 = 0.2;  // period 5
        IntegratorSettings s = settings_for(spec);
        CHECK(s.strobe_period == doctest::Approx(5.0));
        CHECK_NOTHROW(integrate(make_uniform({0, 1}, 1), spec, s, 20.0));
        s.strobe_period = 1.0;
        CHECK_THROWS_AS(integrate(make_uniform({0, 1}, 1), spec, s, 20.0), ModelError);
    }
}

TEST_CASE("order preservation along the flow") {
    ModelSpec spec = standard_spec(1.0, 0.1);
    IntegratorSettings s;
    CounterRng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        CounterRng trial_rng = rng.derive(static_cast<std::uint64_t>(trial));
        const PeriodicConfiguration lo = random_config(1, 6, trial_rng);
        PeriodicConfiguration hi = lo;
        for (double& u : hi.base) u += trial_rng.uniform(0.0, 0.8);
        const TrajectorySample a = integrate(lo, spec, s, 10.0);
        const TrajectorySample b = integrate(hi, spec, s, 10.0);
        for (std::size_t i = 0; i < a.states.size(); ++i) {
            for (std::int64_t j = 0; j < 6; ++j) {
                CHECK(a.states[i].u(j) <= b.states[i].u(j) + 1e-9);
            }
        }
    }
}

TEST_CASE("average velocity") {
    SUBCASE("no on-site potential drifts at exactly F_DC") {
        ModelSpec spec = standard_spec(0.0, 0.3);
        IntegratorSettings s;
        s.t_burn = 20.0;
        s.t_measure = 200.0;
        const VelocityEstimate est = average_velocity(make_uniform({2, 5}, 5), spec, s);
        CHECK(est.converged);
        CHECK(est.v == doctest::Approx(0.3).epsilon(1e-9));
    }
    SUBCASE("single-particle sliding law") {
        IntegratorSettings s;
        for (const double f : {0.2, 0.3, 0.5}) {
            ModelSpec spec = standard_spec(1.0, f);
            const VelocityEstimate est = average_velocity(make_uniform({0, 1}, 1), spec, s);
            const double expected = std::sqrt(f * f - 1.0 / (kTwoPi * kTwoPi));
            CHECK(est.converged);
            CHECK(std::abs(est.v - expected) < 1e-3);
        }
    }
    SUBCASE("below threshold the particle is pinned") {
        ModelSpec spec = standard_spec(1.0, 0.1);
        IntegratorSettings s;
        const VelocityEstimate est = average_velocity(make_uniform({0, 1}, 1), spec, s);
        CHECK(est.converged);
        CHECK(std::abs(est.v) < 1e-6);
    }
    SUBCASE("independent of the initial condition at fixed mean spacing") {
        ModelSpec spec = standard_spec(1.0, 0.25);
        IntegratorSettings s;
        s.t_measure = 1000.0;
        CounterRng rng(17);
        double v0 = 0.0, hw0 = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            CounterRng trial_rng = rng.derive(static_cast<std::uint64_t>(trial));
            const PeriodicConfiguration c0 = random_config(2, 4, trial_rng);
            const VelocityEstimate est = average_velocity(c0, spec, s);
            if (trial == 0) {
                v0 = est.v;
                hw0 = est.confidence_halfwidth;
            } else {
                CHECK(std::abs(est.v - v0) <= 2.0 * (hw0 + est.confidence_halfwidth));
            }
        }
    }
    SUBCASE("monotone in the driving force") {
        IntegratorSettings s;
        s.t_burn = 100.0;
        s.t_measure = 500.0;
        double prev = -1.0;
        for (const double f : {0.05, 0.12, 0.18, 0.25, 0.35}) {
            ModelSpec spec = standard_spec(1.0, f);
            const VelocityEstimate est = average_velocity(make_uniform({0, 1}, 1), spec, s);
            CHECK(est.v >= prev - 2e-3);
            prev = est.v;
        }
    }
}

TEST_CASE("dynamic depinning force") {
    IntegratorSettings s;
    s.t_burn = 100.0;
    s.t_measure = 1000.0;
    SUBCASE("single particle threshold is k / 2 pi") {
        ModelSpec spec = standard_spec(1.0);
        const double fc = depinning_force_dynamic(spec, {0, 1}, 0.0, 0.3, 1e-4, 1e-4, s);
        CHECK(fc == doctest::Approx(1.0 / kTwoPi).epsilon(2e-3));
    }
    SUBCASE("free chain slides at any positive force") {
        ModelSpec spec = standard_spec(0.0);
        const double fc = depinning_force_dynamic(spec, {1, 2}, 0.0, 0.1, 1e-4, 1e-3, s);
        CHECK(std::abs(fc) < 2.5e-3);
    }
    SUBCASE("invalid bracket is rejected") {
        ModelSpec spec = standard_spec(1.0);
        CHECK_THROWS_AS(depinning_force_dynamic(spec, {0, 1}, 0.0, 0.05, 1e-4, 1e-4, s),
                        BracketInvalid);
    }
}

TEST_CASE("synchronization check") {
    IntegratorSettings s;
    SUBCASE("uniform sliding chain is synchronized") {
        ModelSpec spec = standard_spec(0.0, 0.2);
        const TrajectorySample traj = integrate(make_uniform({1, 2}, 4, 0.1), spec, s, 10.0);
        std::vector<SyncShift> shifts;
        for (std::int64_t m = 0; m < 3; ++m) {
            for (std::int64_t n = -1; n <= 1; ++n) {
                for (std::int64_t off = 0; off < 3; ++off) shifts.push_back({m, n, off});
            }
        }
        const SyncResult res = synchronization_check(traj, shifts);
        CHECK(res.synchronized);
    }
    SUBCASE("a squeezed-in particle against its own translate is violated") {
        // Extra particle coincident with its neighbour: the difference graph
        // against the (1,0) translate touches zero, an explicit intersection.
        PeriodicConfiguration kink{2, {0.0, 0.5, 0.5, 1.0, 1.5}};
        TrajectorySample traj;
        traj.times = {0.0};
        traj.states = {kink};
        traj.displacement0 = {kink.base[0]};
        const SyncResult res = synchronization_check(traj, {{1, 0, 0}});
        CHECK_FALSE(res.synchronized);
        REQUIRE(res.witnesses.size() == 1);
        CHECK(res.witnesses[0].shift.m == 1);
    }
    SUBCASE("time offsets beyond coverage are rejected") {
        ModelSpec spec = standard_spec(0.0, 0.2);
        const TrajectorySample traj = integrate(make_uniform({0, 1}, 1), spec, s, 3.0);
        CHECK_THROWS_AS(synchronization_check(traj, {{0, 0, 10}}), InsufficientSpan);
    }
}
