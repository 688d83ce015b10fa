#include "fk/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fk/intersect.hpp"

namespace fk {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the 5th-order weights and the embedded 4th-order ones.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
    const ModelSpec& spec;
    std::int64_t winding;
    std::size_t n;
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp;
    bool have_k1 = false;

    Stepper(const ModelSpec& s, std::int64_t w, std::size_t size)
        : spec(s), winding(w), n(size), k1(size), k2(size), k3(size), k4(size), k5(size),
          k6(size), k7(size), ytmp(size) {}

    void deriv(const std::vector<double>& y, double t, std::vector<double>& out) {
        rhs_all(y, winding, t, spec, out);
    }

    // One accepted step; returns the max scaled error of the attempt.
    double attempt(std::vector<double>& y, double t, double dt, std::vector<double>& ynew) {
        if (!have_k1) {
            deriv(y, t, k1);
            have_k1 = true;
        }
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dt * a21 * k1[i];
        deriv(ytmp, t + c2 * dt, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + dt * (a31 * k1[i] + a32 * k2[i]);
        deriv(ytmp, t + c3 * dt, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        deriv(ytmp, t + c4 * dt, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        deriv(ytmp, t + c5 * dt, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + dt * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                   a65 * k5[i]);
        deriv(ytmp, t + dt, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        deriv(ynew, t + dt, k7);

        double err = 0.0;
        const double tol = spec_tol();
        for (std::size_t i = 0; i < n; ++i) {
            const double e = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double scale = tol * (1.0 + std::max(std::abs(y[i]), std::abs(ynew[i])));
            err = std::max(err, std::abs(e) / scale);
        }
        return err;
    }

    void accept() { k1.swap(k7); }  // FSAL

    double tol = 1e-8;
    double spec_tol() const { return tol; }
};

}  // namespace

IntegratorSettings settings_for(const ModelSpec& spec) {
    IntegratorSettings s;
    if (spec.forcing.f_ac > 0.0) s.strobe_period = spec.forcing.period();
    return s;
}

void flow(std::vector<double>& base, std::int64_t winding, double t0, double t1,
          const ModelSpec& spec, const IntegratorSettings& s) {
    if (!(t1 > t0)) return;
    Stepper st(spec, winding, base.size());
    st.tol = s.error_tol;
    std::vector<double> ynew(base.size());
    double t = t0;
    double dt = std::min(s.dt_max, t1 - t0);
    while (t < t1) {
        dt = std::min(dt, t1 - t);
        const double err = st.attempt(base, t, dt, ynew);
        if (std::isfinite(err) && err <= 1.0) {
            base.swap(ynew);
            st.accept();
            t += dt;
            const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            dt = std::min(s.dt_max, dt * std::clamp(grow, 0.2, 5.0));
        } else {
            dt *= std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5) : 0.5;
            if (dt < 1e-12) {
                throw StepSizeUnderflow("adaptive step fell below 1e-12 at t = " +
                                        std::to_string(t));
            }
        }
    }
}

TrajectorySample integrate(const PeriodicConfiguration& c0, const ModelSpec& spec,
                           const IntegratorSettings& s, double t_span) {
    if (!(t_span > 0.0)) throw ModelError("integrate requires t_span > 0");
    if (!(s.strobe_period > 0.0)) throw ModelError("strobe period must be > 0");
    if (spec.forcing.f_ac > 0.0) {
        const double period = spec.forcing.period();
        const double ratio = s.strobe_period / period;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 0.5) {
            throw ModelError("AC runs must sample at a multiple of the forcing period");
        }
    }
    TrajectorySample out;
    out.strobe = s.strobe_period;
    const auto samples = static_cast<std::int64_t>(std::floor(t_span / s.strobe_period + 1e-9));
    out.times.reserve(static_cast<std::size_t>(samples) + 1);
    out.states.reserve(static_cast<std::size_t>(samples) + 1);
    out.displacement0.reserve(static_cast<std::size_t>(samples) + 1);

    PeriodicConfiguration state = c0;
    double t = 0.0;
    out.times.push_back(0.0);
    out.states.push_back(state);
    out.displacement0.push_back(state.base[0]);
    for (std::int64_t i = 1; i <= samples; ++i) {
        const double target = static_cast<double>(i) * s.strobe_period;
        flow(state.base, state.winding, t, target, spec, s);
        t = target;
        out.times.push_back(t);
        out.states.push_back(state);
        out.displacement0.push_back(state.base[0]);
    }
    return out;
}

namespace {

struct VelocityWindows {
    double v = 0.0, v_first = 0.0, v_second = 0.0;
};

VelocityWindows measure_windows(std::vector<double>& base, std::int64_t winding, double& t,
                                const ModelSpec& spec, const IntegratorSettings& s,
                                double t_measure) {
    const double u_a = base[0];
    flow(base, winding, t, t + 0.5 * t_measure, spec, s);
    const double u_m = base[0];
    flow(base, winding, t + 0.5 * t_measure, t + t_measure, spec, s);
    const double u_b = base[0];
    t += t_measure;
    VelocityWindows w;
    w.v = (u_b - u_a) / t_measure;
    w.v_first = (u_m - u_a) / (0.5 * t_measure);
    w.v_second = (u_b - u_m) / (0.5 * t_measure);
    return w;
}

VelocityEstimate estimate_from(const VelocityWindows& w, const IntegratorSettings& s,
                               double t_measure) {
    VelocityEstimate est;
    est.v = w.v;
    est.confidence_halfwidth =
        std::abs(w.v_first - w.v_second) + 4.0 * s.error_tol / t_measure + 1e-14;
    est.converged = est.confidence_halfwidth <= 1e-3;
    return est;
}

}  // namespace

VelocityEstimate average_velocity(const PeriodicConfiguration& c0, const ModelSpec& spec,
                                  const IntegratorSettings& s) {
    std::vector<double> base = c0.base;
    double t = 0.0;
    flow(base, c0.winding, 0.0, s.t_burn, spec, s);
    t = s.t_burn;
    const VelocityWindows w = measure_windows(base, c0.winding, t, spec, s, s.t_measure);
    return estimate_from(w, s, s.t_measure);
}

MobilityDecision classify_mobility(const PeriodicConfiguration& c0, const ModelSpec& spec,
                                   IntegratorSettings s, double v_threshold) {
    std::vector<double> base = c0.base;
    double t = 0.0;
    flow(base, c0.winding, 0.0, s.t_burn, spec, s);
    t = s.t_burn;

    double t_measure = s.t_measure;
    MobilityDecision out;
    for (int attempt = 0; attempt < 5; ++attempt) {
        const VelocityWindows w = measure_windows(base, c0.winding, t, spec, s, t_measure);
        out.estimate = estimate_from(w, s, t_measure);
        const double v = out.estimate.v;
        const double hw = out.estimate.confidence_halfwidth;
        if (out.estimate.converged && v - hw > v_threshold) {
            out.sliding = true;
            return out;
        }
        if (v + hw < v_threshold) {
            out.sliding = false;
            return out;
        }
        t_measure *= 2.0;  // undecided: extend the window (critical slowing down)
    }
    out.sliding = out.estimate.v > v_threshold;
    return out;
}

double depinning_force_dynamic(const ModelSpec& spec_template, Rational rho, double f_lo,
                               double f_hi, double v_threshold, double tol,
                               const IntegratorSettings& s, std::int64_t q_hint) {
    if (!(tol > 0.0)) throw BracketInvalid("depinning bisection requires tol > 0");
    if (!(f_lo < f_hi)) throw BracketInvalid("depinning bisection requires f_lo < f_hi");
    const std::int64_t q = q_hint > 0 ? q_hint : rho.den;
    if (q % rho.den != 0) throw ModelError("q_hint incompatible with rho");

    ModelSpec spec = spec_template;
    PeriodicConfiguration state = make_uniform(rho, q);

    const auto decide = [&](double f, const PeriodicConfiguration& init,
                            double bracket_width) -> MobilityDecision {
        spec.forcing.f_dc = f;
        IntegratorSettings local = s;
        // Longer transients near the threshold.
        const double scale = std::clamp(0.005 / std::max(bracket_width, 1e-9), 1.0, 10.0);
        local.t_burn = s.t_burn * scale;
        return classify_mobility(init, spec, local, v_threshold);
    };

    const MobilityDecision lo_dec = decide(f_lo, state, f_hi - f_lo);
    if (lo_dec.sliding) {
        throw BracketInvalid("velocity at f_lo already exceeds the threshold");
    }
    const MobilityDecision hi_dec = decide(f_hi, state, f_hi - f_lo);
    if (!hi_dec.sliding) {
        throw BracketInvalid("velocity at f_hi does not reach the threshold");
    }

    double lo = f_lo, hi = f_hi;
    PeriodicConfiguration warm = state;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        spec.forcing.f_dc = mid;
        // Warm-start from the previous level's final state to track the
        // attracting branch.
        std::vector<double> base = warm.base;
        IntegratorSettings local = s;
        const double scale = std::clamp(0.005 / std::max(hi - lo, 1e-9), 1.0, 10.0);
        local.t_burn = s.t_burn * scale;
        flow(base, warm.winding, 0.0, local.t_burn, spec, local);
        PeriodicConfiguration settled{warm.winding, base};
        local.t_burn = 0.0;
        const MobilityDecision dec = classify_mobility(settled, spec, local, v_threshold);
        warm = settled;
        if (dec.sliding) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

SyncResult synchronization_check(const TrajectorySample& traj, const std::vector<SyncShift>& shifts,
                                 double tol) {
    const auto n_samples = static_cast<std::int64_t>(traj.states.size());
    SyncResult out;
    for (const SyncShift& shift : shifts) {
        if (shift.s >= n_samples) {
            throw InsufficientSpan("time offset s = " + std::to_string(shift.s) +
                                   " exceeds trajectory coverage");
        }
        for (std::int64_t i = 0; i + shift.s < n_samples; ++i) {
            const PeriodicConfiguration& u = traj.states[static_cast<std::size_t>(i)];
            const PeriodicConfiguration v =
                translate(traj.states[static_cast<std::size_t>(i + shift.s)], shift.m, shift.n);
            const IntersectionReport rep = count_intersections(u, v, 0, tol);
            if (rep.identical) continue;
            if (rep.count > 0) {
                out.synchronized = false;
                out.witnesses.push_back(
                    {shift, rep.sites.front(), traj.times[static_cast<std::size_t>(i)]});
                break;  // one witness per shift is enough
            }
        }
    }
    return out;
}

}  // namespace fk
