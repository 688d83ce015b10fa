#include "fk/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fk {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double Forcing::at(double t) const {
    return is_dc() ? f_dc : f_dc + f_ac * std::sin(kTwoPi * nu0 * t);
}

double Forcing::period() const {
    if (is_dc()) return 0.0;
    const Rational r = approximate_rational(nu0, 1000);
    if (r.num <= 0 || std::abs(r.value() - nu0) > 1e-9 * nu0) {
        throw ModelError("AC frequency nu0 must be rational with denominator <= 1000");
    }
    // smallest T with nu0 * T integer, nu0 = a/b reduced: T = b/a
    return static_cast<double>(r.den) / static_cast<double>(r.num);
}

double ModelSpec::V(double u) const {
    if (standard_v()) return -onsite_strength * std::cos(kTwoPi * u) / (kTwoPi * kTwoPi);
    double acc = 0.0;
    for (std::size_t m = 0; m < v_series.size(); ++m) {
        acc += v_series[m] * std::cos(kTwoPi * static_cast<double>(m + 1) * u);
    }
    return acc;
}

double ModelSpec::Vp(double u) const {
    if (standard_v()) return onsite_strength * std::sin(kTwoPi * u) / kTwoPi;
    double acc = 0.0;
    for (std::size_t m = 0; m < v_series.size(); ++m) {
        const double w = kTwoPi * static_cast<double>(m + 1);
        acc -= v_series[m] * w * std::sin(w * u);
    }
    return acc;
}

double ModelSpec::Vpp(double u) const {
    if (standard_v()) return onsite_strength * std::cos(kTwoPi * u);
    double acc = 0.0;
    for (std::size_t m = 0; m < v_series.size(); ++m) {
        const double w = kTwoPi * static_cast<double>(m + 1);
        acc -= v_series[m] * w * w * std::cos(w * u);
    }
    return acc;
}

double ModelSpec::W(double s) const {
    const double x = s - spring_offset;
    if (standard_w()) return 0.5 * x * x;
    double acc = 0.0;
    for (std::size_t i = w_series.size(); i-- > 0;) acc = acc * x + w_series[i];
    return acc;
}

double ModelSpec::Wp(double s) const {
    const double x = s - spring_offset;
    if (standard_w()) return x;
    double acc = 0.0;
    for (std::size_t i = w_series.size(); i-- > 1;) {
        acc = acc * x + static_cast<double>(i) * w_series[i];
    }
    return acc;
}

double ModelSpec::Wpp(double s) const {
    const double x = s - spring_offset;
    if (standard_w()) return 1.0;
    double acc = 0.0;
    for (std::size_t i = w_series.size(); i-- > 2;) {
        acc = acc * x + static_cast<double>(i) * static_cast<double>(i - 1) * w_series[i];
    }
    return acc;
}

void ModelSpec::require_convex(double lo, double hi) const {
    if (!(hi > lo)) hi = lo + 1.0;
    const int n = 1000;
    for (int i = 0; i <= n; ++i) {
        const double s = lo + (hi - lo) * static_cast<double>(i) / n;
        if (!(Wpp(s) >= convexity_floor)) {
            throw ModelError("spring potential violates W'' >= delta at spacing " +
                             std::to_string(s));
        }
    }
}

void ModelSpec::validate() const {
    if (!(convexity_floor > 0.0)) throw ModelError("convexity floor delta must be > 0");
    if (onsite_strength < 0.0) throw ModelError("onsite strength k must be >= 0");
    if (forcing.f_ac < 0.0) throw ModelError("F_AC must be >= 0");
    if (forcing.f_ac > 0.0) {
        if (!(forcing.nu0 > 0.0)) throw ModelError("nu0 must be > 0 for AC drive");
        (void)forcing.period();  // throws if not small-denominator rational
    }
    require_convex(spring_offset - 2.0, spring_offset + 2.0);
}

PeriodicConfiguration make_uniform(Rational rho, std::int64_t q, double phase) {
    if (q < 1) throw ModelError("q must be >= 1");
    if (q % rho.den != 0) {
        throw ModelError("q = " + std::to_string(q) + " cannot host mean spacing " + rho.str());
    }
    PeriodicConfiguration c;
    c.winding = rho.num * (q / rho.den);
    c.base.resize(static_cast<std::size_t>(q));
    const double r = rho.value();
    for (std::int64_t j = 0; j < q; ++j) {
        c.base[static_cast<std::size_t>(j)] = static_cast<double>(j) * r + phase;
    }
    return c;
}

PeriodicConfiguration translate(const PeriodicConfiguration& c, std::int64_t m, std::int64_t n) {
    PeriodicConfiguration out;
    out.winding = c.winding;
    out.base.resize(c.base.size());
    for (std::int64_t j = 0; j < c.q(); ++j) {
        out.base[static_cast<std::size_t>(j)] = c.u(j - m) + static_cast<double>(n);
    }
    return out;
}

Rational mean_spacing(const PeriodicConfiguration& c) { return {c.winding, c.q()}; }

double width_deviation(const PeriodicConfiguration& c) {
    // e_j = u_j - j rho is q-periodic, so the max over the spec's window of
    // index pairs equals the spread of e over one period.
    const double rho = mean_spacing(c).value();
    double lo = c.base[0], hi = c.base[0];
    for (std::int64_t j = 1; j < c.q(); ++j) {
        const double e = c.base[static_cast<std::size_t>(j)] - static_cast<double>(j) * rho;
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    return hi - lo;
}

double energy_window(const PeriodicConfiguration& c, std::int64_t m, std::int64_t n,
                     const ModelSpec& spec) {
    if (!(m < n)) throw ModelError("energy_window requires m < n");
    double acc = 0.0;
    for (std::int64_t j = m; j < n; ++j) {
        acc += spec.W(c.u(j + 1) - c.u(j)) - spec.V(c.u(j));
    }
    return acc;
}

double rhs_force(const PeriodicConfiguration& c, std::int64_t j, double t, const ModelSpec& spec) {
    const double uj = c.u(j);
    return spec.Wp(c.u(j + 1) - uj) - spec.Wp(uj - c.u(j - 1)) + spec.Vp(uj) +
           spec.forcing.at(t);
}

void rhs_all(std::span<const double> base, std::int64_t winding, double t, const ModelSpec& spec,
             std::span<double> out) {
    const std::size_t q = base.size();
    const double f = spec.forcing.at(t);
    const double p = static_cast<double>(winding);
    if (q == 1) {
        out[0] = spec.Wp(p) - spec.Wp(p) + spec.Vp(base[0]) + f;
        return;
    }
    // Standard spring: W' differences telescope to the discrete Laplacian.
    const bool std_w = spec.standard_w();
    double left = std_w ? 0.0 : spec.Wp(base[0] - (base[q - 1] - p));
    for (std::size_t j = 0; j < q; ++j) {
        const double next = (j + 1 < q) ? base[j + 1] : base[0] + p;
        if (std_w) {
            const double prev = (j > 0) ? base[j - 1] : base[q - 1] - p;
            out[j] = next - 2.0 * base[j] + prev + spec.Vp(base[j]) + f;
        } else {
            const double right = spec.Wp(next - base[j]);
            out[j] = right - left + spec.Vp(base[j]) + f;
            left = right;
        }
    }
}

double max_residual(const PeriodicConfiguration& c, double t, const ModelSpec& spec) {
    std::vector<double> g(c.base.size());
    rhs_all(c.base, c.winding, t, spec, g);
    double worst = 0.0;
    for (const double v : g) worst = std::max(worst, std::abs(v));
    return worst;
}

}  // namespace fk
