#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fk/rational.hpp"

namespace fk {

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// External drive f(t) = F_DC + F_AC sin(2 pi nu0 t). DC means F_AC = 0.
// Stroboscopic analysis requires nu0 rational with a small denominator;
// period() reports the smallest T > 0 with f(t+T) = f(t).
struct Forcing {
    double f_dc = 0.0;
    double f_ac = 0.0;
    double nu0 = 1.0;

    bool is_dc() const { return f_ac == 0.0; }
    double at(double t) const;
    double period() const;
};

// Chain model: strictly convex spring W between neighbours, 1-periodic
// on-site potential V, external drive f. The standard family is
//   V(u) = -k cos(2 pi u) / (2 pi)^2,   W(s) = (s - mu)^2 / 2.
// A custom on-site potential is a finite cosine series with integer
// frequencies, V(u) = sum_m c_m cos(2 pi m u); a custom spring is a
// polynomial in (s - mu). Both keep V exactly 1-periodic and all
// derivatives analytic.
struct ModelSpec {
    double onsite_strength = 1.0;  // k
    double spring_offset = 0.0;    // mu
    double convexity_floor = 1e-8; // delta
    Forcing forcing;
    std::vector<double> v_series;  // empty: standard V
    std::vector<double> w_series;  // empty: standard W

    bool standard_v() const { return v_series.empty(); }
    bool standard_w() const { return w_series.empty(); }

    double V(double u) const;
    double Vp(double u) const;
    double Vpp(double u) const;
    double W(double s) const;
    double Wp(double s) const;
    double Wpp(double s) const;

    // Convexity W'' >= delta, checked on a 1000-point grid over [lo, hi].
    // Throws ModelError on violation.
    void require_convex(double lo, double hi) const;
    void validate() const;
};

// Lift of a (p,q)-periodic chain state: q base positions plus integer
// winding p, extended by u_{j+q} = u_j + p. Positions are lifts and are
// never reduced mod 1; reduction happens only at projection/output time.
struct PeriodicConfiguration {
    std::int64_t winding = 0;   // p
    std::vector<double> base;   // u_0 .. u_{q-1}

    std::int64_t q() const { return static_cast<std::int64_t>(base.size()); }

    double u(std::int64_t j) const {
        const std::int64_t n = q();
        const std::int64_t cycles = (j >= 0) ? j / n : -((-j + n - 1) / n);
        return base[static_cast<std::size_t>(j - cycles * n)] +
               static_cast<double>(winding) * static_cast<double>(cycles);
    }
};

// u_j = j * rho + phase; q must be a multiple of rho's denominator.
PeriodicConfiguration make_uniform(Rational rho, std::int64_t q, double phase = 0.0);

// Spatial translation S_{m,n}: (S_{m,n} u)_j = u_{j-m} + n.
PeriodicConfiguration translate(const PeriodicConfiguration& c, std::int64_t m, std::int64_t n);

// p/q in lowest terms.
Rational mean_spacing(const PeriodicConfiguration& c);

// Bounded-width constant K = max over one period of index pairs of
// |u_n - u_m - (n-m) rho|.
double width_deviation(const PeriodicConfiguration& c);

// sum_{j=m}^{n-1} [ W(u_{j+1}-u_j) - V(u_j) ], m < n.
double energy_window(const PeriodicConfiguration& c, std::int64_t m, std::int64_t n,
                     const ModelSpec& spec);

// Right-hand side of the gradient flow for particle j:
//   W'(u_{j+1}-u_j) - W'(u_j-u_{j-1}) + V'(u_j) + f(t).
double rhs_force(const PeriodicConfiguration& c, std::int64_t j, double t, const ModelSpec& spec);

// Whole-chain right-hand side with wrap-around winding; out.size() == base.size().
void rhs_all(std::span<const double> base, std::int64_t winding, double t, const ModelSpec& spec,
             std::span<double> out);

// max_j |rhs_force(c, j, t)| over one period.
double max_residual(const PeriodicConfiguration& c, double t, const ModelSpec& spec);

// Stroboscopic record of a trajectory. displacement0 is the continuous lift
// of particle 0 (no mod-1 jumps); strobe is the sampling period actually used.
struct TrajectorySample {
    std::vector<double> times;
    std::vector<PeriodicConfiguration> states;
    std::vector<double> displacement0;
    double strobe = 1.0;
};

}  // namespace fk
