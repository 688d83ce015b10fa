#pragma once

#include <cstdint>
#include <vector>

#include "fk/dynamics.hpp"
#include "fk/model.hpp"

namespace fk {

enum class CrossingKind { transversal, nontransversal };

// Crossings of the difference graph j -> v_j - u_j over one fundamental
// period of the pair. Touching counts (product <= 0); zero-runs collapse to
// a single event at the run's first bond. `identical` flags u == v within
// tolerance (zero crossings by convention, reported distinctly).
struct IntersectionReport {
    std::int64_t count = 0;
    std::vector<std::int64_t> sites;
    std::vector<CrossingKind> kinds;
    bool identical = false;
};

// Equal mean spacing: one cyclic count over lcm(q_u, q_v) bonds. Unequal
// mean spacing: windowed counts of u vs v+n summed over |n| <= n_span.
// A difference |d_j| <= zero_tol * (1 + |u_j| + |v_j|) counts as zero.
IntersectionReport count_intersections(const PeriodicConfiguration& u,
                                       const PeriodicConfiguration& v, std::int64_t n_span = 0,
                                       double zero_tol = 1e-9);

// Maximal number of crossings of u with its own translates S_{m,n} u.
// The n window is centered at round(m rho) with halfwidth
// ceil(2 * width_deviation) + 1; translates further out cannot cross.
std::int64_t defect_count(const PeriodicConfiguration& u, double zero_tol = 1e-9);

// Uniformly weighted empirical measure. The lyapunov estimate assumes the
// member list is closed under spatial shifts.
struct EmpiricalEnsemble {
    std::vector<PeriodicConfiguration> members;

    // {S_{m,0} u : u in base, 0 <= m < q(u)}; integer offsets are absorbed
    // by the offset sum inside lyapunov_estimate.
    static EmpiricalEnsemble closed_under_shifts(const std::vector<PeriodicConfiguration>& base);
};

// (1/|e|^2) sum over ordered pairs (u, v) and integer offsets n of the
// indicator that u+n and v cross at bond 0.
double lyapunov_estimate(const EmpiricalEnsemble& e, double zero_tol = 1e-9);

// Evolves every base member and reports the lyapunov estimate at each
// sampled time, re-closing under spatial shifts at every sample.
std::vector<double> monotonicity_series(const EmpiricalEnsemble& e0, const ModelSpec& spec,
                                        const IntegratorSettings& s,
                                        const std::vector<double>& times);

}  // namespace fk
